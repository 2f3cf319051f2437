#include "patientsim/error.hpp"

namespace patientsim {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::validation: return "validation_error";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::render: return "render_error";
    case ErrorCode::provider: return "provider_error";
    case ErrorCode::extraction: return "extraction_error";
    case ErrorCode::script_mismatch: return "script_mismatch";
    case ErrorCode::upstream: return "upstream_error";
    case ErrorCode::undefined_agreement: return "undefined_agreement";
    case ErrorCode::invalid_input: return "invalid_input";
    }
    return "unknown";
}

std::string_view to_string(ProviderError::Kind kind) {
    switch (kind) {
    case ProviderError::Kind::transport: return "transport";
    case ProviderError::Kind::provider: return "provider";
    case ProviderError::Kind::timeout: return "timeout";
    }
    return "transport";
}

ProviderError::Kind provider_error_kind_from_string(std::string_view s) {
    if (s == "transport") return ProviderError::Kind::transport;
    if (s == "provider") return ProviderError::Kind::provider;
    if (s == "timeout") return ProviderError::Kind::timeout;
    throw Error(ErrorCode::invalid_input, "unknown provider failure kind '" + std::string(s) + "'");
}

}  // namespace patientsim
