#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace patientsim {

enum class ErrorCode {
    validation,
    not_found,
    conflict,
    render,
    provider,
    extraction,
    script_mismatch,
    upstream,
    undefined_agreement,
    invalid_input,
};

std::string_view to_string(ErrorCode code);

// Base for every error raised by the library. The code drives HTTP status
// mapping and CLI exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message)
        : Error(ErrorCode::validation, message) {}
};

class NotFoundError : public Error {
public:
    explicit NotFoundError(const std::string& message)
        : Error(ErrorCode::not_found, message) {}
};

class ConflictError : public Error {
public:
    explicit ConflictError(const std::string& message)
        : Error(ErrorCode::conflict, message) {}
};

class RenderError : public Error {
public:
    RenderError(std::string slot, const std::string& message)
        : Error(ErrorCode::render, message), slot_(std::move(slot)) {}

    const std::string& slot() const noexcept { return slot_; }

private:
    std::string slot_;
};

class ProviderError : public Error {
public:
    enum class Kind { transport, provider, timeout };

    ProviderError(Kind kind, const std::string& message)
        : Error(ErrorCode::provider, message), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

std::string_view to_string(ProviderError::Kind kind);
ProviderError::Kind provider_error_kind_from_string(std::string_view s);

// Payload could not be parsed, lacked an expected field, or failed a
// structural check. Carries the raw provider text of the last attempt.
class ExtractionError : public Error {
public:
    ExtractionError(const std::string& message, std::string raw_text)
        : Error(ErrorCode::extraction, message), raw_text_(std::move(raw_text)) {}

    const std::string& raw_text() const noexcept { return raw_text_; }

private:
    std::string raw_text_;
};

// A scripted provider received a request none of its exchanges match.
// Never retried and never degraded into a fallback response.
class ScriptMismatchError : public Error {
public:
    explicit ScriptMismatchError(const std::string& message)
        : Error(ErrorCode::script_mismatch, message) {}
};

// A generation or elicitation failed after retries inside a service call.
class UpstreamError : public Error {
public:
    UpstreamError(const std::string& message, std::string trace_id)
        : Error(ErrorCode::upstream, message), trace_id_(std::move(trace_id)) {}

    const std::string& trace_id() const noexcept { return trace_id_; }

private:
    std::string trace_id_;
};

// Agreement cannot be computed: too few annotators or no item rated twice.
class UndefinedAgreementError : public Error {
public:
    explicit UndefinedAgreementError(const std::string& message)
        : Error(ErrorCode::undefined_agreement, message) {}
};

}  // namespace patientsim
