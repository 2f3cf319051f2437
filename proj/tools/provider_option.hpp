#pragma once

// Shared --provider handling for the command-line tools:
//   scripted:FIXTURE   replay a JSON fixture
//   live               OpenAI-compatible endpoint from --config and env

#include <memory>
#include <optional>
#include <string>

#include "patientsim/error.hpp"
#include "patientsim/llm/config.hpp"
#include "patientsim/llm/http_provider.hpp"
#include "patientsim/llm/scripted_provider.hpp"

namespace patientsim::tools {

inline std::unique_ptr<llm::Provider> make_provider(const std::string& spec, const llm::ProviderConfig& config) {
    constexpr std::string_view scripted = "scripted:";
    if (spec.rfind(scripted, 0) == 0) {
        auto fixture = spec.substr(scripted.size());
        if (fixture.empty()) throw ValidationError("scripted provider needs a fixture path");
        return std::make_unique<llm::ScriptedProvider>(llm::ScriptedProvider::from_file(fixture));
    }
    if (spec == "live") {
        if (config.api_key.empty()) {
            throw ValidationError("live provider needs an API key (PATIENTSIM_API_KEY or config api_key)");
        }
        return std::make_unique<llm::HttpProvider>(config.api_base, config.api_key, config.timeout);
    }
    throw ValidationError("--provider must be scripted:FIXTURE or live");
}

// Bad arguments or unreadable inputs exit 3; everything else uses the tool's own code.
inline int exit_code_for(const std::exception& e, int otherwise) {
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        if (err->code() == ErrorCode::validation || err->code() == ErrorCode::invalid_input) return 3;
    }
    return otherwise;
}

}  // namespace patientsim::tools
