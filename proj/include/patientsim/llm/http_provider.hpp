#pragma once

#include <chrono>
#include <string>

#include "patientsim/llm/provider.hpp"

namespace patientsim::llm {

// OpenAI-compatible chat-completions client. The rendered prompt is sent as a
// single user message; json_mode maps to response_format json_object.
class HttpProvider final : public Provider {
public:
    // api_base: scheme://host[:port][/prefix]. "/v1/chat/completions" is
    // appended, or "/chat/completions" when the prefix already ends in /v1.
    HttpProvider(std::string api_base, std::string api_key, std::chrono::seconds timeout);

    std::string complete(const CompletionRequest& request) override;

    const std::string& endpoint_path() const noexcept { return path_; }

private:
    std::string origin_;
    std::string path_;
    std::string api_key_;
    std::chrono::seconds timeout_;
};

}  // namespace patientsim::llm
