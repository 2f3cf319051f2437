#include "patientsim/llm/http_provider.hpp"

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "patientsim/error.hpp"

namespace patientsim::llm {

HttpProvider::HttpProvider(std::string api_base, std::string api_key, std::chrono::seconds timeout)
    : api_key_(std::move(api_key)), timeout_(timeout) {
    while (!api_base.empty() && api_base.back() == '/') api_base.pop_back();
    auto scheme = api_base.find("://");
    if (scheme == std::string::npos) {
        throw Error(ErrorCode::invalid_input, fmt::format("api base '{}' lacks a scheme", api_base));
    }
    auto slash = api_base.find('/', scheme + 3);
    origin_ = api_base.substr(0, slash);
    std::string prefix = slash == std::string::npos ? "" : api_base.substr(slash);
    path_ = prefix.ends_with("/v1") ? prefix + "/chat/completions" : prefix + "/v1/chat/completions";
}

std::string HttpProvider::complete(const CompletionRequest& request) {
    nlohmann::json body = {
        {"model", request.settings.model_id},
        {"temperature", request.settings.temperature},
        {"max_tokens", request.settings.max_output_tokens},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
    };
    if (request.settings.json_mode) body["response_format"] = {{"type", "json_object"}};

    httplib::Client client(origin_);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res) {
        auto err = res.error();
        auto kind = (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout)
                        ? ProviderError::Kind::timeout
                        : ProviderError::Kind::transport;
        throw ProviderError(kind, fmt::format("request to {}{} failed: {}", origin_, path_,
                                              httplib::to_string(err)));
    }
    auto parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (res->status >= 400) {
        std::string message = res->body;
        if (!parsed.is_discarded() && parsed.contains("error")) {
            const auto& e = parsed["error"];
            message = e.is_object() ? e.value("message", e.dump()) : e.dump();
        }
        throw ProviderError(ProviderError::Kind::provider,
                            fmt::format("provider returned HTTP {}: {}", res->status, message));
    }
    try {
        return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw ProviderError(ProviderError::Kind::provider,
                            fmt::format("unexpected completion body: {}", res->body.substr(0, 500)));
    }
}

}  // namespace patientsim::llm
