#include "patientsim/llm/scripted_provider.hpp"

#include <fstream>

#include <fmt/format.h>

namespace patientsim::llm {

bool ScriptMatcher::matches(const CompletionRequest& request, const std::string& request_hash) const {
    if (template_name && *template_name != request.template_name) return false;
    if (prompt_hash && *prompt_hash != request_hash) return false;
    for (const auto& [slot, needle] : slot_filters) {
        auto it = request.bindings.find(slot);
        if (it == request.bindings.end() || it->second.find(needle) == std::string::npos) return false;
    }
    return true;
}

ScriptedProvider::ScriptedProvider(std::vector<ProviderExchange> exchanges)
    : exchanges_(std::move(exchanges)), consumed_(exchanges_.size(), false) {}

void ScriptedProvider::add(ProviderExchange exchange) {
    std::lock_guard lock(mu_);
    exchanges_.push_back(std::move(exchange));
    consumed_.push_back(false);
}

ScriptedProvider::ScriptedProvider(ScriptedProvider&& other) noexcept {
    std::lock_guard lock(other.mu_);
    exchanges_ = std::move(other.exchanges_);
    consumed_ = std::move(other.consumed_);
    served_ = other.served_;
}

ScriptedProvider ScriptedProvider::from_json(const nlohmann::json& fixture) {
    if (!fixture.is_array()) {
        throw Error(ErrorCode::invalid_input, "scripted fixture must be a JSON array");
    }
    std::vector<ProviderExchange> exchanges;
    for (const auto& entry : fixture) {
        ProviderExchange ex;
        if (auto m = entry.find("match"); m != entry.end()) {
            if (m->contains("template")) ex.match.template_name = m->at("template").get<std::string>();
            if (m->contains("prompt_hash")) ex.match.prompt_hash = m->at("prompt_hash").get<std::string>();
            if (m->contains("slot_filters")) {
                ex.match.slot_filters = m->at("slot_filters").get<std::map<std::string, std::string>>();
            }
        }
        if (entry.contains("response")) ex.response = entry.at("response").get<std::string>();
        if (entry.contains("fail")) {
            ex.failure = provider_error_kind_from_string(entry.at("fail").get<std::string>());
        }
        if (ex.response.has_value() == ex.failure.has_value()) {
            throw Error(ErrorCode::invalid_input,
                        "each scripted exchange needs exactly one of \"response\" or \"fail\"");
        }
        ex.consume_once = entry.value("consume_once", false);
        exchanges.push_back(std::move(ex));
    }
    return ScriptedProvider(std::move(exchanges));
}

ScriptedProvider ScriptedProvider::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::invalid_input, fmt::format("cannot open fixture {}", path.string()));
    auto parsed = nlohmann::json::parse(in, nullptr, false);
    if (parsed.is_discarded()) {
        throw Error(ErrorCode::invalid_input, fmt::format("fixture {} is not valid JSON", path.string()));
    }
    return from_json(parsed);
}

std::string ScriptedProvider::complete(const CompletionRequest& request) {
    auto hash = prompt_hash(request.prompt);
    std::lock_guard lock(mu_);
    for (std::size_t i = 0; i < exchanges_.size(); ++i) {
        if (consumed_[i] || !exchanges_[i].match.matches(request, hash)) continue;
        const auto& ex = exchanges_[i];
        if (ex.consume_once) consumed_[i] = true;
        ++served_;
        if (ex.failure) {
            throw ProviderError(*ex.failure,
                                fmt::format("scripted {} failure for '{}'", to_string(*ex.failure),
                                            request.template_name));
        }
        return *ex.response;
    }
    throw ScriptMismatchError(fmt::format("no scripted exchange matches template '{}' (prompt hash {})",
                                          request.template_name, hash));
}

std::size_t ScriptedProvider::calls_served() const {
    std::lock_guard lock(mu_);
    return served_;
}

std::size_t ScriptedProvider::unconsumed_once() const {
    std::lock_guard lock(mu_);
    std::size_t n = 0;
    for (std::size_t i = 0; i < exchanges_.size(); ++i) {
        if (exchanges_[i].consume_once && !consumed_[i]) ++n;
    }
    return n;
}

ProviderExchange reply_to(std::string_view template_name, std::string response, bool consume_once) {
    ProviderExchange ex;
    ex.match.template_name = std::string(template_name);
    ex.response = std::move(response);
    ex.consume_once = consume_once;
    return ex;
}

ProviderExchange fail_on(std::string_view template_name, ProviderError::Kind kind, bool consume_once) {
    ProviderExchange ex;
    ex.match.template_name = std::string(template_name);
    ex.failure = kind;
    ex.consume_once = consume_once;
    return ex;
}

}  // namespace patientsim::llm
