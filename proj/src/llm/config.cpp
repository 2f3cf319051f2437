#include "patientsim/llm/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "patientsim/error.hpp"

namespace patientsim::llm {

std::string_view to_string(CallRole role) {
    switch (role) {
    case CallRole::kudos: return "kudos";
    case CallRole::critique: return "critique";
    case CallRole::rewrite: return "rewrite";
    case CallRole::simulator: return "simulator";
    case CallRole::stage1: return "stage1";
    case CallRole::stage2: return "stage2";
    case CallRole::naive: return "naive";
    }
    return "simulator";
}

CallRole parse_call_role(std::string_view s) {
    for (auto role : kAllCallRoles) {
        if (to_string(role) == s) return role;
    }
    throw Error(ErrorCode::invalid_input, fmt::format("unknown call role '{}'", s));
}

ModelRouting ModelRouting::defaults() {
    ModelRouting r;
    const std::string gpt35 = "gpt-3.5-turbo-1106";
    const std::string gpt4 = "gpt-4-turbo-1106";
    r.set(CallRole::kudos, {gpt35, 0.1, false, 1024});
    r.set(CallRole::critique, {gpt35, 0.1, false, 1024});
    r.set(CallRole::rewrite, {gpt4, 0.1, false, 1024});
    r.set(CallRole::simulator, {gpt4, 0.3, false, 1024});
    r.set(CallRole::stage1, {gpt4, 0.7, true, 1024});
    r.set(CallRole::stage2, {gpt4, 0.7, true, 1024});
    r.set(CallRole::naive, {gpt4, 0.7, true, 1024});
    return r;
}

const GenerationSettings& ModelRouting::settings(CallRole role) const {
    return settings_.at(role);
}

void ModelRouting::set(CallRole role, GenerationSettings settings) {
    settings.validate();
    settings_[role] = std::move(settings);
}

namespace {

std::optional<std::string> process_env(const std::string& name) {
    if (const char* v = std::getenv(name.c_str()); v != nullptr && *v != '\0') return std::string(v);
    return std::nullopt;
}

double parse_double(const std::string& text, const char* what) {
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::invalid_input, fmt::format("{} is not a number: '{}'", what, text));
    }
}

}  // namespace

ProviderConfig load_provider_config(const std::optional<std::filesystem::path>& file) {
    return load_provider_config(file, EnvLookup(process_env));
}

ProviderConfig load_provider_config(const std::optional<std::filesystem::path>& file, EnvLookup env) {
    ProviderConfig cfg;
    if (file) {
        std::ifstream in(*file);
        if (!in) {
            throw Error(ErrorCode::invalid_input, fmt::format("cannot open config {}", file->string()));
        }
        auto j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw Error(ErrorCode::invalid_input, fmt::format("config {} is not a JSON object", file->string()));
        }
        cfg.api_base = j.value("api_base", cfg.api_base);
        cfg.api_key = j.value("api_key", cfg.api_key);
        cfg.timeout = std::chrono::seconds{j.value("timeout_seconds", cfg.timeout.count())};
        if (auto roles = j.find("roles"); roles != j.end()) {
            for (const auto& [name, spec] : roles->items()) {
                auto role = parse_call_role(name);
                auto s = cfg.routing.settings(role);
                s.model_id = spec.value("model_id", s.model_id);
                s.temperature = spec.value("temperature", s.temperature);
                s.json_mode = spec.value("json_mode", s.json_mode);
                s.max_output_tokens = spec.value("max_output_tokens", s.max_output_tokens);
                cfg.routing.set(role, s);
            }
        }
    }
    if (auto v = env("PATIENTSIM_API_BASE")) cfg.api_base = *v;
    if (auto v = env("PATIENTSIM_API_KEY")) {
        cfg.api_key = *v;
    } else if (cfg.api_key.empty()) {
        if (auto k = env("OPENAI_API_KEY")) cfg.api_key = *k;
    }
    if (auto v = env("PATIENTSIM_TIMEOUT_SECONDS")) {
        cfg.timeout = std::chrono::seconds{static_cast<long>(parse_double(*v, "timeout"))};
    }
    for (auto role : kAllCallRoles) {
        std::string suffix(to_string(role));
        std::transform(suffix.begin(), suffix.end(), suffix.begin(),
                       [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
        auto s = cfg.routing.settings(role);
        bool changed = false;
        if (auto v = env("PATIENTSIM_MODEL_" + suffix)) {
            s.model_id = *v;
            changed = true;
        }
        if (auto v = env("PATIENTSIM_TEMPERATURE_" + suffix)) {
            s.temperature = parse_double(*v, "temperature");
            changed = true;
        }
        if (changed) cfg.routing.set(role, s);
    }
    if (cfg.timeout.count() <= 0) throw Error(ErrorCode::invalid_input, "timeout must be positive");
    return cfg;
}

}  // namespace patientsim::llm
