#pragma once

#include <array>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "patientsim/core/types.hpp"

namespace patientsim::llm {

// Which pipeline step a provider call serves; selects model and temperature.
enum class CallRole { kudos, critique, rewrite, simulator, stage1, stage2, naive };

inline constexpr std::array<CallRole, 7> kAllCallRoles = {
    CallRole::kudos, CallRole::critique, CallRole::rewrite, CallRole::simulator,
    CallRole::stage1, CallRole::stage2, CallRole::naive};

std::string_view to_string(CallRole role);
CallRole parse_call_role(std::string_view s);

class ModelRouting {
public:
    // kudos/critique: gpt-3.5-turbo-1106 @ 0.1
    // rewrite:        gpt-4-turbo-1106   @ 0.1
    // simulator:      gpt-4-turbo-1106   @ 0.3
    // stage1/stage2/naive: gpt-4-turbo-1106 @ 0.7, JSON mode
    static ModelRouting defaults();

    const GenerationSettings& settings(CallRole role) const;
    void set(CallRole role, GenerationSettings settings);

private:
    std::map<CallRole, GenerationSettings> settings_;
};

struct ProviderConfig {
    std::string api_base = "https://api.openai.com";
    std::string api_key;
    std::chrono::seconds timeout{60};
    ModelRouting routing = ModelRouting::defaults();
};

// Reads an optional JSON config file, then applies environment overrides:
//   PATIENTSIM_API_BASE, PATIENTSIM_API_KEY (falls back to OPENAI_API_KEY),
//   PATIENTSIM_TIMEOUT_SECONDS, PATIENTSIM_MODEL_<ROLE>,
//   PATIENTSIM_TEMPERATURE_<ROLE>   (ROLE = KUDOS, CRITIQUE, ..., NAIVE)
//
// File shape:
//   {"api_base": "...", "api_key": "...", "timeout_seconds": 60,
//    "roles": {"stage1": {"model_id": "...", "temperature": 0.7,
//                         "json_mode": true, "max_output_tokens": 1024}}}
// Role entries may set any subset of fields.
ProviderConfig load_provider_config(const std::optional<std::filesystem::path>& file);

// Same as above with an injectable environment lookup, for tests.
using EnvLookup = std::function<std::optional<std::string>(const std::string& name)>;
ProviderConfig load_provider_config(const std::optional<std::filesystem::path>& file, EnvLookup env);

}  // namespace patientsim::llm
