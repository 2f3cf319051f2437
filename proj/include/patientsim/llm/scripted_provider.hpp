#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "patientsim/error.hpp"
#include "patientsim/llm/provider.hpp"

namespace patientsim::llm {

struct ScriptMatcher {
    std::optional<std::string> template_name;
    std::optional<std::string> prompt_hash;
    // slot name -> substring the bound value must contain
    std::map<std::string, std::string> slot_filters;

    bool matches(const CompletionRequest& request, const std::string& request_hash) const;
};

// One canned exchange. Exactly one of response / failure is set.
struct ProviderExchange {
    ScriptMatcher match;
    std::optional<std::string> response;
    std::optional<ProviderError::Kind> failure;
    bool consume_once = false;
};

// Deterministic provider for tests and offline runs. Exchanges are tried in
// order; the first live match answers. Requests matching nothing throw
// ScriptMismatchError.
//
// Fixture file format (JSON array):
//   [{"match": {"template": "stage2_evaluate_refine",
//               "prompt_hash": "...",
//               "slot_filters": {"therapist_message": "sleep"}},
//     "response": "...",            // or "fail": "transport|provider|timeout"
//     "consume_once": true}]
class ScriptedProvider final : public Provider {
public:
    ScriptedProvider() = default;
    explicit ScriptedProvider(std::vector<ProviderExchange> exchanges);
    ScriptedProvider(ScriptedProvider&& other) noexcept;

    static ScriptedProvider from_json(const nlohmann::json& fixture);
    static ScriptedProvider from_file(const std::filesystem::path& path);

    void add(ProviderExchange exchange);
    std::string complete(const CompletionRequest& request) override;

    std::size_t calls_served() const;
    std::size_t unconsumed_once() const;

private:
    mutable std::mutex mu_;
    std::vector<ProviderExchange> exchanges_;
    std::vector<bool> consumed_;
    std::size_t served_ = 0;
};

// Convenience constructors for fixtures built in code.
ProviderExchange reply_to(std::string_view template_name, std::string response, bool consume_once = false);
ProviderExchange fail_on(std::string_view template_name, ProviderError::Kind kind, bool consume_once = false);

}  // namespace patientsim::llm
