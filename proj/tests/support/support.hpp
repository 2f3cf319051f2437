#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "patientsim/core/ids.hpp"
#include "patientsim/core/types.hpp"
#include "patientsim/elicitation/elicitor.hpp"
#include "patientsim/llm/config.hpp"
#include "patientsim/llm/gateway.hpp"
#include "patientsim/llm/provider.hpp"
#include "patientsim/simulator/simulator.hpp"

namespace patientsim::fixtures {

using nlohmann::json;

// Provider answering through a callback; records the template of every call.
class CallbackProvider final : public llm::Provider {
public:
    using Fn = std::function<std::string(const llm::CompletionRequest&)>;

    explicit CallbackProvider(Fn fn) : fn_(std::move(fn)) {}

    std::string complete(const llm::CompletionRequest& request) override {
        {
            std::lock_guard lock(mu_);
            templates_.push_back(request.template_name);
        }
        return fn_(request);
    }

    std::vector<std::string> templates() const {
        std::lock_guard lock(mu_);
        return templates_;
    }

private:
    Fn fn_;
    mutable std::mutex mu_;
    std::vector<std::string> templates_;
};

// Clock, ids, gateway, simulator and elicitor wired to one provider.
struct Stack {
    explicit Stack(llm::Provider& provider, std::uint64_t seed = 42);

    ManualClock clock;
    IdGenerator ids;
    llm::Gateway gateway;
    simulator::Simulator simulator;
    elicitation::Elicitor elicitor;
};

std::filesystem::path data_dir();  // tests/ in the source tree
std::string read_file(const std::filesystem::path& path);
json read_json(const std::filesystem::path& path);

// Four-turn helper/actor exchange used by the one-shot elicitation examples.
std::vector<DialogueTurn> exemplar_window();
extern const char* const kExemplarKudosResponse;    // desirable actor reply
extern const char* const kExemplarCritiqueResponse; // undesirable actor reply
extern const char* const kExemplarRewrite;
extern const char* const kExemplarKudosRationale;
extern const char* const kExemplarCritiqueRationale;
extern const char* const kHesitancyPrinciple;
extern const char* const kExemplarDifference;
// Provider outputs exactly as the one-shot examples show them.
extern const char* const kExemplarPrincipleOutput;
extern const char* const kExemplarRewriteOutput;

PersonaScenario lonely_scenario();
std::vector<std::string> lonely_principles();  // four principles
Constitution constitution_of(const std::vector<std::string>& texts, std::int64_t version = 1);
simulator::GenerationContext sample_context(std::size_t n_principles = 2);

std::string stage1_output(const std::vector<std::string>& questions, const std::vector<std::string>& extras,
                          const std::vector<std::string>& justifications = {});
// One justification per answer is generated.
std::string stage2_output(const std::vector<std::string>& answers, const std::string& response,
                          const std::string& reasoning = "Fits the criteria better.");
std::string naive_output(const std::string& evaluation, const std::string& response);

// Number of questions stage 2 will be asked about, parsed from its prompt.
std::size_t stage2_question_count(const std::string& prompt);

// Answers every built-in template with a well-formed payload. The base
// generation is kCooperativeBase; refinement marks the last question No and
// rewrites to kCooperativeRefined. Elicitation returns the hesitancy principle.
extern const char* const kCooperativeBase;
extern const char* const kCooperativeRefined;
std::string cooperative_reply(const llm::CompletionRequest& request);

}  // namespace patientsim::fixtures
