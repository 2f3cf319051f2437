#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "patientsim/core/types.hpp"
#include "patientsim/error.hpp"
#include "patientsim/llm/config.hpp"
#include "patientsim/llm/gateway.hpp"

namespace patientsim::simulator {

struct GenerationContext {
    PersonaScenario scenario;
    Constitution constitution;
    std::vector<DialogueTurn> history;  // excludes counselor_message
    std::string counselor_message;

    void validate() const;
};

struct QuestionSet {
    std::vector<PrincipleQuestion> rewritten_questions;
    std::vector<PrincipleQuestion> extra_questions;
    std::vector<std::string> extra_justifications;

    // Up to two general plus two response-specific criteria.
    static constexpr std::size_t kMaxExtraQuestions = 4;

    bool operator==(const QuestionSet&) const = default;
};

enum class Stage1Mode {
    full,
    no_principle_rewrites,      // principles pass through verbatim, extras kept
    no_autogenerated_criteria,  // rewrites kept, no extras
};

struct Reply {
    std::string text;
    RefinementTrace trace;
};

// Base generation failed after retries; nothing usable to return. The trace
// holds the calls that were made.
class GenerationFailed : public UpstreamError {
public:
    GenerationFailed(const std::string& message, RefinementTrace trace)
        : UpstreamError(message, trace.trace_id), trace_(std::move(trace)) {}

    const RefinementTrace& trace() const noexcept { return trace_; }

private:
    RefinementTrace trace_;
};

// Patient response generation under the five pipeline variants. Stateless
// apart from the id source; safe to share across threads when the provider
// is.
class Simulator {
public:
    Simulator(llm::Gateway& gateway, llm::ModelRouting routing, IdGenerator& ids);

    llm::CompletionRequest base_request(const GenerationContext& ctx) const;
    llm::CompletionRequest stage1_request(const Constitution& constitution, std::string_view counselor_message,
                                          std::string_view candidate, Stage1Mode mode) const;
    llm::CompletionRequest stage2_request(const GenerationContext& ctx, std::string_view candidate,
                                          const QuestionSet& qs) const;
    llm::CompletionRequest naive_request(const GenerationContext& ctx, std::string_view candidate) const;

    std::string generate_base(const GenerationContext& ctx, llm::CallLog& log);

    QuestionSet stage1_questions(const Constitution& constitution, std::string_view counselor_message,
                                 std::string_view candidate, llm::CallLog& log,
                                 Stage1Mode mode = Stage1Mode::full);

    // Verdicts cover the fixed consistency question, then rewritten
    // questions, then extras. The candidate is kept unless some verdict is No.
    RefinementTrace stage2_evaluate_refine(const GenerationContext& ctx, std::string_view candidate,
                                           const QuestionSet& qs, llm::CallLog& log);

    RefinementTrace naive_refine(const GenerationContext& ctx, std::string_view candidate, llm::CallLog& log);

    // Base generation followed by the variant's refinement. Throws
    // GenerationFailed only when base generation fails; refinement failures
    // degrade to the base response with the error recorded in the trace.
    Reply respond(PipelineVariant variant, const GenerationContext& ctx);

    // Refinement of an existing candidate, degrading the same way as respond.
    Reply refine(PipelineVariant variant, const GenerationContext& ctx, const std::string& candidate,
                 llm::CallLog& log, std::string trace_id);

    IdGenerator& ids() noexcept { return ids_; }

private:
    llm::Gateway& gateway_;
    llm::ModelRouting routing_;
    IdGenerator& ids_;
};

// Text placed in the "Instructions for the patient" slot: the scenario,
// followed by the numbered principles when there are any.
std::string patient_instructions(const PersonaScenario& scenario, const Constitution& constitution);

// Best-overlap principle for each rewritten question (word Jaccard, earliest
// principle on ties). Returns principle ids parallel to `questions`.
std::vector<std::string> attribute_questions(const std::vector<std::string>& questions,
                                             const std::vector<Principle>& principles);

inline constexpr std::string_view kNaiveQuestion =
    "Is the patient response appropriate given the principles, persona and conversation history?";

}  // namespace patientsim::simulator
