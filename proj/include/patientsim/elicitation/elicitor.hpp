#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "patientsim/core/types.hpp"
#include "patientsim/error.hpp"
#include "patientsim/llm/config.hpp"
#include "patientsim/llm/gateway.hpp"

namespace patientsim::elicitation {

struct ElicitationResult {
    std::string principle_text;
    std::optional<std::string> difference;  // rewrite feedback only
    std::string feedback_id;
    std::string raw_trace_id;

    bool operator==(const ElicitationResult&) const = default;
};

// Provider calls made while eliciting one principle, keyed by raw_trace_id.
struct ElicitationTrace {
    std::string trace_id;
    std::string feedback_id;
    FeedbackKind kind = FeedbackKind::kudos;
    std::vector<CallRecord> calls;
    std::optional<std::string> error;

    bool operator==(const ElicitationTrace&) const = default;
};

struct Elicitation {
    ElicitationResult result;
    ElicitationTrace trace;
};

// Turns one piece of expert feedback into a principle. `window` holds the
// conversation before the target patient turn; it is rendered as the
// Helper/Actor conversation script and the target text goes into its own
// slot. Provider and extraction failures raise ElicitationFailed carrying
// the calls made so far.
class Elicitor {
public:
    Elicitor(llm::Gateway& gateway, llm::ModelRouting routing, IdGenerator& ids);

    Elicitation elicit_from_kudos(std::span<const DialogueTurn> window, std::string_view target_response,
                                  std::string_view rationale, std::string feedback_id = {});
    Elicitation elicit_from_critique(std::span<const DialogueTurn> window, std::string_view target_response,
                                     std::string_view rationale, std::string feedback_id = {});
    Elicitation elicit_from_rewrite(std::span<const DialogueTurn> window, std::string_view original_response,
                                    std::string_view rewrite_text, std::string feedback_id = {});

    // Dispatches on feedback.kind. Uses feedback.target_text as the target.
    Elicitation elicit(const FeedbackItem& feedback, std::span<const DialogueTurn> window);

private:
    Elicitation run(FeedbackKind kind, std::string_view template_name, llm::CallRole role,
                    llm::SlotBindings bindings, std::string feedback_id);

    llm::Gateway& gateway_;
    llm::ModelRouting routing_;
    IdGenerator& ids_;
};

// Raised when the provider could not produce a usable principle. Carries the
// partial trace so callers can store it.
class ElicitationFailed : public Error {
public:
    ElicitationFailed(const std::string& message, ElicitationTrace trace)
        : Error(ErrorCode::upstream, message), trace_(std::move(trace)) {}

    const ElicitationTrace& trace() const noexcept { return trace_; }

private:
    ElicitationTrace trace_;
};

}  // namespace patientsim::elicitation
