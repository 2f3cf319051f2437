#include "patientsim/elicitation/elicitor.hpp"

#include <fmt/format.h>

#include "patientsim/core/transcript.hpp"
#include "patientsim/error.hpp"
#include "patientsim/llm/templates.hpp"

namespace patientsim::elicitation {

namespace {

void require_text(std::string_view value, std::string_view what) {
    if (is_blank(value)) throw ValidationError(fmt::format("{} must not be empty", what));
}

void require_string_field(const llm::json& result, const char* field) {
    const auto& v = result.at(field);
    if (!v.is_string() || is_blank(v.get_ref<const std::string&>())) {
        throw ValidationError(fmt::format("field '{}' must be a non-empty string", field));
    }
}

}  // namespace

Elicitor::Elicitor(llm::Gateway& gateway, llm::ModelRouting routing, IdGenerator& ids)
    : gateway_(gateway), routing_(std::move(routing)), ids_(ids) {}

Elicitation Elicitor::run(FeedbackKind kind, std::string_view template_name, llm::CallRole role,
                          llm::SlotBindings bindings, std::string feedback_id) {
    Elicitation out;
    out.trace.trace_id = ids_.next();
    out.trace.feedback_id = feedback_id;
    out.trace.kind = kind;

    const bool rewrite = kind == FeedbackKind::rewrite;
    std::vector<std::string> fields{"principle"};
    if (rewrite) fields.emplace_back("difference");

    auto request = gateway_.make_request(template_name, std::move(bindings), routing_.settings(role));
    llm::CallLog log;
    llm::json payload;
    try {
        payload = gateway_.complete_payload(request, fields, log, [&](const llm::json& r) {
            require_string_field(r, "principle");
            if (rewrite) require_string_field(r, "difference");
        });
    } catch (const ProviderError& e) {
        out.trace.calls = log.records();
        out.trace.error = e.what();
        throw ElicitationFailed(e.what(), std::move(out.trace));
    } catch (const ExtractionError& e) {
        out.trace.calls = log.records();
        out.trace.error = e.what();
        throw ElicitationFailed(e.what(), std::move(out.trace));
    }
    out.trace.calls = log.records();
    out.result.principle_text = trim(payload.at("principle").get<std::string>());
    if (rewrite) out.result.difference = trim(payload.at("difference").get<std::string>());
    out.result.feedback_id = std::move(feedback_id);
    out.result.raw_trace_id = out.trace.trace_id;
    return out;
}

Elicitation Elicitor::elicit_from_kudos(std::span<const DialogueTurn> window, std::string_view target_response,
                                        std::string_view rationale, std::string feedback_id) {
    require_text(rationale, "kudos rationale");
    require_text(target_response, "target response");
    return run(FeedbackKind::kudos, llm::kElicitKudos, llm::CallRole::kudos,
               {{"conversation_script", render_script(window, kElicitationLabels)},
                {"actors_response", std::string(target_response)},
                {"kudos_rationale", std::string(rationale)}},
               std::move(feedback_id));
}

Elicitation Elicitor::elicit_from_critique(std::span<const DialogueTurn> window,
                                           std::string_view target_response, std::string_view rationale,
                                           std::string feedback_id) {
    require_text(rationale, "critique rationale");
    require_text(target_response, "target response");
    return run(FeedbackKind::critique, llm::kElicitCritique, llm::CallRole::critique,
               {{"conversation_script", render_script(window, kElicitationLabels)},
                {"actors_response", std::string(target_response)},
                {"critique_rationale", std::string(rationale)}},
               std::move(feedback_id));
}

Elicitation Elicitor::elicit_from_rewrite(std::span<const DialogueTurn> window,
                                          std::string_view original_response, std::string_view rewrite_text,
                                          std::string feedback_id) {
    require_text(rewrite_text, "rewrite text");
    require_text(original_response, "original response");
    if (trim(rewrite_text) == trim(original_response)) {
        throw ValidationError("rewrite text is identical to the original response");
    }
    return run(FeedbackKind::rewrite, llm::kElicitRewrite, llm::CallRole::rewrite,
               {{"conversation_script", render_script(window, kElicitationLabels)},
                {"actors_response", std::string(original_response)},
                {"rewrite", std::string(rewrite_text)}},
               std::move(feedback_id));
}

Elicitation Elicitor::elicit(const FeedbackItem& feedback, std::span<const DialogueTurn> window) {
    feedback.validate();
    if (!feedback.target_text) throw ValidationError("feedback has no target text");
    const auto& target = *feedback.target_text;
    switch (feedback.kind) {
    case FeedbackKind::kudos:
        return elicit_from_kudos(window, target, feedback.rationale.value_or(""), feedback.id);
    case FeedbackKind::critique:
        return elicit_from_critique(window, target, feedback.rationale.value_or(""), feedback.id);
    case FeedbackKind::rewrite:
        return elicit_from_rewrite(window, target, feedback.rewrite_text.value_or(""), feedback.id);
    }
    throw ValidationError("unknown feedback kind");
}

}  // namespace patientsim::elicitation
