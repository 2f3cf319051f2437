#include "patientsim/core/json.hpp"

#include <fmt/format.h>

#include "patientsim/error.hpp"

namespace patientsim {

namespace {

template <class E, std::size_t N>
E enum_from(const json& j, const std::array<E, N>& values, const char* type_name) {
    const auto& s = j.get_ref<const std::string&>();
    for (auto v : values) {
        if (to_string(v) == s) return v;
    }
    throw ValidationError(fmt::format("unknown {} '{}'", type_name, s));
}

constexpr std::array kOrigins = {PrincipleOrigin::manual, PrincipleOrigin::kudos,
                                 PrincipleOrigin::critique, PrincipleOrigin::rewrite};
constexpr std::array kRoles = {Role::counselor, Role::patient};
constexpr std::array kKinds = {FeedbackKind::kudos, FeedbackKind::critique, FeedbackKind::rewrite};
constexpr std::array kSources = {QuestionSource::rewritten, QuestionSource::autogenerated,
                                 QuestionSource::fixed_context_consistency,
                                 QuestionSource::naive_overall};
constexpr std::array kAnswers = {Answer::yes, Answer::no, Answer::na};

}  // namespace

void to_json(json& j, PrincipleOrigin v) { j = std::string(to_string(v)); }
void from_json(const json& j, PrincipleOrigin& v) { v = enum_from(j, kOrigins, "principle origin"); }
void to_json(json& j, Role v) { j = std::string(to_string(v)); }
void from_json(const json& j, Role& v) { v = enum_from(j, kRoles, "role"); }
void to_json(json& j, FeedbackKind v) { j = std::string(to_string(v)); }
void from_json(const json& j, FeedbackKind& v) { v = enum_from(j, kKinds, "feedback kind"); }
void to_json(json& j, QuestionSource v) { j = std::string(to_string(v)); }
void from_json(const json& j, QuestionSource& v) { v = enum_from(j, kSources, "question source"); }
void to_json(json& j, Answer v) { j = std::string(to_string(v)); }
void from_json(const json& j, Answer& v) { v = enum_from(j, kAnswers, "answer"); }
void to_json(json& j, PipelineVariant v) { j = std::string(to_string(v)); }
void from_json(const json& j, PipelineVariant& v) { v = enum_from(j, kAllVariants, "pipeline variant"); }

void to_json(json& j, const PersonaScenario& v) {
    j = json{{"id", v.id},
             {"title", v.title},
             {"scenario_text", v.scenario_text},
             {"creator_id", v.creator_id},
             {"created_at", jsonio::timestamp(v.created_at)}};
}

void from_json(const json& j, PersonaScenario& v) {
    v.id = jsonio::get_or<std::string>(j, "id", "");
    v.title = jsonio::get_or<std::string>(j, "title", "");
    v.scenario_text = j.at("scenario_text").get<std::string>();
    v.creator_id = jsonio::get_or<std::string>(j, "creator_id", "");
    v.created_at = jsonio::timestamp(j, "created_at");
}

void to_json(json& j, const Principle& v) {
    j = json{{"id", v.id},
             {"text", v.text},
             {"origin", v.origin},
             {"edited", v.edited},
             {"created_at", jsonio::timestamp(v.created_at)}};
    jsonio::put(j, "source_feedback_id", v.source_feedback_id);
}

void from_json(const json& j, Principle& v) {
    v.id = j.at("id").get<std::string>();
    v.text = j.at("text").get<std::string>();
    v.origin = jsonio::get_or(j, "origin", PrincipleOrigin::manual);
    v.source_feedback_id = jsonio::get_optional<std::string>(j, "source_feedback_id");
    v.edited = jsonio::get_or(j, "edited", false);
    v.created_at = jsonio::timestamp(j, "created_at");
}

void to_json(json& j, const Constitution& v) {
    j = json{{"version", v.version}, {"principles", v.principles}};
}

void from_json(const json& j, Constitution& v) {
    v.version = j.at("version").get<std::int64_t>();
    v.principles = j.at("principles").get<std::vector<Principle>>();
}

void to_json(json& j, const DialogueTurn& v) {
    j = json{{"turn_index", v.turn_index}, {"role", v.role}, {"text", v.text}};
    jsonio::put(j, "constitution_version", v.constitution_version);
    jsonio::put(j, "trace_id", v.trace_id);
}

void from_json(const json& j, DialogueTurn& v) {
    v.turn_index = j.at("turn_index").get<int>();
    v.role = j.at("role").get<Role>();
    v.text = j.at("text").get<std::string>();
    v.constitution_version = jsonio::get_optional<std::int64_t>(j, "constitution_version");
    v.trace_id = jsonio::get_optional<std::string>(j, "trace_id");
}

void to_json(json& j, const FeedbackItem& v) {
    j = json{{"id", v.id}, {"kind", v.kind}, {"target_turn_index", v.target_turn_index}};
    jsonio::put(j, "rationale", v.rationale);
    jsonio::put(j, "rewrite_text", v.rewrite_text);
    jsonio::put(j, "converted_principle_id", v.converted_principle_id);
    jsonio::put(j, "target_text", v.target_text);
}

void from_json(const json& j, FeedbackItem& v) {
    v.id = jsonio::get_or<std::string>(j, "id", "");
    v.kind = j.at("kind").get<FeedbackKind>();
    v.target_turn_index = j.at("target_turn_index").get<int>();
    v.rationale = jsonio::get_optional<std::string>(j, "rationale");
    v.rewrite_text = jsonio::get_optional<std::string>(j, "rewrite_text");
    v.converted_principle_id = jsonio::get_optional<std::string>(j, "converted_principle_id");
    v.target_text = jsonio::get_optional<std::string>(j, "target_text");
}

void to_json(json& j, const PrincipleQuestion& v) {
    j = json{{"text", v.text}, {"source", v.source}};
    jsonio::put(j, "source_principle_id", v.source_principle_id);
}

void from_json(const json& j, PrincipleQuestion& v) {
    v.text = j.at("text").get<std::string>();
    v.source = j.at("source").get<QuestionSource>();
    v.source_principle_id = jsonio::get_optional<std::string>(j, "source_principle_id");
}

void to_json(json& j, const Verdict& v) {
    j = json{{"answer", v.answer}, {"justification", v.justification}};
}

void from_json(const json& j, Verdict& v) {
    v.answer = j.at("answer").get<Answer>();
    v.justification = jsonio::get_or<std::string>(j, "justification", "");
}

void to_json(json& j, const GenerationSettings& v) {
    j = json{{"model_id", v.model_id},
             {"temperature", v.temperature},
             {"json_mode", v.json_mode},
             {"max_output_tokens", v.max_output_tokens}};
}

void from_json(const json& j, GenerationSettings& v) {
    v.model_id = j.at("model_id").get<std::string>();
    v.temperature = j.at("temperature").get<double>();
    v.json_mode = jsonio::get_or(j, "json_mode", false);
    v.max_output_tokens = jsonio::get_or(j, "max_output_tokens", 1024);
}

void to_json(json& j, const CallRecord& v) {
    j = json{{"template_name", v.template_name},
             {"prompt_hash", v.prompt_hash},
             {"prompt", v.prompt},
             {"settings", v.settings},
             {"response", v.response},
             {"latency_ms", v.latency_ms},
             {"attempt", v.attempt}};
    jsonio::put(j, "error", v.error);
}

void from_json(const json& j, CallRecord& v) {
    v.template_name = j.at("template_name").get<std::string>();
    v.prompt_hash = j.at("prompt_hash").get<std::string>();
    v.prompt = j.at("prompt").get<std::string>();
    v.settings = j.at("settings").get<GenerationSettings>();
    v.response = j.at("response").get<std::string>();
    v.latency_ms = j.at("latency_ms").get<std::int64_t>();
    v.attempt = j.at("attempt").get<int>();
    v.error = jsonio::get_optional<std::string>(j, "error");
}

void to_json(json& j, const RefinementTrace& v) {
    j = json{{"trace_id", v.trace_id},
             {"variant", v.variant},
             {"initial_response", v.initial_response},
             {"questions", v.questions},
             {"verdicts", v.verdicts},
             {"extra_justifications", v.extra_justifications},
             {"final_response", v.final_response},
             {"rewritten", v.rewritten},
             {"reasoning", v.reasoning},
             {"calls", v.calls}};
    jsonio::put(j, "error", v.error);
}

void from_json(const json& j, RefinementTrace& v) {
    v.trace_id = j.at("trace_id").get<std::string>();
    v.variant = j.at("variant").get<PipelineVariant>();
    v.initial_response = j.at("initial_response").get<std::string>();
    v.questions = j.at("questions").get<std::vector<PrincipleQuestion>>();
    v.verdicts = j.at("verdicts").get<std::vector<Verdict>>();
    v.extra_justifications =
        jsonio::get_or(j, "extra_justifications", std::vector<std::string>{});
    v.final_response = j.at("final_response").get<std::string>();
    v.rewritten = j.at("rewritten").get<bool>();
    v.reasoning = jsonio::get_or<std::string>(j, "reasoning", "");
    v.error = jsonio::get_optional<std::string>(j, "error");
    v.calls = jsonio::get_or(j, "calls", std::vector<CallRecord>{});
}

}  // namespace patientsim
