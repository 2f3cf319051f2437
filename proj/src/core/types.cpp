#include "patientsim/core/types.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

#include "patientsim/error.hpp"

namespace patientsim {

std::string trim(std::string_view s) {
    auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    auto begin = std::find_if_not(s.begin(), s.end(), is_space);
    auto end = std::find_if_not(s.rbegin(), std::string_view::reverse_iterator(begin), is_space).base();
    return std::string(begin, end);
}

bool is_blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; });
}

void PersonaScenario::validate() const {
    if (is_blank(scenario_text)) throw ValidationError("scenario_text must not be empty");
    if (title.size() > kMaxTitleLength) {
        throw ValidationError(fmt::format("title exceeds {} characters", kMaxTitleLength));
    }
}

void Principle::validate() const {
    if (is_blank(text)) throw ValidationError("principle text must not be empty");
    if (origin == PrincipleOrigin::manual && source_feedback_id) {
        throw ValidationError("manual principle must not reference feedback");
    }
    if (origin != PrincipleOrigin::manual && !source_feedback_id) {
        throw ValidationError(
            fmt::format("{} principle must reference its source feedback", to_string(origin)));
    }
}

const Principle* Constitution::find(std::string_view principle_id) const {
    auto it = std::find_if(principles.begin(), principles.end(),
                           [&](const Principle& p) { return p.id == principle_id; });
    return it == principles.end() ? nullptr : &*it;
}

void DialogueTurn::validate() const {
    if (is_blank(text)) throw ValidationError("turn text must not be empty");
    if (turn_index < 0) throw ValidationError("turn_index must be non-negative");
    if (role == Role::counselor && constitution_version) {
        throw ValidationError("counselor turns carry no constitution version");
    }
}

void validate_transcript(const std::vector<DialogueTurn>& turns, bool live) {
    for (std::size_t i = 0; i < turns.size(); ++i) {
        turns[i].validate();
        if (i > 0 && turns[i].turn_index <= turns[i - 1].turn_index) {
            throw ValidationError("turn_index must strictly increase");
        }
        if (live) {
            Role expected = (i % 2 == 0) ? Role::counselor : Role::patient;
            if (turns[i].role != expected) {
                throw ValidationError("live transcripts alternate roles starting with counselor");
            }
        }
    }
}

void FeedbackItem::validate() const {
    switch (kind) {
    case FeedbackKind::rewrite:
        if (!rewrite_text || is_blank(*rewrite_text)) {
            throw ValidationError("rewrite feedback requires rewrite_text");
        }
        break;
    case FeedbackKind::kudos:
    case FeedbackKind::critique:
        if (!rationale || is_blank(*rationale)) {
            throw ValidationError(fmt::format("{} feedback requires a rationale", to_string(kind)));
        }
        break;
    }
    if (target_turn_index < 0) throw ValidationError("target_turn_index must be non-negative");
}

PrincipleOrigin origin_for(FeedbackKind kind) {
    switch (kind) {
    case FeedbackKind::kudos: return PrincipleOrigin::kudos;
    case FeedbackKind::critique: return PrincipleOrigin::critique;
    case FeedbackKind::rewrite: return PrincipleOrigin::rewrite;
    }
    return PrincipleOrigin::manual;
}

void PrincipleQuestion::validate() const {
    if (is_blank(text)) throw ValidationError("question text must not be empty");
    if (source == QuestionSource::rewritten && !source_principle_id) {
        throw ValidationError("rewritten question must carry its source principle id");
    }
    if (source == QuestionSource::autogenerated && source_principle_id) {
        throw ValidationError("autogenerated question must not carry a principle id");
    }
}

std::optional<Answer> parse_answer(std::string_view text) {
    std::string s = trim(text);
    while (!s.empty() && (s.back() == '.' || s.back() == '!')) s.pop_back();
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "yes") return Answer::yes;
    if (s == "no") return Answer::no;
    if (s == "n/a" || s == "na" || s == "n.a" || s == "not applicable") return Answer::na;
    return std::nullopt;
}

void Verdict::validate() const {
    if (answer != Answer::na && is_blank(justification)) {
        throw ValidationError("justification may only be empty for N/A verdicts");
    }
}

std::string_view to_string(PipelineVariant v) {
    switch (v) {
    case PipelineVariant::full: return "Full";
    case PipelineVariant::naive: return "Naive";
    case PipelineVariant::no_principle_rewrites: return "NoPrincipleRewrites";
    case PipelineVariant::no_autogenerated_criteria: return "NoAutogeneratedCriteria";
    case PipelineVariant::no_critique: return "NoCritique";
    }
    return "Full";
}

PipelineVariant parse_variant(std::string_view s) {
    std::string key;
    for (char c : s) {
        if (c == '_' || c == '-' || c == ' ') continue;
        key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    for (auto v : kAllVariants) {
        std::string name;
        for (char c : to_string(v)) name.push_back(static_cast<char>(std::tolower(c)));
        if (name == key) return v;
    }
    throw ValidationError(fmt::format("unknown pipeline variant '{}'", s));
}

std::vector<PipelineVariant> parse_variant_list(std::string_view comma_separated) {
    std::vector<PipelineVariant> out;
    std::size_t start = 0;
    while (start <= comma_separated.size()) {
        auto end = comma_separated.find(',', start);
        if (end == std::string_view::npos) end = comma_separated.size();
        auto item = trim(comma_separated.substr(start, end - start));
        if (!item.empty()) {
            auto v = parse_variant(item);
            if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
        }
        start = end + 1;
    }
    if (out.empty()) throw ValidationError("variant list is empty");
    return out;
}

void GenerationSettings::validate() const {
    if (is_blank(model_id)) throw ValidationError("model_id must not be empty");
    if (!(temperature >= 0.0 && temperature <= 2.0)) {
        throw ValidationError(fmt::format("temperature {} outside [0, 2]", temperature));
    }
    if (max_output_tokens <= 0) throw ValidationError("max_output_tokens must be positive");
}

std::string trace_violation(const RefinementTrace& t) {
    if (t.verdicts.size() != t.questions.size()) {
        return fmt::format("{} verdicts for {} questions", t.verdicts.size(), t.questions.size());
    }
    bool any_no = std::any_of(t.verdicts.begin(), t.verdicts.end(),
                              [](const Verdict& v) { return v.answer == Answer::no; });
    if (t.rewritten != any_no) {
        return fmt::format("rewritten={} but any No={}", t.rewritten, any_no);
    }
    if (!t.rewritten && t.final_response != t.initial_response) {
        return "final response differs from initial response without a rewrite";
    }
    if (t.variant == PipelineVariant::no_critique && !t.questions.empty()) {
        return "NoCritique trace carries questions";
    }
    return {};
}

std::string_view to_string(PrincipleOrigin v) {
    switch (v) {
    case PrincipleOrigin::manual: return "manual";
    case PrincipleOrigin::kudos: return "kudos";
    case PrincipleOrigin::critique: return "critique";
    case PrincipleOrigin::rewrite: return "rewrite";
    }
    return "manual";
}

std::string_view to_string(Role v) {
    return v == Role::counselor ? "counselor" : "patient";
}

std::string_view to_string(FeedbackKind v) {
    switch (v) {
    case FeedbackKind::kudos: return "kudos";
    case FeedbackKind::critique: return "critique";
    case FeedbackKind::rewrite: return "rewrite";
    }
    return "kudos";
}

std::string_view to_string(QuestionSource v) {
    switch (v) {
    case QuestionSource::rewritten: return "rewritten";
    case QuestionSource::autogenerated: return "autogenerated";
    case QuestionSource::fixed_context_consistency: return "fixed_context_consistency";
    case QuestionSource::naive_overall: return "naive_overall";
    }
    return "rewritten";
}

std::string_view to_string(Answer v) {
    switch (v) {
    case Answer::yes: return "Yes";
    case Answer::no: return "No";
    case Answer::na: return "NA";
    }
    return "NA";
}

}  // namespace patientsim
