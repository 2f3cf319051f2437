#pragma once

// JSON mapping for the domain types. Field names are snake_case and enums are
// written as strings; unknown enum strings are rejected on read. Optional
// fields are written as null when absent and accepted as null or missing.

#include <nlohmann/json.hpp>

#include "patientsim/core/types.hpp"

namespace patientsim {

using json = nlohmann::json;

void to_json(json& j, PrincipleOrigin v);
void from_json(const json& j, PrincipleOrigin& v);
void to_json(json& j, Role v);
void from_json(const json& j, Role& v);
void to_json(json& j, FeedbackKind v);
void from_json(const json& j, FeedbackKind& v);
void to_json(json& j, QuestionSource v);
void from_json(const json& j, QuestionSource& v);
void to_json(json& j, Answer v);
void from_json(const json& j, Answer& v);
void to_json(json& j, PipelineVariant v);
void from_json(const json& j, PipelineVariant& v);

void to_json(json& j, const PersonaScenario& v);
void from_json(const json& j, PersonaScenario& v);
void to_json(json& j, const Principle& v);
void from_json(const json& j, Principle& v);
void to_json(json& j, const Constitution& v);
void from_json(const json& j, Constitution& v);
void to_json(json& j, const DialogueTurn& v);
void from_json(const json& j, DialogueTurn& v);
void to_json(json& j, const FeedbackItem& v);
void from_json(const json& j, FeedbackItem& v);
void to_json(json& j, const PrincipleQuestion& v);
void from_json(const json& j, PrincipleQuestion& v);
void to_json(json& j, const Verdict& v);
void from_json(const json& j, Verdict& v);
void to_json(json& j, const GenerationSettings& v);
void from_json(const json& j, GenerationSettings& v);
void to_json(json& j, const CallRecord& v);
void from_json(const json& j, CallRecord& v);
void to_json(json& j, const RefinementTrace& v);
void from_json(const json& j, RefinementTrace& v);

namespace jsonio {

inline json timestamp(Timestamp t) { return format_timestamp(t); }

inline Timestamp timestamp(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return Timestamp{};
    return parse_timestamp(j.at(key).get<std::string>());
}

template <class T>
void put(json& j, const char* key, const std::optional<T>& value) {
    if (value) {
        j[key] = *value;
    } else {
        j[key] = nullptr;
    }
}

template <class T>
std::optional<T> get_optional(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<T>();
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    return it->get<T>();
}

}  // namespace jsonio

}  // namespace patientsim
