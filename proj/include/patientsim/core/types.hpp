#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "patientsim/core/ids.hpp"

namespace patientsim {

// Description of the simulated help-seeker written by the counselor.
struct PersonaScenario {
    std::string id;
    std::string title;
    std::string scenario_text;
    std::string creator_id;
    Timestamp created_at{};

    static constexpr std::size_t kMaxTitleLength = 200;

    void validate() const;
    bool operator==(const PersonaScenario&) const = default;
};

enum class PrincipleOrigin { manual, kudos, critique, rewrite };

struct Principle {
    std::string id;
    std::string text;
    PrincipleOrigin origin = PrincipleOrigin::manual;
    std::optional<std::string> source_feedback_id;
    bool edited = false;
    Timestamp created_at{};

    void validate() const;
    bool operator==(const Principle&) const = default;
};

// Ordered rule list governing the patient. Principles keep insertion order.
struct Constitution {
    std::int64_t version = 0;
    std::vector<Principle> principles;

    const Principle* find(std::string_view principle_id) const;
    bool operator==(const Constitution&) const = default;
};

enum class Role { counselor, patient };

struct DialogueTurn {
    int turn_index = 0;
    Role role = Role::counselor;
    std::string text;
    std::optional<std::int64_t> constitution_version;  // patient turns only
    std::optional<std::string> trace_id;

    void validate() const;
    bool operator==(const DialogueTurn&) const = default;
};

// Checks turn_index ordering, and role alternation when `live` is set.
void validate_transcript(const std::vector<DialogueTurn>& turns, bool live);

enum class FeedbackKind { kudos, critique, rewrite };

struct FeedbackItem {
    std::string id;
    FeedbackKind kind = FeedbackKind::kudos;
    int target_turn_index = 0;
    std::optional<std::string> rationale;
    std::optional<std::string> rewrite_text;
    std::optional<std::string> converted_principle_id;
    // Patient text the feedback was written against. A rewind can replace the
    // turn at target_turn_index, so conversion reads this instead.
    std::optional<std::string> target_text;

    // Kind-specific field checks only; target existence is a session check.
    void validate() const;
    bool operator==(const FeedbackItem&) const = default;
};

PrincipleOrigin origin_for(FeedbackKind kind);

enum class QuestionSource { rewritten, autogenerated, fixed_context_consistency, naive_overall };

struct PrincipleQuestion {
    std::string text;
    QuestionSource source = QuestionSource::rewritten;
    std::optional<std::string> source_principle_id;

    void validate() const;
    bool operator==(const PrincipleQuestion&) const = default;
};

inline constexpr std::string_view kContextConsistencyQuestion =
    "Is the patient's response consistent with the given conversation history?";

enum class Answer { yes, no, na };

// Accepts Yes / No / N/A / NA in any case, with surrounding whitespace or a
// trailing period. Returns nullopt for anything else.
std::optional<Answer> parse_answer(std::string_view text);

struct Verdict {
    Answer answer = Answer::na;
    std::string justification;

    void validate() const;
    bool operator==(const Verdict&) const = default;
};

enum class PipelineVariant { full, naive, no_principle_rewrites, no_autogenerated_criteria, no_critique };

inline constexpr std::array<PipelineVariant, 5> kAllVariants = {
    PipelineVariant::full, PipelineVariant::naive, PipelineVariant::no_principle_rewrites,
    PipelineVariant::no_autogenerated_criteria, PipelineVariant::no_critique};

// Canonical names: Full, Naive, NoPrincipleRewrites, NoAutogeneratedCriteria,
// NoCritique. Parsing also accepts snake_case aliases (no_critique).
std::string_view to_string(PipelineVariant v);
PipelineVariant parse_variant(std::string_view s);
std::vector<PipelineVariant> parse_variant_list(std::string_view comma_separated);

struct GenerationSettings {
    std::string model_id;
    double temperature = 0.0;
    bool json_mode = false;
    int max_output_tokens = 1024;

    void validate() const;
    bool operator==(const GenerationSettings&) const = default;
};

// One provider attempt. Retries and re-asks each get their own record.
struct CallRecord {
    std::string template_name;
    std::string prompt_hash;
    std::string prompt;
    GenerationSettings settings;
    std::string response;
    std::int64_t latency_ms = 0;
    int attempt = 1;
    std::optional<std::string> error;

    bool operator==(const CallRecord&) const = default;
};

struct RefinementTrace {
    std::string trace_id;
    PipelineVariant variant = PipelineVariant::full;
    std::string initial_response;
    std::vector<PrincipleQuestion> questions;
    std::vector<Verdict> verdicts;
    std::vector<std::string> extra_justifications;
    std::string final_response;
    bool rewritten = false;
    std::string reasoning;
    std::optional<std::string> error;
    std::vector<CallRecord> calls;

    bool operator==(const RefinementTrace&) const = default;
};

// Empty string when every trace invariant holds, otherwise a description of
// the first violation found.
std::string trace_violation(const RefinementTrace& trace);

std::string_view to_string(PrincipleOrigin v);
std::string_view to_string(Role v);
std::string_view to_string(FeedbackKind v);
std::string_view to_string(QuestionSource v);
std::string_view to_string(Answer v);

std::string trim(std::string_view s);
bool is_blank(std::string_view s);

}  // namespace patientsim
