#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "patientsim/core/types.hpp"
#include "patientsim/elicitation/elicitor.hpp"

namespace patientsim::session {

using json = nlohmann::json;

enum class SessionStatus { open, closed };

struct Session {
    std::string session_id;
    PersonaScenario scenario;
    Constitution constitution;
    std::vector<DialogueTurn> transcript;
    std::vector<FeedbackItem> feedback;
    std::map<std::string, RefinementTrace> traces;
    std::map<std::string, elicitation::ElicitationTrace> elicitations;  // by trace id
    std::map<std::string, elicitation::ElicitationResult> conversions;    // by feedback id
    PipelineVariant active_variant = PipelineVariant::full;
    SessionStatus status = SessionStatus::open;

    const FeedbackItem* find_feedback(std::string_view feedback_id) const;
    const DialogueTurn* find_turn(int turn_index) const;

    bool operator==(const Session&) const = default;
};

enum class EventKind {
    created,
    counselor_msg,
    patient_msg,
    feedback_added,
    principle_added,
    principle_edited,
    principle_deleted,
    rewound,
    closed,
};

std::string_view to_string(EventKind kind);

// Payload shapes by kind:
//   created            {session_id, scenario, active_variant, constitution}
//   counselor_msg      {turn}
//   patient_msg        {turn, trace}
//   feedback_added     {feedback}
//   principle_added    {principle, version, elicitation?, result?}
//   principle_edited   {principle_id, text, version}
//   principle_deleted  {principle_id, version}
//   rewound            {turn_index, removed_turn}
//   closed             {}
struct SessionEvent {
    std::int64_t sequence_number = 0;
    EventKind kind = EventKind::created;
    json payload;
    Timestamp at{};

    bool operator==(const SessionEvent&) const = default;
};

// Folds one event into the session. Live mutation and replay both go through
// here, so a replayed log reproduces the live snapshot. Throws ValidationError
// when the event does not fit the current state.
void apply_event(Session& session, const SessionEvent& event);

// Rebuilds a session from its full event log. Sequence numbers must be dense
// from 0.
Session replay(std::span<const SessionEvent> events);

// The constitution as it stood at `version`, reconstructed from the log.
// Throws NotFoundError when that version never existed.
Constitution constitution_at(std::span<const SessionEvent> events, std::int64_t version);

// Every patient turn ever produced, including ones removed by a rewind, in
// event order.
std::vector<DialogueTurn> patient_turn_history(std::span<const SessionEvent> events);

void to_json(json& j, SessionStatus v);
void from_json(const json& j, SessionStatus& v);
void to_json(json& j, EventKind v);
void from_json(const json& j, EventKind& v);
void to_json(json& j, const Session& v);
void from_json(const json& j, Session& v);
void to_json(json& j, const SessionEvent& v);
void from_json(const json& j, SessionEvent& v);

}  // namespace patientsim::session

namespace patientsim::elicitation {
void to_json(nlohmann::json& j, const ElicitationTrace& v);
void from_json(const nlohmann::json& j, ElicitationTrace& v);
void to_json(nlohmann::json& j, const ElicitationResult& v);
void from_json(const nlohmann::json& j, ElicitationResult& v);
}  // namespace patientsim::elicitation
