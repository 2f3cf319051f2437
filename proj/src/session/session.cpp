#include "patientsim/session/session.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "patientsim/core/constitution.hpp"
#include "patientsim/core/json.hpp"
#include "patientsim/error.hpp"

namespace patientsim::elicitation {

void to_json(nlohmann::json& j, const ElicitationTrace& v) {
    j = nlohmann::json{{"trace_id", v.trace_id},
                       {"feedback_id", v.feedback_id},
                       {"kind", v.kind},
                       {"calls", v.calls}};
    jsonio::put(j, "error", v.error);
}

void from_json(const nlohmann::json& j, ElicitationTrace& v) {
    v.trace_id = j.at("trace_id").get<std::string>();
    v.feedback_id = j.at("feedback_id").get<std::string>();
    v.kind = j.at("kind").get<FeedbackKind>();
    v.calls = j.at("calls").get<std::vector<CallRecord>>();
    v.error = jsonio::get_optional<std::string>(j, "error");
}

void to_json(nlohmann::json& j, const ElicitationResult& v) {
    j = nlohmann::json{{"principle_text", v.principle_text},
                       {"feedback_id", v.feedback_id},
                       {"raw_trace_id", v.raw_trace_id}};
    jsonio::put(j, "difference", v.difference);
}

void from_json(const nlohmann::json& j, ElicitationResult& v) {
    v.principle_text = j.at("principle_text").get<std::string>();
    v.difference = jsonio::get_optional<std::string>(j, "difference");
    v.feedback_id = j.at("feedback_id").get<std::string>();
    v.raw_trace_id = j.at("raw_trace_id").get<std::string>();
}

}  // namespace patientsim::elicitation

namespace patientsim::session {

namespace {

constexpr std::array kEventKinds = {EventKind::created,          EventKind::counselor_msg,
                                    EventKind::patient_msg,      EventKind::feedback_added,
                                    EventKind::principle_added,  EventKind::principle_edited,
                                    EventKind::principle_deleted, EventKind::rewound,
                                    EventKind::closed};

void require(bool condition, std::string_view message) {
    if (!condition) throw ValidationError(std::string(message));
}

int next_turn_index(const Session& s) {
    return s.transcript.empty() ? 0 : s.transcript.back().turn_index + 1;
}

void check_version(const Session& s, const json& payload) {
    auto version = payload.at("version").get<std::int64_t>();
    require(version == s.constitution.version + 1,
            fmt::format("constitution version {} does not follow {}", version, s.constitution.version));
}

void apply_turn(Session& s, const DialogueTurn& turn, Role expected) {
    turn.validate();
    require(turn.role == expected, "turn role out of order");
    Role previous = s.transcript.empty() ? Role::patient : s.transcript.back().role;
    require(previous != expected, "roles must alternate");
    require(turn.turn_index == next_turn_index(s), "turn_index is not the next index");
    if (expected == Role::patient) {
        require(turn.constitution_version.has_value(), "patient turn lacks a constitution version");
        require(*turn.constitution_version <= s.constitution.version,
                "patient turn refers to a future constitution version");
    }
    s.transcript.push_back(turn);
}

}  // namespace

const FeedbackItem* Session::find_feedback(std::string_view feedback_id) const {
    auto it = std::find_if(feedback.begin(), feedback.end(),
                           [&](const FeedbackItem& f) { return f.id == feedback_id; });
    return it == feedback.end() ? nullptr : &*it;
}

const DialogueTurn* Session::find_turn(int turn_index) const {
    auto it = std::find_if(transcript.begin(), transcript.end(),
                           [&](const DialogueTurn& t) { return t.turn_index == turn_index; });
    return it == transcript.end() ? nullptr : &*it;
}

std::string_view to_string(EventKind kind) {
    switch (kind) {
    case EventKind::created: return "created";
    case EventKind::counselor_msg: return "counselor_msg";
    case EventKind::patient_msg: return "patient_msg";
    case EventKind::feedback_added: return "feedback_added";
    case EventKind::principle_added: return "principle_added";
    case EventKind::principle_edited: return "principle_edited";
    case EventKind::principle_deleted: return "principle_deleted";
    case EventKind::rewound: return "rewound";
    case EventKind::closed: return "closed";
    }
    return "created";
}

void apply_event(Session& s, const SessionEvent& event) {
    const auto& p = event.payload;
    if (event.kind != EventKind::created) {
        require(!s.session_id.empty(), "session must be created first");
    }
    switch (event.kind) {
    case EventKind::created: {
        require(s.session_id.empty(), "session already created");
        s.session_id = p.at("session_id").get<std::string>();
        s.scenario = p.at("scenario").get<PersonaScenario>();
        s.scenario.validate();
        s.active_variant = p.at("active_variant").get<PipelineVariant>();
        s.constitution = p.at("constitution").get<Constitution>();
        require(s.constitution.version == (s.constitution.principles.empty() ? 0 : 1),
                "initial constitution must be version 0, or 1 with principles");
        for (const auto& principle : s.constitution.principles) principle.validate();
        s.status = SessionStatus::open;
        break;
    }
    case EventKind::counselor_msg:
        require(s.status == SessionStatus::open, "session is closed");
        apply_turn(s, p.at("turn").get<DialogueTurn>(), Role::counselor);
        break;
    case EventKind::patient_msg: {
        require(s.status == SessionStatus::open, "session is closed");
        auto turn = p.at("turn").get<DialogueTurn>();
        auto trace = p.at("trace").get<RefinementTrace>();
        require(turn.trace_id == trace.trace_id, "patient turn and trace disagree on trace id");
        apply_turn(s, turn, Role::patient);
        s.traces[trace.trace_id] = std::move(trace);
        break;
    }
    case EventKind::feedback_added: {
        auto item = p.at("feedback").get<FeedbackItem>();
        item.validate();
        require(!item.id.empty() && s.find_feedback(item.id) == nullptr, "duplicate feedback id");
        const auto* target = s.find_turn(item.target_turn_index);
        require(target != nullptr && target->role == Role::patient, "feedback must target a patient turn");
        require(!item.converted_principle_id.has_value(), "new feedback cannot be converted already");
        s.feedback.push_back(std::move(item));
        break;
    }
    case EventKind::principle_added: {
        check_version(s, p);
        auto principle = p.at("principle").get<Principle>();
        FeedbackItem* source = nullptr;
        if (principle.source_feedback_id) {
            auto it = std::find_if(s.feedback.begin(), s.feedback.end(),
                                   [&](const FeedbackItem& f) { return f.id == *principle.source_feedback_id; });
            require(it != s.feedback.end(), "principle references unknown feedback");
            require(!it->converted_principle_id.has_value(), "feedback already converted");
            source = &*it;
        }
        s.constitution = bump_constitution(s.constitution, AddPrinciple{principle});
        if (source) source->converted_principle_id = principle.id;
        if (auto e = p.find("elicitation"); e != p.end() && !e->is_null()) {
            auto trace = e->get<elicitation::ElicitationTrace>();
            s.elicitations[trace.trace_id] = std::move(trace);
        }
        if (auto r = p.find("result"); r != p.end() && !r->is_null()) {
            auto result = r->get<elicitation::ElicitationResult>();
            s.conversions[result.feedback_id] = std::move(result);
        }
        break;
    }
    case EventKind::principle_edited:
        check_version(s, p);
        s.constitution = bump_constitution(
            s.constitution,
            EditPrinciple{p.at("principle_id").get<std::string>(), p.at("text").get<std::string>()});
        break;
    case EventKind::principle_deleted:
        check_version(s, p);
        s.constitution =
            bump_constitution(s.constitution, DeletePrinciple{p.at("principle_id").get<std::string>()});
        break;
    case EventKind::rewound: {
        require(s.status == SessionStatus::open, "session is closed");
        require(!s.transcript.empty() && s.transcript.back().role == Role::patient,
                "rewind requires a trailing patient turn");
        require(p.at("turn_index").get<int>() == s.transcript.back().turn_index,
                "rewind names a turn that is not the last");
        s.transcript.pop_back();
        break;
    }
    case EventKind::closed:
        require(s.status == SessionStatus::open, "session already closed");
        s.status = SessionStatus::closed;
        break;
    }
}

Session replay(std::span<const SessionEvent> events) {
    Session s;
    for (std::size_t i = 0; i < events.size(); ++i) {
        require(events[i].sequence_number == static_cast<std::int64_t>(i),
                fmt::format("event sequence gap at {}", i));
        apply_event(s, events[i]);
    }
    return s;
}

Constitution constitution_at(std::span<const SessionEvent> events, std::int64_t version) {
    Session s;
    for (const auto& e : events) {
        apply_event(s, e);
        if (s.constitution.version == version) return s.constitution;
        if (s.constitution.version > version) break;
    }
    throw NotFoundError(fmt::format("constitution version {} not found", version));
}

std::vector<DialogueTurn> patient_turn_history(std::span<const SessionEvent> events) {
    std::vector<DialogueTurn> out;
    for (const auto& e : events) {
        if (e.kind == EventKind::patient_msg) out.push_back(e.payload.at("turn").get<DialogueTurn>());
    }
    return out;
}

void to_json(json& j, SessionStatus v) { j = v == SessionStatus::open ? "open" : "closed"; }

void from_json(const json& j, SessionStatus& v) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "open") {
        v = SessionStatus::open;
    } else if (s == "closed") {
        v = SessionStatus::closed;
    } else {
        throw ValidationError(fmt::format("unknown session status '{}'", s));
    }
}

void to_json(json& j, EventKind v) { j = std::string(to_string(v)); }

void from_json(const json& j, EventKind& v) {
    const auto& s = j.get_ref<const std::string&>();
    for (auto k : kEventKinds) {
        if (to_string(k) == s) {
            v = k;
            return;
        }
    }
    throw ValidationError(fmt::format("unknown event kind '{}'", s));
}

void to_json(json& j, const Session& v) {
    j = json{{"session_id", v.session_id},
             {"scenario", v.scenario},
             {"constitution", v.constitution},
             {"transcript", v.transcript},
             {"feedback", v.feedback},
             {"traces", v.traces},
             {"elicitations", v.elicitations},
             {"conversions", v.conversions},
             {"active_variant", v.active_variant},
             {"status", v.status}};
}

void from_json(const json& j, Session& v) {
    v.session_id = j.at("session_id").get<std::string>();
    v.scenario = j.at("scenario").get<PersonaScenario>();
    v.constitution = j.at("constitution").get<Constitution>();
    v.transcript = j.at("transcript").get<std::vector<DialogueTurn>>();
    v.feedback = j.at("feedback").get<std::vector<FeedbackItem>>();
    v.traces = j.at("traces").get<std::map<std::string, RefinementTrace>>();
    v.elicitations = j.at("elicitations").get<std::map<std::string, elicitation::ElicitationTrace>>();
    v.conversions = jsonio::get_or(j, "conversions", std::map<std::string, elicitation::ElicitationResult>{});
    v.active_variant = j.at("active_variant").get<PipelineVariant>();
    v.status = j.at("status").get<SessionStatus>();
}

void to_json(json& j, const SessionEvent& v) {
    j = json{{"sequence_number", v.sequence_number},
             {"kind", v.kind},
             {"payload", v.payload},
             {"at", format_timestamp(v.at)}};
}

void from_json(const json& j, SessionEvent& v) {
    v.sequence_number = j.at("sequence_number").get<std::int64_t>();
    v.kind = j.at("kind").get<EventKind>();
    v.payload = j.at("payload");
    v.at = parse_timestamp(j.at("at").get<std::string>());
}

}  // namespace patientsim::session
