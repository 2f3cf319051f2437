#include "patientsim/session/service.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "patientsim/core/json.hpp"
#include "patientsim/error.hpp"

namespace patientsim::session {

SessionService::SessionService(EventStore& store, simulator::Simulator& simulator, elicitation::Elicitor& elicitor,
                               IdGenerator& ids, const Clock& clock, ServiceOptions options)
    : store_(store), simulator_(simulator), elicitor_(elicitor), ids_(ids), clock_(clock), options_(options) {}

std::shared_ptr<SessionService::Entry> SessionService::entry(const std::string& session_id) {
    {
        std::lock_guard lock(registry_mu_);
        if (auto it = sessions_.find(session_id); it != sessions_.end()) return it->second;
    }
    return load_entry(session_id);
}

std::shared_ptr<SessionService::Entry> SessionService::load_entry(const std::string& session_id) {
    std::vector<SessionEvent> log;
    try {
        log = store_.load(session_id);
    } catch (const ValidationError&) {
        throw NotFoundError(fmt::format("session {} not found", session_id));
    } catch (const NotFoundError&) {
        throw NotFoundError(fmt::format("session {} not found", session_id));
    }
    auto e = std::make_shared<Entry>();
    e->snapshot = std::make_shared<const Session>(replay(log));
    e->next_sequence = static_cast<std::int64_t>(log.size());
    std::lock_guard lock(registry_mu_);
    auto [it, inserted] = sessions_.emplace(session_id, e);
    return it->second;
}

void SessionService::emit(Entry& e, const std::string& session_id, EventKind kind, json payload) {
    SessionEvent event{e.next_sequence, kind, std::move(payload), clock_.now()};
    auto next = e.snapshot ? std::make_shared<Session>(*e.snapshot) : std::make_shared<Session>();
    apply_event(*next, event);
    store_.append(session_id, event);
    ++e.next_sequence;
    std::lock_guard lock(e.snapshot_mu);
    e.snapshot = std::move(next);
}

std::string SessionService::create_session(PersonaScenario scenario, const std::vector<std::string>& initial_principles,
                                           std::optional<PipelineVariant> variant) {
    if (scenario.id.empty()) scenario.id = ids_.next();
    if (scenario.created_at == Timestamp{}) scenario.created_at = clock_.now();
    scenario.validate();

    Constitution constitution;
    for (const auto& text : initial_principles) {
        Principle p{ids_.next(), trim(text), PrincipleOrigin::manual, std::nullopt, false, clock_.now()};
        p.validate();
        constitution.principles.push_back(std::move(p));
    }
    if (!constitution.principles.empty()) constitution.version = 1;

    auto session_id = ids_.next();
    auto e = std::make_shared<Entry>();
    std::lock_guard write(e->write_mu);
    emit(*e, session_id, EventKind::created,
         json{{"session_id", session_id},
              {"scenario", scenario},
              {"active_variant", variant.value_or(options_.default_variant)},
              {"constitution", constitution}});
    {
        std::lock_guard lock(registry_mu_);
        sessions_.emplace(session_id, e);
    }
    spdlog::info("session {} created", session_id);
    return session_id;
}

DialogueTurn SessionService::post_counselor_message(const std::string& session_id, const std::string& text) {
    auto e = entry(session_id);
    std::lock_guard write(e->write_mu);
    auto s = e->current();
    if (s->status != SessionStatus::open) throw ConflictError("session is closed");
    if (!s->transcript.empty() && s->transcript.back().role != Role::patient) {
        throw ConflictError("waiting for a patient turn; rewind or wait before posting");
    }
    if (is_blank(text)) throw ValidationError("message text must not be blank");

    int index = s->transcript.empty() ? 0 : s->transcript.back().turn_index + 1;
    DialogueTurn counselor{index, Role::counselor, text, std::nullopt, std::nullopt};
    counselor.validate();

    // Generate before recording anything so a failed generation leaves the
    // session untouched.
    simulator::GenerationContext ctx{s->scenario, s->constitution, s->transcript, text};
    auto reply = simulator_.respond(s->active_variant, ctx);
    if (reply.trace.error) {
        spdlog::warn("session {} trace {} degraded: {}", session_id, reply.trace.trace_id, *reply.trace.error);
    }
    DialogueTurn patient{index + 1, Role::patient, reply.text, s->constitution.version, reply.trace.trace_id};
    emit(*e, session_id, EventKind::counselor_msg, json{{"turn", counselor}});
    emit(*e, session_id, EventKind::patient_msg, json{{"turn", patient}, {"trace", reply.trace}});
    return patient;
}

std::string SessionService::submit_feedback(const std::string& session_id, FeedbackItem feedback) {
    auto e = entry(session_id);
    std::lock_guard write(e->write_mu);
    auto s = e->current();
    const auto* target = s->find_turn(feedback.target_turn_index);
    if (target == nullptr || target->role != Role::patient) {
        throw ValidationError(
            fmt::format("turn {} is not a patient turn of this session", feedback.target_turn_index));
    }
    if (feedback.id.empty()) feedback.id = ids_.next();
    if (s->find_feedback(feedback.id)) throw ConflictError(fmt::format("feedback {} already exists", feedback.id));
    feedback.converted_principle_id.reset();
    feedback.target_text = target->text;
    feedback.validate();
    if (feedback.kind == FeedbackKind::rewrite && trim(*feedback.rewrite_text) == trim(target->text)) {
        throw ValidationError("rewrite is identical to the original response");
    }
    emit(*e, session_id, EventKind::feedback_added, json{{"feedback", feedback}});
    return feedback.id;
}

ConvertResult SessionService::convert_feedback(const std::string& session_id, const std::string& feedback_id) {
    auto e = entry(session_id);
    std::lock_guard write(e->write_mu);
    auto s = e->current();
    const auto* fb = s->find_feedback(feedback_id);
    if (fb == nullptr) throw NotFoundError(fmt::format("feedback {} not found", feedback_id));

    auto stored_result = [&]() -> std::optional<elicitation::ElicitationResult> {
        if (auto it = s->conversions.find(feedback_id); it != s->conversions.end()) return it->second;
        return std::nullopt;
    };

    if (fb->converted_principle_id) {
        if (const auto* p = s->constitution.find(*fb->converted_principle_id)) {
            return ConvertResult{*p, false, stored_result()};
        }
        // The principle was deleted since; hand back what was added.
        for (const auto& ev : store_.load(session_id)) {
            if (ev.kind != EventKind::principle_added) continue;
            auto p = ev.payload.at("principle").get<Principle>();
            if (p.id == *fb->converted_principle_id) return ConvertResult{p, false, stored_result()};
        }
        throw NotFoundError(fmt::format("principle {} not found", *fb->converted_principle_id));
    }

    std::vector<DialogueTurn> window;
    std::copy_if(s->transcript.begin(), s->transcript.end(), std::back_inserter(window),
                 [&](const DialogueTurn& t) { return t.turn_index < fb->target_turn_index; });
    auto elicited = elicitor_.elicit(*fb, window);

    Principle principle{ids_.next(), trim(elicited.result.principle_text), origin_for(fb->kind), fb->id, false,
                        clock_.now()};
    emit(*e, session_id, EventKind::principle_added,
         json{{"principle", principle},
              {"version", s->constitution.version + 1},
              {"elicitation", elicited.trace},
              {"result", elicited.result}});
    return ConvertResult{principle, true, elicited.result};
}

DialogueTurn SessionService::rewind_and_regenerate(const std::string& session_id) {
    auto e = entry(session_id);
    std::lock_guard write(e->write_mu);
    auto s = e->current();
    if (s->status != SessionStatus::open) throw ConflictError("session is closed");
    if (s->transcript.empty() || s->transcript.back().role != Role::patient) {
        throw ConflictError("nothing to rewind: the last turn is not a patient turn");
    }
    const auto& removed = s->transcript.back();
    const auto& counselor = s->transcript[s->transcript.size() - 2];
    std::vector<DialogueTurn> history(s->transcript.begin(), s->transcript.end() - 2);

    simulator::GenerationContext ctx{s->scenario, s->constitution, std::move(history), counselor.text};
    auto reply = simulator_.respond(s->active_variant, ctx);
    if (reply.trace.error) {
        spdlog::warn("session {} trace {} degraded: {}", session_id, reply.trace.trace_id, *reply.trace.error);
    }
    DialogueTurn patient{removed.turn_index, Role::patient, reply.text, s->constitution.version,
                         reply.trace.trace_id};
    emit(*e, session_id, EventKind::rewound, json{{"turn_index", removed.turn_index}, {"removed_turn", removed}});
    emit(*e, session_id, EventKind::patient_msg, json{{"turn", patient}, {"trace", reply.trace}});
    return patient;
}

Principle SessionService::add_principle(const std::string& session_id, const std::string& text) {
    auto e = entry(session_id);
    std::lock_guard write(e->write_mu);
    auto s = e->current();
    Principle principle{ids_.next(), trim(text), PrincipleOrigin::manual, std::nullopt, false, clock_.now()};
    principle.validate();
    emit(*e, session_id, EventKind::principle_added,
         json{{"principle", principle}, {"version", s->constitution.version + 1}});
    return principle;
}

Principle SessionService::edit_principle(const std::string& session_id, const std::string& principle_id,
                                         const std::string& text) {
    auto e = entry(session_id);
    std::lock_guard write(e->write_mu);
    auto s = e->current();
    if (!s->constitution.find(principle_id)) throw NotFoundError(fmt::format("principle {} not found", principle_id));
    if (is_blank(text)) throw ValidationError("principle text must not be blank");
    emit(*e, session_id, EventKind::principle_edited,
         json{{"principle_id", principle_id}, {"text", trim(text)}, {"version", s->constitution.version + 1}});
    return *e->current()->constitution.find(principle_id);
}

void SessionService::delete_principle(const std::string& session_id, const std::string& principle_id) {
    auto e = entry(session_id);
    std::lock_guard write(e->write_mu);
    auto s = e->current();
    if (!s->constitution.find(principle_id)) throw NotFoundError(fmt::format("principle {} not found", principle_id));
    emit(*e, session_id, EventKind::principle_deleted,
         json{{"principle_id", principle_id}, {"version", s->constitution.version + 1}});
}

void SessionService::close(const std::string& session_id) {
    auto e = entry(session_id);
    std::lock_guard write(e->write_mu);
    if (e->current()->status == SessionStatus::closed) return;
    emit(*e, session_id, EventKind::closed, json::object());
}

simulator::Reply SessionService::preview(const std::string& session_id, const std::string& counselor_message) {
    auto s = entry(session_id)->current();
    if (is_blank(counselor_message)) throw ValidationError("message text must not be blank");
    if (!s->transcript.empty() && s->transcript.back().role != Role::patient) {
        throw ConflictError("waiting for a patient turn");
    }
    simulator::GenerationContext ctx{s->scenario, s->constitution, s->transcript, counselor_message};
    return simulator_.respond(s->active_variant, ctx);
}

std::shared_ptr<const Session> SessionService::get_session(const std::string& session_id) {
    return entry(session_id)->current();
}

json SessionService::export_transcript(const std::string& session_id) {
    auto s = get_session(session_id);
    json principles = json::array();
    for (const auto& p : s->constitution.principles) principles.push_back(p.text);
    return json{{"session_id", s->session_id},
                {"scenario_text", s->scenario.scenario_text},
                {"title", s->scenario.title},
                {"constitution_version", s->constitution.version},
                {"principles", principles},
                {"transcript", s->transcript}};
}

std::vector<SessionEvent> SessionService::events(const std::string& session_id) const {
    return store_.load(session_id);
}

std::vector<std::string> SessionService::list_sessions() const { return store_.list(); }

std::size_t SessionService::load_all() {
    std::size_t n = 0;
    for (const auto& id : store_.list()) {
        try {
            load_entry(id);
            ++n;
        } catch (const std::exception& ex) {
            spdlog::error("skipping session {}: {}", id, ex.what());
        }
    }
    return n;
}

}  // namespace patientsim::session
