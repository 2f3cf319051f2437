#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "patientsim/elicitation/elicitor.hpp"
#include "patientsim/session/event_store.hpp"
#include "patientsim/session/session.hpp"
#include "patientsim/simulator/simulator.hpp"

namespace patientsim::session {

struct ServiceOptions {
    PipelineVariant default_variant = PipelineVariant::full;
};

struct ConvertResult {
    Principle principle;
    bool created = false;  // false when the feedback had already been converted
    std::optional<elicitation::ElicitationResult> elicitation;
};

// Live expert sessions. Mutations on one session are serialized; different
// sessions proceed in parallel. Every mutation is appended to the event store
// before the in-memory snapshot is swapped, and the snapshot is always the
// fold of the stored events.
class SessionService {
public:
    SessionService(EventStore& store, simulator::Simulator& simulator, elicitation::Elicitor& elicitor,
                   IdGenerator& ids, const Clock& clock, ServiceOptions options = {});

    SessionService(const SessionService&) = delete;
    SessionService& operator=(const SessionService&) = delete;

    std::string create_session(PersonaScenario scenario, const std::vector<std::string>& initial_principles = {},
                               std::optional<PipelineVariant> variant = std::nullopt);

    // Appends the counselor turn and the generated patient turn. Nothing is
    // recorded when base generation fails.
    DialogueTurn post_counselor_message(const std::string& session_id, const std::string& text);

    std::string submit_feedback(const std::string& session_id, FeedbackItem feedback);
    ConvertResult convert_feedback(const std::string& session_id, const std::string& feedback_id);

    // Drops the last patient turn and generates a replacement for the same
    // counselor message under the current constitution.
    DialogueTurn rewind_and_regenerate(const std::string& session_id);

    Principle add_principle(const std::string& session_id, const std::string& text);
    Principle edit_principle(const std::string& session_id, const std::string& principle_id, const std::string& text);
    void delete_principle(const std::string& session_id, const std::string& principle_id);
    void close(const std::string& session_id);

    // Dry run of the active pipeline against the current transcript. Nothing
    // is stored.
    simulator::Reply preview(const std::string& session_id, const std::string& counselor_message);

    std::shared_ptr<const Session> get_session(const std::string& session_id);
    json export_transcript(const std::string& session_id);
    std::vector<SessionEvent> events(const std::string& session_id) const;
    std::vector<std::string> list_sessions() const;

    // Rebuilds the cache from every log in the store. Returns the count.
    std::size_t load_all();

private:
    struct Entry {
        std::mutex write_mu;
        mutable std::mutex snapshot_mu;
        std::shared_ptr<const Session> snapshot;
        std::int64_t next_sequence = 0;

        std::shared_ptr<const Session> current() const {
            std::lock_guard lock(snapshot_mu);
            return snapshot;
        }
    };

    std::shared_ptr<Entry> entry(const std::string& session_id);
    std::shared_ptr<Entry> load_entry(const std::string& session_id);
    void emit(Entry& e, const std::string& session_id, EventKind kind, json payload);

    EventStore& store_;
    simulator::Simulator& simulator_;
    elicitation::Elicitor& elicitor_;
    IdGenerator& ids_;
    const Clock& clock_;
    ServiceOptions options_;

    mutable std::mutex registry_mu_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

}  // namespace patientsim::session
