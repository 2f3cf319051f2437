#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "patientsim/session/session.hpp"

namespace patientsim::session {

// Append-only per-session event log.
class EventStore {
public:
    virtual ~EventStore() = default;

    virtual void append(const std::string& session_id, const SessionEvent& event) = 0;
    virtual std::vector<SessionEvent> load(const std::string& session_id) const = 0;
    virtual std::vector<std::string> list() const = 0;
};

class MemoryEventStore final : public EventStore {
public:
    void append(const std::string& session_id, const SessionEvent& event) override;
    std::vector<SessionEvent> load(const std::string& session_id) const override;
    std::vector<std::string> list() const override;

private:
    mutable std::mutex mu_;
    std::map<std::string, std::vector<SessionEvent>> logs_;
};

// One JSON-lines file per session, <dir>/<session_id>.jsonl. Each append is
// written and flushed before returning.
class JsonlEventStore final : public EventStore {
public:
    explicit JsonlEventStore(std::filesystem::path dir);

    void append(const std::string& session_id, const SessionEvent& event) override;
    std::vector<SessionEvent> load(const std::string& session_id) const override;
    std::vector<std::string> list() const override;

    std::filesystem::path path_for(const std::string& session_id) const;

private:
    std::filesystem::path dir_;
    mutable std::mutex mu_;
};

}  // namespace patientsim::session
