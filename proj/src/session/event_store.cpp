#include "patientsim/session/event_store.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>

#include "patientsim/error.hpp"

namespace patientsim::session {

namespace fs = std::filesystem;

void MemoryEventStore::append(const std::string& session_id, const SessionEvent& event) {
    std::lock_guard lock(mu_);
    logs_[session_id].push_back(event);
}

std::vector<SessionEvent> MemoryEventStore::load(const std::string& session_id) const {
    std::lock_guard lock(mu_);
    auto it = logs_.find(session_id);
    if (it == logs_.end()) throw NotFoundError(fmt::format("no event log for session {}", session_id));
    return it->second;
}

std::vector<std::string> MemoryEventStore::list() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> ids;
    for (const auto& [id, _] : logs_) ids.push_back(id);
    return ids;
}

JsonlEventStore::JsonlEventStore(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

fs::path JsonlEventStore::path_for(const std::string& session_id) const {
    // Session ids are generated UUIDs; reject anything that could escape dir_.
    if (session_id.empty() ||
        session_id.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789-_") !=
            std::string::npos) {
        throw ValidationError(fmt::format("invalid session id '{}'", session_id));
    }
    return dir_ / (session_id + ".jsonl");
}

void JsonlEventStore::append(const std::string& session_id, const SessionEvent& event) {
    auto path = path_for(session_id);
    std::lock_guard lock(mu_);
    std::ofstream out(path, std::ios::app | std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot open {}", path.string()));
    out << json(event).dump() << '\n';
    out.flush();
    if (!out) throw std::runtime_error(fmt::format("write to {} failed", path.string()));
}

std::vector<SessionEvent> JsonlEventStore::load(const std::string& session_id) const {
    auto path = path_for(session_id);
    std::lock_guard lock(mu_);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError(fmt::format("no event log for session {}", session_id));
    std::vector<SessionEvent> events;
    std::string line;
    while (std::getline(in, line)) {
        if (is_blank(line)) continue;
        events.push_back(json::parse(line).get<SessionEvent>());
    }
    return events;
}

std::vector<std::string> JsonlEventStore::list() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(dir_)) {
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
            ids.push_back(entry.path().stem().string());
        }
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace patientsim::session
