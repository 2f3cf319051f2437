#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <mutex>
#include <random>
#include <string>
#include <string_view>

namespace patientsim {

// UTC, millisecond precision.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

// ISO-8601 with a trailing Z, e.g. 2024-03-01T12:00:00.250Z
std::string format_timestamp(Timestamp t);
Timestamp parse_timestamp(std::string_view text);

class Clock {
public:
    virtual ~Clock() = default;
    virtual Timestamp now() const = 0;
};

class SystemClock final : public Clock {
public:
    Timestamp now() const override;
};

// Test clock. Returns a fixed instant, optionally advancing by `step` on each
// read so ordering stays observable.
class ManualClock final : public Clock {
public:
    explicit ManualClock(Timestamp start = Timestamp{},
                         std::chrono::milliseconds step = std::chrono::milliseconds{0})
        : ticks_(start.time_since_epoch().count()), step_(step.count()) {}

    Timestamp now() const override {
        return Timestamp{std::chrono::milliseconds{ticks_.fetch_add(step_)}};
    }

    void advance(std::chrono::milliseconds d) { ticks_ += d.count(); }

private:
    mutable std::atomic<std::int64_t> ticks_;
    std::int64_t step_;
};

// Produces UUID-shaped (version 4 layout) opaque identifiers. A seeded
// generator yields the same sequence every run, which scripted tests rely on.
class IdGenerator {
public:
    IdGenerator();
    explicit IdGenerator(std::uint64_t seed);

    std::string next();

private:
    std::mutex mu_;
    std::mt19937_64 engine_;
};

bool looks_like_uuid(std::string_view s);

}  // namespace patientsim
