#include "patientsim/core/ids.hpp"

#include <cctype>
#include <charconv>

#include <fmt/format.h>

#include "patientsim/error.hpp"

namespace patientsim {

namespace {

int parse_int(std::string_view text, std::size_t pos, std::size_t len) {
    if (pos + len > text.size()) {
        throw ValidationError(fmt::format("malformed timestamp '{}'", text));
    }
    int value = 0;
    auto first = text.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, value);
    if (ec != std::errc{} || ptr != first + len) {
        throw ValidationError(fmt::format("malformed timestamp '{}'", text));
    }
    return value;
}

}  // namespace

std::string format_timestamp(Timestamp t) {
    using namespace std::chrono;
    auto day = floor<days>(t);
    year_month_day ymd{day};
    hh_mm_ss<milliseconds> tod{t - day};
    return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}.{:03d}Z",
                       static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                       static_cast<unsigned>(ymd.day()), tod.hours().count(),
                       tod.minutes().count(), tod.seconds().count(),
                       tod.subseconds().count());
}

Timestamp parse_timestamp(std::string_view text) {
    using namespace std::chrono;
    // YYYY-MM-DDTHH:MM:SS[.mmm]Z
    if (text.size() < 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
        text[13] != ':' || text[16] != ':' || text.back() != 'Z') {
        throw ValidationError(fmt::format("malformed timestamp '{}'", text));
    }
    year_month_day ymd{year{parse_int(text, 0, 4)},
                       month{static_cast<unsigned>(parse_int(text, 5, 2))},
                       day{static_cast<unsigned>(parse_int(text, 8, 2))}};
    if (!ymd.ok()) throw ValidationError(fmt::format("invalid date in '{}'", text));
    int millis = 0;
    if (text.size() == 24 && text[19] == '.') {
        millis = parse_int(text, 20, 3);
    } else if (text.size() != 20) {
        throw ValidationError(fmt::format("malformed timestamp '{}'", text));
    }
    return sys_days{ymd} + hours{parse_int(text, 11, 2)} + minutes{parse_int(text, 14, 2)} +
           seconds{parse_int(text, 17, 2)} + milliseconds{millis};
}

Timestamp SystemClock::now() const {
    return std::chrono::floor<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

IdGenerator::IdGenerator() : engine_(std::random_device{}()) {
    engine_.seed((static_cast<std::uint64_t>(std::random_device{}()) << 32) ^
                 std::random_device{}());
}

IdGenerator::IdGenerator(std::uint64_t seed) : engine_(seed) {}

std::string IdGenerator::next() {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;
    {
        std::lock_guard lock(mu_);
        hi = engine_();
        lo = engine_();
    }
    hi = (hi & 0xFFFFFFFFFFFF0FFFULL) | 0x0000000000004000ULL;
    lo = (lo & 0x3FFFFFFFFFFFFFFFULL) | 0x8000000000000000ULL;
    return fmt::format("{:08x}-{:04x}-{:04x}-{:04x}-{:012x}", hi >> 32, (hi >> 16) & 0xFFFF,
                       hi & 0xFFFF, lo >> 48, lo & 0xFFFFFFFFFFFFULL);
}

bool looks_like_uuid(std::string_view s) {
    if (s.size() != 36) return false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i == 8 || i == 13 || i == 18 || i == 23) {
            if (s[i] != '-') return false;
        } else if (!std::isxdigit(static_cast<unsigned char>(s[i]))) {
            return false;
        }
    }
    return true;
}

}  // namespace patientsim
