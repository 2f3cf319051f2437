#include "patientsim/core/transcript.hpp"

#include <array>

#include <fmt/format.h>

namespace patientsim {

std::string render_script(std::span<const DialogueTurn> turns, SpeakerLabels labels) {
    std::string out;
    for (const auto& turn : turns) {
        if (!out.empty()) out.push_back('\n');
        auto label = turn.role == Role::counselor ? labels.counselor : labels.patient;
        out += fmt::format("{}: {}", label, turn.text);
    }
    return out;
}

std::string numbered_list(std::span<const std::string> items, int first_number) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out.push_back('\n');
        out += fmt::format("{}. {}", first_number + static_cast<int>(i), items[i]);
    }
    return out;
}

std::vector<std::string> principle_texts(const Constitution& constitution) {
    std::vector<std::string> out;
    out.reserve(constitution.principles.size());
    for (const auto& p : constitution.principles) out.push_back(p.text);
    return out;
}

std::string strip_role_prefixes(std::string_view text) {
    static constexpr std::array<std::string_view, 2> kPrefixes = {"Patient:", "Actor:"};
    std::string s(text);
    bool removed = true;
    while (removed) {
        removed = false;
        for (auto prefix : kPrefixes) {
            for (auto pos = s.find(prefix); pos != std::string::npos; pos = s.find(prefix, pos)) {
                auto end = pos + prefix.size();
                // Swallow one following space so "Patient: hi" becomes "hi".
                if (end < s.size() && s[end] == ' ') ++end;
                s.erase(pos, end - pos);
                removed = true;
            }
        }
    }
    return trim(s);
}

}  // namespace patientsim
