#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "patientsim/core/types.hpp"

namespace patientsim {

struct SpeakerLabels {
    std::string_view counselor;
    std::string_view patient;
};

// "Helper:" / "Actor:" as in the elicitation conversation scripts.
inline constexpr SpeakerLabels kElicitationLabels{"Helper", "Actor"};
// "Therapist:" / "Patient:" for simulation and adherence prompts.
inline constexpr SpeakerLabels kSimulationLabels{"Therapist", "Patient"};

// One "Label: text" line per turn, joined by newlines. Consecutive turns by
// the same speaker each get their own line.
std::string render_script(std::span<const DialogueTurn> turns, SpeakerLabels labels);

// "1. first\n2. second" with no trailing newline; `first_number` shifts the
// numbering. Empty input renders as an empty string.
std::string numbered_list(std::span<const std::string> items, int first_number = 1);

std::vector<std::string> principle_texts(const Constitution& constitution);

// Removes "Patient:" / "Actor:" role prefixes wherever they occur and trims
// the result.
std::string strip_role_prefixes(std::string_view text);

}  // namespace patientsim
