#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "patientsim/core/types.hpp"
#include "patientsim/simulator/simulator.hpp"

namespace patientsim::eval {

using json = nlohmann::json;

enum class CaseCategory { error, random };

// A frozen conversation point: everything needed to regenerate the next
// patient turn.
struct TestCase {
    std::string id;
    std::string scenario_text;
    std::vector<std::string> principles;
    std::vector<DialogueTurn> history;
    std::string counselor_message;
    CaseCategory category = CaseCategory::random;

    void validate() const;
    bool operator==(const TestCase&) const = default;
};

// Principles get ids p1, p2, ... and version 1 (0 when there are none).
simulator::GenerationContext to_context(const TestCase& tc);

// JSON array of TestCase. Throws ValidationError on a malformed file or a
// duplicate id.
std::vector<TestCase> load_testcases(const std::filesystem::path& path);
std::vector<TestCase> parse_testcases(const json& j);

// One case per counselor turn of a session export, with the turns before it
// as history. Ids are <session_id>-<turn_index>.
std::vector<TestCase> testcases_from_export(const json& exported, CaseCategory category = CaseCategory::random);

std::string_view to_string(CaseCategory c);

void to_json(json& j, CaseCategory v);
void from_json(const json& j, CaseCategory& v);
// History turns may omit turn_index; they are then numbered from 0.
void to_json(json& j, const TestCase& v);
void from_json(const json& j, TestCase& v);

}  // namespace patientsim::eval
