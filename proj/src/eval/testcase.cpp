#include "patientsim/eval/testcase.hpp"

#include <fstream>
#include <set>

#include <fmt/format.h>

#include "patientsim/core/json.hpp"
#include "patientsim/error.hpp"

namespace patientsim::eval {

void TestCase::validate() const {
    if (is_blank(id)) throw ValidationError("testcase id must not be empty");
    if (is_blank(scenario_text)) throw ValidationError(fmt::format("testcase {}: scenario_text is empty", id));
    if (is_blank(counselor_message)) {
        throw ValidationError(fmt::format("testcase {}: counselor_message is empty", id));
    }
    for (const auto& p : principles) {
        if (is_blank(p)) throw ValidationError(fmt::format("testcase {}: blank principle", id));
    }
    validate_transcript(history, false);
}

simulator::GenerationContext to_context(const TestCase& tc) {
    simulator::GenerationContext ctx;
    ctx.scenario.id = tc.id;
    ctx.scenario.scenario_text = tc.scenario_text;
    for (std::size_t i = 0; i < tc.principles.size(); ++i) {
        ctx.constitution.principles.push_back(
            {fmt::format("p{}", i + 1), tc.principles[i], PrincipleOrigin::manual, std::nullopt, false, {}});
    }
    ctx.constitution.version = tc.principles.empty() ? 0 : 1;
    ctx.history = tc.history;
    ctx.counselor_message = tc.counselor_message;
    return ctx;
}

std::vector<TestCase> parse_testcases(const json& j) {
    if (!j.is_array()) throw ValidationError("testcase file must hold a JSON array");
    std::vector<TestCase> cases;
    std::set<std::string> seen;
    for (const auto& item : j) {
        TestCase tc;
        try {
            tc = item.get<TestCase>();
        } catch (const json::exception& e) {
            throw ValidationError(fmt::format("malformed testcase: {}", e.what()));
        }
        tc.validate();
        if (!seen.insert(tc.id).second) throw ValidationError(fmt::format("duplicate testcase id {}", tc.id));
        cases.push_back(std::move(tc));
    }
    return cases;
}

std::vector<TestCase> load_testcases(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(fmt::format("cannot read {}", path.string()));
    auto j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ValidationError(fmt::format("{} is not valid JSON", path.string()));
    return parse_testcases(j);
}

std::vector<TestCase> testcases_from_export(const json& exported, CaseCategory category) {
    auto session_id = exported.at("session_id").get<std::string>();
    auto scenario = exported.at("scenario_text").get<std::string>();
    auto principles = exported.at("principles").get<std::vector<std::string>>();
    auto transcript = exported.at("transcript").get<std::vector<DialogueTurn>>();

    std::vector<TestCase> out;
    for (std::size_t i = 0; i < transcript.size(); ++i) {
        if (transcript[i].role != Role::counselor) continue;
        TestCase tc;
        tc.id = fmt::format("{}-{}", session_id, transcript[i].turn_index);
        tc.scenario_text = scenario;
        tc.principles = principles;
        tc.history.assign(transcript.begin(), transcript.begin() + static_cast<std::ptrdiff_t>(i));
        tc.counselor_message = transcript[i].text;
        tc.category = category;
        out.push_back(std::move(tc));
    }
    return out;
}

std::string_view to_string(CaseCategory c) { return c == CaseCategory::error ? "error" : "random"; }

void to_json(json& j, CaseCategory v) { j = std::string(to_string(v)); }

void from_json(const json& j, CaseCategory& v) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "error") {
        v = CaseCategory::error;
    } else if (s == "random") {
        v = CaseCategory::random;
    } else {
        throw ValidationError(fmt::format("unknown testcase category '{}'", s));
    }
}

void to_json(json& j, const TestCase& v) {
    j = json{{"id", v.id},
             {"scenario_text", v.scenario_text},
             {"principles", v.principles},
             {"history", v.history},
             {"counselor_message", v.counselor_message},
             {"category", v.category}};
}

void from_json(const json& j, TestCase& v) {
    v.id = j.at("id").get<std::string>();
    v.scenario_text = j.at("scenario_text").get<std::string>();
    v.principles = jsonio::get_or(j, "principles", std::vector<std::string>{});
    v.history.clear();
    if (auto h = j.find("history"); h != j.end() && !h->is_null()) {
        int next = 0;
        for (const auto& t : *h) {
            DialogueTurn turn;
            turn.turn_index = t.contains("turn_index") ? t.at("turn_index").get<int>() : next;
            turn.role = t.at("role").get<Role>();
            turn.text = t.at("text").get<std::string>();
            turn.constitution_version = jsonio::get_optional<std::int64_t>(t, "constitution_version");
            turn.trace_id = jsonio::get_optional<std::string>(t, "trace_id");
            next = turn.turn_index + 1;
            v.history.push_back(std::move(turn));
        }
    }
    v.counselor_message = j.at("counselor_message").get<std::string>();
    v.category = jsonio::get_or(j, "category", CaseCategory::random);
}

}  // namespace patientsim::eval
