#include "patientsim/eval/runner.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "patientsim/core/json.hpp"
#include "patientsim/error.hpp"

namespace patientsim::eval {

CandidateSet CandidateSet::deduplicate(std::string testcase_id,
                                       const std::map<PipelineVariant, std::string>& responses) {
    CandidateSet set;
    set.testcase_id = std::move(testcase_id);
    set.responses = responses;
    for (auto variant : kAllVariants) {
        auto it = responses.find(variant);
        if (it == responses.end()) continue;
        auto pos = std::find(set.unique_responses.begin(), set.unique_responses.end(), it->second);
        if (pos == set.unique_responses.end()) {
            set.membership[variant] = set.unique_responses.size();
            set.unique_responses.push_back(it->second);
        } else {
            set.membership[variant] = static_cast<std::size_t>(pos - set.unique_responses.begin());
        }
    }
    set.auto_ranked = set.unique_responses.size() == 1;
    return set;
}

std::map<PipelineVariant, std::string> CandidateSet::reconstruct() const {
    std::map<PipelineVariant, std::string> out;
    for (const auto& [variant, index] : membership) out[variant] = unique_responses.at(index);
    return out;
}

void CandidateSet::validate() const {
    if (unique_responses.size() > kAllVariants.size()) throw ValidationError("more unique responses than variants");
    if (auto_ranked != (unique_responses.size() == 1)) {
        throw ValidationError("auto_ranked must hold exactly when there is one unique response");
    }
    if (reconstruct() != responses) throw ValidationError("membership does not reproduce the responses");
}

std::size_t RunResult::failures() const {
    return static_cast<std::size_t>(
        std::count_if(cases.begin(), cases.end(), [](const CaseResult& c) { return c.error.has_value(); }));
}

std::vector<CandidateSet> RunResult::candidate_sets() const {
    std::vector<CandidateSet> out;
    for (const auto& c : cases) {
        if (c.candidates) out.push_back(*c.candidates);
    }
    return out;
}

namespace {

CaseResult run_case(const TestCase& tc, std::span<const PipelineVariant> variants, simulator::Simulator& sim) {
    CaseResult result{tc, std::nullopt, {}, std::nullopt};
    try {
        auto ctx = to_context(tc);
        ctx.validate();
        llm::CallLog base_log;
        auto base = sim.generate_base(ctx, base_log);
        auto base_calls = base_log.records();

        std::map<PipelineVariant, std::string> responses;
        for (auto variant : variants) {
            llm::CallLog log;
            for (const auto& call : base_calls) log.append(call);
            auto reply = sim.refine(variant, ctx, base, log, sim.ids().next());
            responses[variant] = reply.text;
            result.traces[variant] = std::move(reply.trace);
        }
        result.candidates = CandidateSet::deduplicate(tc.id, responses);
    } catch (const std::exception& e) {
        result.error = e.what();
        result.traces.clear();
        spdlog::warn("testcase {} failed: {}", tc.id, e.what());
    }
    return result;
}

}  // namespace

RunResult run_testcases(std::span<const TestCase> cases, std::span<const PipelineVariant> variants,
                        simulator::Simulator& simulator, const RunOptions& options) {
    if (variants.empty()) throw ValidationError("at least one variant is required");
    RunResult run;
    run.variants.assign(variants.begin(), variants.end());
    run.cases.resize(cases.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cases.size(); i = next++) {
            run.cases[i] = run_case(cases[i], variants, simulator);
        }
    };
    std::size_t n = std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(cases.size(), 1));
    std::vector<std::jthread> pool;
    for (std::size_t i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    pool.clear();
    return run;
}

void to_json(nlohmann::json& j, const CandidateSet& v) {
    nlohmann::json responses = nlohmann::json::object();
    nlohmann::json membership = nlohmann::json::object();
    for (const auto& [variant, text] : v.responses) responses[std::string(to_string(variant))] = text;
    for (const auto& [variant, index] : v.membership) membership[std::string(to_string(variant))] = index;
    j = nlohmann::json{{"testcase_id", v.testcase_id},
                       {"responses", responses},
                       {"unique_responses", v.unique_responses},
                       {"membership", membership},
                       {"auto_ranked", v.auto_ranked}};
}

void from_json(const nlohmann::json& j, CandidateSet& v) {
    v.testcase_id = j.at("testcase_id").get<std::string>();
    v.responses.clear();
    v.membership.clear();
    for (const auto& [key, text] : j.at("responses").items()) v.responses[parse_variant(key)] = text.get<std::string>();
    v.unique_responses = j.at("unique_responses").get<std::vector<std::string>>();
    for (const auto& [key, index] : j.at("membership").items()) {
        v.membership[parse_variant(key)] = index.get<std::size_t>();
    }
    v.auto_ranked = j.at("auto_ranked").get<bool>();
    v.validate();
}

void to_json(nlohmann::json& j, const CaseResult& v) {
    nlohmann::json traces = nlohmann::json::object();
    for (const auto& [variant, trace] : v.traces) traces[std::string(to_string(variant))] = trace;
    j = nlohmann::json{{"testcase", v.testcase}, {"traces", traces}};
    jsonio::put(j, "candidates", v.candidates);
    jsonio::put(j, "error", v.error);
}

void from_json(const nlohmann::json& j, CaseResult& v) {
    v.testcase = j.at("testcase").get<TestCase>();
    v.candidates = jsonio::get_optional<CandidateSet>(j, "candidates");
    v.error = jsonio::get_optional<std::string>(j, "error");
    v.traces.clear();
    if (auto t = j.find("traces"); t != j.end() && !t->is_null()) {
        for (const auto& [key, trace] : t->items()) v.traces[parse_variant(key)] = trace.get<RefinementTrace>();
    }
}

void to_json(nlohmann::json& j, const RunResult& v) {
    j = nlohmann::json{{"variants", v.variants}, {"cases", v.cases}};
}

void from_json(const nlohmann::json& j, RunResult& v) {
    v.variants = j.at("variants").get<std::vector<PipelineVariant>>();
    v.cases = j.at("cases").get<std::vector<CaseResult>>();
}

}  // namespace patientsim::eval
