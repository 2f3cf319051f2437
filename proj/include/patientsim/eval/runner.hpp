#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "patientsim/eval/testcase.hpp"
#include "patientsim/simulator/simulator.hpp"

namespace patientsim::eval {

// Variant responses for one testcase, with identical texts collapsed.
struct CandidateSet {
    std::string testcase_id;
    std::map<PipelineVariant, std::string> responses;
    std::vector<std::string> unique_responses;  // first-seen order over kAllVariants
    std::map<PipelineVariant, std::size_t> membership;
    bool auto_ranked = false;  // exactly one distinct response

    // Texts are compared byte for byte.
    static CandidateSet deduplicate(std::string testcase_id, const std::map<PipelineVariant, std::string>& responses);

    // responses rebuilt from unique_responses and membership.
    std::map<PipelineVariant, std::string> reconstruct() const;

    void validate() const;
    bool operator==(const CandidateSet&) const = default;
};

struct CaseResult {
    TestCase testcase;
    std::optional<CandidateSet> candidates;  // absent when the case failed
    std::map<PipelineVariant, RefinementTrace> traces;
    std::optional<std::string> error;
};

struct RunOptions {
    std::size_t workers = 4;
};

struct RunResult {
    std::vector<PipelineVariant> variants;
    std::vector<CaseResult> cases;  // same order as the input

    std::size_t failures() const;
    std::vector<CandidateSet> candidate_sets() const;
};

// Generates one base response per case and refines it under every variant,
// so the variants differ only by their refinement. A case whose base
// generation fails is recorded with its error and the run continues.
RunResult run_testcases(std::span<const TestCase> cases, std::span<const PipelineVariant> variants,
                        simulator::Simulator& simulator, const RunOptions& options = {});

void to_json(nlohmann::json& j, const CandidateSet& v);
void from_json(const nlohmann::json& j, CandidateSet& v);
void to_json(nlohmann::json& j, const CaseResult& v);
void from_json(const nlohmann::json& j, CaseResult& v);
void to_json(nlohmann::json& j, const RunResult& v);
void from_json(const nlohmann::json& j, RunResult& v);

}  // namespace patientsim::eval
