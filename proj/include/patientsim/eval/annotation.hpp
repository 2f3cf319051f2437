#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "patientsim/eval/runner.hpp"

namespace patientsim::eval {

enum class Metric { m1_consistency, m2_awkwardness, m3_principle_adherence, overall };

inline constexpr std::array<Metric, 4> kAllMetrics = {Metric::m1_consistency, Metric::m2_awkwardness,
                                                      Metric::m3_principle_adherence, Metric::overall};

// m1 / m2 / m3 / overall
std::string_view to_string(Metric m);
Metric parse_metric(std::string_view s);

// One annotator's judgement of one testcase, already mapped back from the
// blinded labels to variants. Rank 1 is best; ties are allowed.
struct AnnotationRecord {
    std::string annotator_id;
    std::string testcase_id;
    std::map<PipelineVariant, int> m1_ranks;
    std::map<PipelineVariant, int> m3_ranks;
    std::map<PipelineVariant, bool> m2_awkward;
    std::map<PipelineVariant, int> overall_ranks;
    std::string rationale;
    bool auto_ranked = false;  // synthesized for an all-identical case

    const std::map<PipelineVariant, int>& ranks(Metric m) const;  // not for m2
    void validate(std::span<const PipelineVariant> variants) const;
    bool operator==(const AnnotationRecord&) const = default;
};

inline constexpr std::string_view kAutoRankAnnotator = "auto-rank";
inline constexpr int kAnnotationSchemaVersion = 1;

// Rank 1 for every variant in every rank metric, nothing awkward.
AnnotationRecord auto_annotation(const CandidateSet& set);

// Files written for annotators (bundle) and kept back for ingestion (key).
struct AnnotationBundle {
    nlohmann::json bundle;
    nlohmann::json key;
};

// Per-case presentation order is a permutation of the unique responses drawn
// from a generator seeded by (seed, testcase id), so a case's order does not
// depend on which other cases are present. Responses are labelled A, B, ...
// in presentation order. Auto-ranked and failed cases are left out of the
// bundle and listed in the key.
AnnotationBundle export_bundle(const RunResult& run, std::uint64_t seed);

// Presentation order (indices into unique_responses) for one case.
std::vector<std::size_t> presentation_order(const std::string& testcase_id, std::size_t n, std::uint64_t seed);

void write_bundle(const AnnotationBundle& b, const std::filesystem::path& dir);

// Parses one annotator file against the key. Ranks are given per label and
// fanned out to every variant sharing that response. Throws ValidationError
// on a schema mismatch, unknown case or label, or missing rank.
std::vector<AnnotationRecord> ingest_annotations(const nlohmann::json& file, const nlohmann::json& key);

// Every *.json file in `dir` except key.json and bundle.json, plus an
// auto-rank record for each auto-ranked case in the key.
std::vector<AnnotationRecord> load_annotation_dir(const std::filesystem::path& dir, const nlohmann::json& key);

void to_json(nlohmann::json& j, const AnnotationRecord& v);
void from_json(const nlohmann::json& j, AnnotationRecord& v);

}  // namespace patientsim::eval
