#include "patientsim/eval/annotation.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "patientsim/core/json.hpp"
#include "patientsim/error.hpp"

namespace patientsim::eval {

using nlohmann::json;

std::string_view to_string(Metric m) {
    switch (m) {
    case Metric::m1_consistency: return "m1";
    case Metric::m2_awkwardness: return "m2";
    case Metric::m3_principle_adherence: return "m3";
    case Metric::overall: return "overall";
    }
    return "m1";
}

Metric parse_metric(std::string_view s) {
    auto lower = trim(s);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "m1" || lower == "m1_consistency") return Metric::m1_consistency;
    if (lower == "m2" || lower == "m2_awkwardness") return Metric::m2_awkwardness;
    if (lower == "m3" || lower == "m3_principle_adherence") return Metric::m3_principle_adherence;
    if (lower == "overall") return Metric::overall;
    throw ValidationError(fmt::format("unknown metric '{}'", s));
}

const std::map<PipelineVariant, int>& AnnotationRecord::ranks(Metric m) const {
    switch (m) {
    case Metric::m1_consistency: return m1_ranks;
    case Metric::m3_principle_adherence: return m3_ranks;
    case Metric::overall: return overall_ranks;
    case Metric::m2_awkwardness: break;
    }
    throw ValidationError("awkwardness is a yes/no judgement, not a ranking");
}

void AnnotationRecord::validate(std::span<const PipelineVariant> variants) const {
    if (is_blank(annotator_id)) throw ValidationError("annotator_id must not be empty");
    if (is_blank(testcase_id)) throw ValidationError("testcase_id must not be empty");
    for (const auto* ranks : {&m1_ranks, &m3_ranks, &overall_ranks}) {
        for (const auto& [variant, rank] : *ranks) {
            if (rank < 1 || rank > 5) {
                throw ValidationError(fmt::format("{} / {}: rank {} for {} is outside 1..5", annotator_id,
                                                  testcase_id, rank, to_string(variant)));
            }
        }
        for (auto variant : variants) {
            if (!ranks->contains(variant)) {
                throw ValidationError(fmt::format("{} / {}: no rank for {}", annotator_id, testcase_id,
                                                  to_string(variant)));
            }
        }
    }
    for (auto variant : variants) {
        if (!m2_awkward.contains(variant)) {
            throw ValidationError(
                fmt::format("{} / {}: no awkwardness flag for {}", annotator_id, testcase_id, to_string(variant)));
        }
    }
}

AnnotationRecord auto_annotation(const CandidateSet& set) {
    AnnotationRecord r;
    r.annotator_id = std::string(kAutoRankAnnotator);
    r.testcase_id = set.testcase_id;
    for (const auto& [variant, _] : set.responses) {
        r.m1_ranks[variant] = 1;
        r.m3_ranks[variant] = 1;
        r.overall_ranks[variant] = 1;
        r.m2_awkward[variant] = false;
    }
    r.auto_ranked = true;
    return r;
}

std::vector<std::size_t> presentation_order(const std::string& testcase_id, std::size_t n, std::uint64_t seed) {
    // FNV-1a over the id, mixed with the seed through seed_seq.
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : testcase_id) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    std::mt19937_64 engine(seq);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), engine);
    return order;
}

namespace {

std::string label_for(std::size_t i) { return std::string(1, static_cast<char>('A' + i)); }

json presented_history(const std::vector<DialogueTurn>& history) {
    json out = json::array();
    for (const auto& t : history) {
        out.push_back({{"speaker", t.role == Role::counselor ? "Therapist" : "Patient"}, {"text", t.text}});
    }
    return out;
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(fmt::format("cannot read {}", path.string()));
    auto j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ValidationError(fmt::format("{} is not valid JSON", path.string()));
    return j;
}

void check_schema(const json& j, std::string_view what) {
    auto version = jsonio::get_or(j, "schema_version", -1);
    if (version != kAnnotationSchemaVersion) {
        throw ValidationError(fmt::format("{} has schema_version {}, expected {}", what, version,
                                          kAnnotationSchemaVersion));
    }
}

}  // namespace

AnnotationBundle export_bundle(const RunResult& run, std::uint64_t seed) {
    json cases = json::array();
    json key_cases = json::object();
    json auto_ranked = json::array();
    json failed = json::array();

    for (const auto& c : run.cases) {
        if (!c.candidates) {
            failed.push_back(c.testcase.id);
            continue;
        }
        const auto& set = *c.candidates;
        if (set.auto_ranked) {
            auto_ranked.push_back(set.testcase_id);
            continue;
        }
        auto order = presentation_order(set.testcase_id, set.unique_responses.size(), seed);
        json responses = json::array();
        json labels = json::object();
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            auto label = label_for(pos);
            responses.push_back({{"label", label}, {"text", set.unique_responses[order[pos]]}});
            json members = json::array();
            for (const auto& [variant, index] : set.membership) {
                if (index == order[pos]) members.push_back(variant);
            }
            labels[label] = members;
        }
        cases.push_back({{"testcase_id", set.testcase_id},
                         {"category", c.testcase.category},
                         {"scenario_text", c.testcase.scenario_text},
                         {"principles", c.testcase.principles},
                         {"history", presented_history(c.testcase.history)},
                         {"counselor_message", c.testcase.counselor_message},
                         {"responses", responses}});
        key_cases[set.testcase_id] = {{"labels", labels}};
    }

    AnnotationBundle b;
    b.bundle = {{"schema_version", kAnnotationSchemaVersion},
                {"seed", seed},
                {"metrics", {"m1", "m2_awkward", "m3", "overall"}},
                {"cases", cases}};
    b.key = {{"schema_version", kAnnotationSchemaVersion},
             {"seed", seed},
             {"variants", run.variants},
             {"cases", key_cases},
             {"auto_ranked", auto_ranked},
             {"failed", failed}};
    return b;
}

void write_bundle(const AnnotationBundle& b, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "bundle.json") << b.bundle.dump(2) << '\n';
    std::ofstream(dir / "key.json") << b.key.dump(2) << '\n';
}

std::vector<AnnotationRecord> ingest_annotations(const json& file, const json& key) {
    check_schema(file, "annotation file");
    check_schema(key, "key");
    auto annotator = file.at("annotator_id").get<std::string>();
    const auto& key_cases = key.at("cases");

    std::vector<AnnotationRecord> out;
    for (const auto& a : file.at("annotations")) {
        AnnotationRecord r;
        r.annotator_id = annotator;
        r.testcase_id = a.at("testcase_id").get<std::string>();
        if (!key_cases.contains(r.testcase_id)) {
            throw ValidationError(fmt::format("{}: testcase {} is not in the bundle", annotator, r.testcase_id));
        }
        const auto& labels = key_cases.at(r.testcase_id).at("labels");
        std::vector<PipelineVariant> present;

        auto fan_out = [&](const char* field, auto& target, auto convert) {
            const auto& given = a.at(field);
            for (const auto& [label, members] : labels.items()) {
                if (!given.contains(label)) {
                    throw ValidationError(
                        fmt::format("{} / {}: '{}' has no entry for {}", annotator, r.testcase_id, field, label));
                }
                for (const auto& m : members) target[m.template get<PipelineVariant>()] = convert(given.at(label));
            }
            for (const auto& [label, _] : given.items()) {
                if (!labels.contains(label)) {
                    throw ValidationError(
                        fmt::format("{} / {}: unknown label '{}'", annotator, r.testcase_id, label));
                }
            }
        };
        auto as_int = [](const json& v) { return v.get<int>(); };
        auto as_bool = [](const json& v) { return v.get<bool>(); };
        fan_out("m1", r.m1_ranks, as_int);
        fan_out("m3", r.m3_ranks, as_int);
        fan_out("overall", r.overall_ranks, as_int);
        fan_out("m2_awkward", r.m2_awkward, as_bool);
        r.rationale = jsonio::get_or<std::string>(a, "rationale", "");

        for (const auto& [_, members] : labels.items()) {
            for (const auto& m : members) present.push_back(m.get<PipelineVariant>());
        }
        r.validate(present);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<AnnotationRecord> load_annotation_dir(const std::filesystem::path& dir, const json& key) {
    check_schema(key, "key");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && entry.path().extension() == ".json" && name != "key.json" &&
            name != "bundle.json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    std::vector<AnnotationRecord> out;
    for (const auto& f : files) {
        auto records = ingest_annotations(read_json(f), key);
        out.insert(out.end(), records.begin(), records.end());
    }
    auto variants = key.at("variants").get<std::vector<PipelineVariant>>();
    for (const auto& id : key.at("auto_ranked")) {
        CandidateSet set;
        set.testcase_id = id.get<std::string>();
        for (auto v : variants) set.responses[v] = "";
        out.push_back(auto_annotation(set));
    }
    return out;
}

void to_json(json& j, const AnnotationRecord& v) {
    auto by_name = [](const auto& m) {
        json o = json::object();
        for (const auto& [variant, value] : m) o[std::string(to_string(variant))] = value;
        return o;
    };
    j = json{{"annotator_id", v.annotator_id},
             {"testcase_id", v.testcase_id},
             {"m1_ranks", by_name(v.m1_ranks)},
             {"m3_ranks", by_name(v.m3_ranks)},
             {"m2_awkward", by_name(v.m2_awkward)},
             {"overall_ranks", by_name(v.overall_ranks)},
             {"rationale", v.rationale},
             {"auto_ranked", v.auto_ranked}};
}

void from_json(const json& j, AnnotationRecord& v) {
    auto by_variant = [&](const char* key, auto& target) {
        target.clear();
        for (const auto& [name, value] : j.at(key).items()) {
            target[parse_variant(name)] = value.template get<typename std::decay_t<decltype(target)>::mapped_type>();
        }
    };
    v.annotator_id = j.at("annotator_id").get<std::string>();
    v.testcase_id = j.at("testcase_id").get<std::string>();
    by_variant("m1_ranks", v.m1_ranks);
    by_variant("m3_ranks", v.m3_ranks);
    by_variant("m2_awkward", v.m2_awkward);
    by_variant("overall_ranks", v.overall_ranks);
    v.rationale = jsonio::get_or<std::string>(j, "rationale", "");
    v.auto_ranked = jsonio::get_or(j, "auto_ranked", false);
}

}  // namespace patientsim::eval
