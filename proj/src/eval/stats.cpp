#include "patientsim/eval/stats.hpp"

#include <cmath>
#include <map>

#include <fmt/format.h>

#include "patientsim/error.hpp"

namespace patientsim::eval {

std::string_view to_string(Outcome o) {
    switch (o) {
    case Outcome::win: return "win";
    case Outcome::tie: return "tie";
    case Outcome::loss: return "loss";
    }
    return "tie";
}

Outcome pairwise_outcome(int rank_variant, int rank_baseline) {
    if (rank_variant < rank_baseline) return Outcome::win;
    if (rank_variant == rank_baseline) return Outcome::tie;
    return Outcome::loss;
}

Outcome awkward_outcome(bool variant_awkward, bool baseline_awkward) {
    if (variant_awkward == baseline_awkward) return Outcome::tie;
    return variant_awkward ? Outcome::loss : Outcome::win;
}

Outcome majority_vote(std::span<const Outcome> outcomes) {
    if (outcomes.empty()) throw ValidationError("majority vote over no outcomes");
    std::size_t counts[3] = {0, 0, 0};
    for (auto o : outcomes) ++counts[static_cast<int>(o)];
    for (auto o : {Outcome::win, Outcome::tie, Outcome::loss}) {
        if (2 * counts[static_cast<int>(o)] > outcomes.size()) return o;
    }
    return Outcome::tie;
}

double round_to(double value, int decimals) {
    double scale = std::pow(10.0, decimals);
    return std::round(value * scale) / scale;
}

namespace {

// Records grouped by testcase, skipping auto-ranked ones when asked.
std::map<std::string, std::vector<const AnnotationRecord*>> by_case(std::span<const AnnotationRecord> records,
                                                                    const StatsOptions& options) {
    std::map<std::string, std::vector<const AnnotationRecord*>> out;
    for (const auto& r : records) {
        if (r.auto_ranked && !options.include_auto_ranked) continue;
        out[r.testcase_id].push_back(&r);
    }
    return out;
}

double pct(std::size_t part, std::size_t whole) {
    return whole == 0 ? 0.0 : round_to(100.0 * static_cast<double>(part) / static_cast<double>(whole), 1);
}

}  // namespace

WinTieLoss win_tie_loss_table(std::span<const AnnotationRecord> records, PipelineVariant variant, Metric metric,
                              const StatsOptions& options) {
    WinTieLoss row;
    row.variant = variant;
    row.metric = metric;
    for (const auto& [testcase, recs] : by_case(records, options)) {
        std::vector<Outcome> outcomes;
        for (const auto* r : recs) {
            if (metric == Metric::m2_awkwardness) {
                auto v = r->m2_awkward.find(variant);
                auto b = r->m2_awkward.find(options.baseline);
                if (v == r->m2_awkward.end() || b == r->m2_awkward.end()) continue;
                outcomes.push_back(awkward_outcome(v->second, b->second));
            } else {
                const auto& ranks = r->ranks(metric);
                auto v = ranks.find(variant);
                auto b = ranks.find(options.baseline);
                if (v == ranks.end() || b == ranks.end()) continue;
                outcomes.push_back(pairwise_outcome(v->second, b->second));
            }
        }
        if (outcomes.empty()) continue;
        switch (majority_vote(outcomes)) {
        case Outcome::win: ++row.wins; break;
        case Outcome::tie: ++row.ties; break;
        case Outcome::loss: ++row.losses; break;
        }
    }
    row.win_pct = pct(row.wins, row.n_cases());
    row.tie_pct = pct(row.ties, row.n_cases());
    row.loss_pct = pct(row.losses, row.n_cases());
    return row;
}

AwkwardRate awkward_rate(std::span<const AnnotationRecord> records, PipelineVariant variant,
                         const StatsOptions& options) {
    AwkwardRate rate;
    rate.variant = variant;
    for (const auto& [testcase, recs] : by_case(records, options)) {
        std::size_t flagged = 0;
        std::size_t judged = 0;
        for (const auto* r : recs) {
            auto it = r->m2_awkward.find(variant);
            if (it == r->m2_awkward.end()) continue;
            ++judged;
            if (it->second) ++flagged;
        }
        if (judged == 0) continue;
        ++rate.n_cases;
        if (2 * flagged > judged) ++rate.awkward_cases;
    }
    rate.pct = pct(rate.awkward_cases, rate.n_cases);
    return rate;
}

}  // namespace patientsim::eval
