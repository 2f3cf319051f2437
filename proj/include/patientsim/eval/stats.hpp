#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "patientsim/eval/annotation.hpp"

namespace patientsim::eval {

enum class Outcome { win, tie, loss };

std::string_view to_string(Outcome o);

// Rank 1 is best: a lower rank wins.
Outcome pairwise_outcome(int rank_variant, int rank_baseline);

// Awkwardness comparison: not awkward beats awkward.
Outcome awkward_outcome(bool variant_awkward, bool baseline_awkward);

// The label held by more than half of the outcomes, otherwise Tie. Throws
// ValidationError on an empty list.
Outcome majority_vote(std::span<const Outcome> outcomes);

struct StatsOptions {
    PipelineVariant baseline = PipelineVariant::no_critique;
    bool include_auto_ranked = true;  // auto-ranked cases count as Tie
};

struct WinTieLoss {
    PipelineVariant variant = PipelineVariant::full;
    Metric metric = Metric::m1_consistency;
    std::size_t wins = 0;
    std::size_t ties = 0;
    std::size_t losses = 0;
    // Percentages of n_cases, rounded to one decimal.
    double win_pct = 0;
    double tie_pct = 0;
    double loss_pct = 0;

    std::size_t n_cases() const { return wins + ties + losses; }
};

// Per testcase, every annotator's outcome for variant vs baseline is reduced
// by majority vote; the case outcomes are then counted.
WinTieLoss win_tie_loss_table(std::span<const AnnotationRecord> records, PipelineVariant variant, Metric metric,
                              const StatsOptions& options = {});

struct AwkwardRate {
    PipelineVariant variant = PipelineVariant::full;
    std::size_t awkward_cases = 0;
    std::size_t n_cases = 0;
    double pct = 0;  // one decimal
};

// A case is awkward when a strict majority of its annotators flagged it.
AwkwardRate awkward_rate(std::span<const AnnotationRecord> records, PipelineVariant variant,
                         const StatsOptions& options = {});

double round_to(double value, int decimals);

}  // namespace patientsim::eval
