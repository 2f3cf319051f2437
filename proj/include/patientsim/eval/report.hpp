#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "patientsim/eval/krippendorff.hpp"
#include "patientsim/eval/stats.hpp"

namespace patientsim::eval {

struct AgreementCell {
    Metric metric = Metric::m1_consistency;
    PipelineVariant method = PipelineVariant::full;
    std::optional<AgreementScore> score;
    std::optional<std::string> error;  // when alpha is undefined
};

struct Report {
    StatsOptions options;
    Level level = Level::ordinal;
    std::vector<WinTieLoss> win_tie_loss;  // every non-baseline variant x metric
    std::vector<AwkwardRate> awkward;      // every variant
    std::vector<AgreementCell> agreement;  // every variant x metric
};

// Variants are taken from the records in canonical order.
Report build_report(std::span<const AnnotationRecord> records, std::span<const Metric> metrics, Level level,
                    const StatsOptions& options = {});

std::string render_text(const Report& r);
nlohmann::json render_json(const Report& r);
// One row per (variant, metric) with win/tie/loss, awkward rate and alpha.
std::string render_csv(const Report& r);

}  // namespace patientsim::eval
