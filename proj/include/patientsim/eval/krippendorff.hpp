#pragma once

#include <optional>
#include <span>
#include <vector>

#include "patientsim/eval/annotation.hpp"

namespace patientsim::eval {

enum class Level { nominal, ordinal };

std::string_view to_string(Level l);
Level parse_level(std::string_view s);

// ratings[item][annotator]; nullopt marks a missing rating.
using RatingMatrix = std::vector<std::vector<std::optional<int>>>;

struct AlphaResult {
    double alpha = 1.0;
    std::size_t n_items = 0;  // items with two or more ratings
    double observed_disagreement = 0;
    double expected_disagreement = 0;
};

// Coincidence-matrix alpha. Items with fewer than two ratings are dropped.
// Returns 1.0 when all pairable ratings share one value. Throws
// UndefinedAgreementError with fewer than two annotator columns or no
// pairable item.
AlphaResult krippendorff_alpha(const RatingMatrix& ratings, Level level);

struct AgreementScore {
    Metric metric = Metric::m1_consistency;
    PipelineVariant method = PipelineVariant::full;
    double alpha = 1.0;  // three decimals
    Level level = Level::ordinal;
    std::size_t n_items = 0;
};

// Alpha over the annotators' ratings of one method: ranks for m1/m3/overall,
// 0/1 for m2. Auto-ranked records are never included.
AgreementScore agreement(std::span<const AnnotationRecord> records, Metric metric, PipelineVariant method,
                         Level level);

}  // namespace patientsim::eval
