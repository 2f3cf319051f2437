#pragma once

#include <random>
#include <string_view>
#include <vector>

#include "patientsim/eval/annotation.hpp"
#include "patientsim/eval/krippendorff.hpp"
#include "patientsim/eval/stats.hpp"

namespace patientsim::fixtures {

// Alpha from the pairwise definition: every ordered pair of values within a
// unit, weighted 1/(m_u - 1), against every ordered pair of pooled values.
// No coincidence matrix involved. Throws std::domain_error when undefined.
double brute_force_alpha(const eval::RatingMatrix& ratings, eval::Level level);

// Krippendorff's textbook reliability data: 12 units, 4 observers, values
// 1..5 with gaps. Nominal 0.743, ordinal 0.815 (cross-checked externally).
eval::RatingMatrix canonical_reliability_data();

// Random items x annotators matrix with values in [1, max_value] and roughly
// `missing` of the cells left empty.
eval::RatingMatrix random_matrix(std::mt19937_64& rng, std::size_t items, std::size_t annotators, int max_value,
                                 double missing);

// Majority result for every (a1, a2, a3) outcome triple, enumerated with
// win < tie < loss and the first annotator varying slowest. W/T/L letters.
inline constexpr std::string_view kMajorityTable = "WWWWTTWTLWTTTTTTTLWTLTTLLLL";

// Three annotators per case ranking every variant. Full vs NoCritique on all
// rank metrics: win cases vote (W, W, T), tie cases (W, T, L), loss cases
// (L, L, W). Other variants sit at rank 3.
std::vector<eval::AnnotationRecord> majority_fixture(std::size_t wins, std::size_t ties, std::size_t losses);

// n_cases cases, three annotators each. Full is flagged awkward by two of
// three annotators in the first `majority` cases and by one annotator in the
// next `minority` cases.
std::vector<eval::AnnotationRecord> awkward_fixture(std::size_t n_cases, std::size_t majority, std::size_t minority);

}  // namespace patientsim::fixtures
