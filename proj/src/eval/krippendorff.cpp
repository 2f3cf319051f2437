#include "patientsim/eval/krippendorff.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>

#include "patientsim/error.hpp"
#include "patientsim/eval/stats.hpp"

namespace patientsim::eval {

std::string_view to_string(Level l) { return l == Level::nominal ? "nominal" : "ordinal"; }

Level parse_level(std::string_view s) {
    auto t = trim(s);
    if (t == "nominal") return Level::nominal;
    if (t == "ordinal") return Level::ordinal;
    throw ValidationError(fmt::format("unknown level '{}'", s));
}

AlphaResult krippendorff_alpha(const RatingMatrix& ratings, Level level) {
    std::size_t columns = 0;
    for (const auto& row : ratings) columns = std::max(columns, row.size());
    if (columns < 2) throw UndefinedAgreementError("agreement needs at least two annotators");

    std::vector<std::vector<int>> units;
    std::set<int> seen;
    for (const auto& row : ratings) {
        std::vector<int> values;
        for (const auto& v : row) {
            if (v) values.push_back(*v);
        }
        if (values.size() < 2) continue;
        seen.insert(values.begin(), values.end());
        units.push_back(std::move(values));
    }
    if (units.empty()) throw UndefinedAgreementError("no item has two or more ratings");

    std::vector<int> categories(seen.begin(), seen.end());
    const std::size_t k = categories.size();
    auto index_of = [&](int v) {
        return static_cast<std::size_t>(std::lower_bound(categories.begin(), categories.end(), v) -
                                        categories.begin());
    };

    // o[c][d]: coincidences of values c and d within units.
    std::vector<std::vector<double>> o(k, std::vector<double>(k, 0.0));
    for (const auto& values : units) {
        const double weight = 1.0 / static_cast<double>(values.size() - 1);
        for (std::size_t i = 0; i < values.size(); ++i) {
            for (std::size_t j = 0; j < values.size(); ++j) {
                if (i != j) o[index_of(values[i])][index_of(values[j])] += weight;
            }
        }
    }
    std::vector<double> marginal(k, 0.0);
    double n = 0;
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t d = 0; d < k; ++d) marginal[c] += o[c][d];
        n += marginal[c];
    }

    auto delta2 = [&](std::size_t c, std::size_t d) -> double {
        if (c == d) return 0.0;
        if (level == Level::nominal) return 1.0;
        auto [lo, hi] = std::minmax(c, d);
        double sum = 0;
        for (std::size_t g = lo; g <= hi; ++g) sum += marginal[g];
        sum -= (marginal[lo] + marginal[hi]) / 2.0;
        return sum * sum;
    };

    double observed = 0;
    double expected = 0;
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t d = 0; d < k; ++d) {
            double dist = delta2(c, d);
            observed += o[c][d] * dist;
            expected += marginal[c] * marginal[d] * dist;
        }
    }
    observed /= n;
    expected /= n * (n - 1);

    AlphaResult result;
    result.n_items = units.size();
    result.observed_disagreement = observed;
    result.expected_disagreement = expected;
    result.alpha = expected == 0.0 ? 1.0 : 1.0 - observed / expected;
    return result;
}

AgreementScore agreement(std::span<const AnnotationRecord> records, Metric metric, PipelineVariant method,
                         Level level) {
    std::map<std::string, std::size_t> annotator_column;
    std::map<std::string, std::size_t> item_row;
    for (const auto& r : records) {
        if (r.auto_ranked) continue;
        annotator_column.try_emplace(r.annotator_id, annotator_column.size());
        item_row.try_emplace(r.testcase_id, item_row.size());
    }
    RatingMatrix matrix(item_row.size(), std::vector<std::optional<int>>(annotator_column.size()));
    for (const auto& r : records) {
        if (r.auto_ranked) continue;
        std::optional<int> value;
        if (metric == Metric::m2_awkwardness) {
            if (auto it = r.m2_awkward.find(method); it != r.m2_awkward.end()) value = it->second ? 1 : 0;
        } else {
            const auto& ranks = r.ranks(metric);
            if (auto it = ranks.find(method); it != ranks.end()) value = it->second;
        }
        matrix[item_row[r.testcase_id]][annotator_column[r.annotator_id]] = value;
    }
    auto result = krippendorff_alpha(matrix, level);
    return AgreementScore{metric, method, round_to(result.alpha, 3), level, result.n_items};
}

}  // namespace patientsim::eval
