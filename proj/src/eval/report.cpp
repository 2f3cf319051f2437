#include "patientsim/eval/report.hpp"

#include <set>

#include <fmt/format.h>

#include "patientsim/core/json.hpp"
#include "patientsim/error.hpp"

namespace patientsim::eval {

using nlohmann::json;

namespace {

std::vector<PipelineVariant> variants_in(std::span<const AnnotationRecord> records) {
    std::set<PipelineVariant> present;
    for (const auto& r : records) {
        for (const auto& [v, _] : r.m1_ranks) present.insert(v);
    }
    std::vector<PipelineVariant> out;
    for (auto v : kAllVariants) {
        if (present.contains(v)) out.push_back(v);
    }
    return out;
}

const WinTieLoss* find_row(const Report& r, PipelineVariant v, Metric m) {
    for (const auto& w : r.win_tie_loss) {
        if (w.variant == v && w.metric == m) return &w;
    }
    return nullptr;
}

std::string alpha_text(const AgreementCell* c) {
    if (c == nullptr || !c->score) return "n/a";
    return fmt::format("{:.3f}", c->score->alpha);
}

}  // namespace

Report build_report(std::span<const AnnotationRecord> records, std::span<const Metric> metrics, Level level,
                    const StatsOptions& options) {
    Report report;
    report.options = options;
    report.level = level;
    for (auto v : variants_in(records)) {
        for (auto m : metrics) {
            if (v != options.baseline) report.win_tie_loss.push_back(win_tie_loss_table(records, v, m, options));
            AgreementCell cell{m, v, std::nullopt, std::nullopt};
            try {
                cell.score = agreement(records, m, v, level);
            } catch (const UndefinedAgreementError& e) {
                cell.error = e.what();
            }
            report.agreement.push_back(std::move(cell));
        }
        report.awkward.push_back(awkward_rate(records, v, options));
    }
    return report;
}

std::string render_text(const Report& r) {
    std::string out = fmt::format("Pairwise vs {} (majority vote{})\n", to_string(r.options.baseline),
                                  r.options.include_auto_ranked ? ", auto-ranked cases as ties" : "");
    out += fmt::format("{:<26} {:<8} {:>7} {:>7} {:>7} {:>5}\n", "variant", "metric", "win%", "tie%", "loss%", "n");
    for (const auto& w : r.win_tie_loss) {
        out += fmt::format("{:<26} {:<8} {:>7.1f} {:>7.1f} {:>7.1f} {:>5}\n", to_string(w.variant),
                           to_string(w.metric), w.win_pct, w.tie_pct, w.loss_pct, w.n_cases());
    }
    out += "\nAwkward responses (majority)\n";
    for (const auto& a : r.awkward) {
        out += fmt::format("{:<26} {:>6.1f}%  ({}/{})\n", to_string(a.variant), a.pct, a.awkward_cases, a.n_cases);
    }
    out += fmt::format("\nKrippendorff alpha ({})\n", to_string(r.level));
    for (const auto& c : r.agreement) {
        out += fmt::format("{:<26} {:<8} {:>7}\n", to_string(c.method), to_string(c.metric), alpha_text(&c));
    }
    return out;
}

json render_json(const Report& r) {
    json wtl = json::array();
    for (const auto& w : r.win_tie_loss) {
        wtl.push_back({{"variant", w.variant},
                       {"metric", to_string(w.metric)},
                       {"win", w.wins},
                       {"tie", w.ties},
                       {"loss", w.losses},
                       {"win_pct", w.win_pct},
                       {"tie_pct", w.tie_pct},
                       {"loss_pct", w.loss_pct}});
    }
    json awkward = json::array();
    for (const auto& a : r.awkward) {
        awkward.push_back(
            {{"variant", a.variant}, {"awkward_cases", a.awkward_cases}, {"n_cases", a.n_cases}, {"pct", a.pct}});
    }
    json alpha = json::array();
    for (const auto& c : r.agreement) {
        json cell{{"variant", c.method}, {"metric", to_string(c.metric)}, {"level", to_string(r.level)}};
        if (c.score) {
            cell["alpha"] = c.score->alpha;
            cell["n_items"] = c.score->n_items;
        } else {
            cell["alpha"] = nullptr;
            cell["error"] = c.error.value_or("");
        }
        alpha.push_back(cell);
    }
    return json{{"baseline", r.options.baseline},
                {"include_auto_ranked", r.options.include_auto_ranked},
                {"win_tie_loss", wtl},
                {"awkward", awkward},
                {"agreement", alpha}};
}

std::string render_csv(const Report& r) {
    std::string out = "variant,metric,win_pct,tie_pct,loss_pct,n_cases,awkward_pct,alpha\n";
    for (const auto& c : r.agreement) {
        const auto* w = find_row(r, c.method, c.metric);
        std::string awkward;
        for (const auto& a : r.awkward) {
            if (a.variant == c.method) awkward = fmt::format("{:.1f}", a.pct);
        }
        std::string alpha = c.score ? fmt::format("{:.3f}", c.score->alpha) : "";
        if (w) {
            out += fmt::format("{},{},{:.1f},{:.1f},{:.1f},{},{},{}\n", to_string(c.method), to_string(c.metric),
                               w->win_pct, w->tie_pct, w->loss_pct, w->n_cases(), awkward, alpha);
        } else {
            out += fmt::format("{},{},,,,,{},{}\n", to_string(c.method), to_string(c.metric), awkward, alpha);
        }
    }
    return out;
}

}  // namespace patientsim::eval
