// Win/tie/loss, awkwardness and agreement over ingested annotations.
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "patientsim/error.hpp"
#include "patientsim/eval/report.hpp"

using namespace patientsim;

int main(int argc, char** argv) {
    CLI::App app{"Summarize expert annotations"};
    std::string dir;
    std::optional<std::string> key_path;
    std::string baseline = "no_critique";
    std::vector<std::string> metric_names;
    std::string level = "ordinal";
    bool exclude_auto = false;
    std::string format = "text";
    std::optional<std::string> out_path;
    app.add_option("--annotations", dir, "Directory of annotator files")->required();
    app.add_option("--key", key_path, "Bundle key (default: <annotations>/key.json)");
    app.add_option("--baseline", baseline, "Baseline variant")->capture_default_str();
    app.add_option("--metric", metric_names, "m1, m2, m3 or overall; repeatable (default all)");
    app.add_option("--level", level, "Alpha level")->check(CLI::IsMember({"nominal", "ordinal"}))->capture_default_str();
    app.add_flag("--exclude-auto-ranked", exclude_auto, "Leave all-identical cases out of percentages");
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json", "csv"}))->capture_default_str();
    app.add_option("--out", out_path, "Write to a file instead of stdout");
    CLI11_PARSE(app, argc, argv);

    try {
        std::filesystem::path key_file = key_path ? std::filesystem::path(*key_path)
                                                  : std::filesystem::path(dir) / "key.json";
        std::ifstream in(key_file);
        if (!in) throw ValidationError("cannot read " + key_file.string());
        auto key = nlohmann::json::parse(in, nullptr, false);
        if (key.is_discarded()) throw ValidationError(key_file.string() + " is not valid JSON");

        std::vector<eval::Metric> metrics;
        for (const auto& m : metric_names) metrics.push_back(eval::parse_metric(m));
        if (metrics.empty()) metrics.assign(eval::kAllMetrics.begin(), eval::kAllMetrics.end());

        eval::StatsOptions options{parse_variant(baseline), !exclude_auto};
        std::vector<eval::AnnotationRecord> records;
        try {
            records = eval::load_annotation_dir(dir, key);
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(e.what());
        }
        auto report = eval::build_report(records, metrics, eval::parse_level(level), options);

        std::string text = format == "json"  ? eval::render_json(report).dump(2) + "\n"
                           : format == "csv" ? eval::render_csv(report)
                                             : eval::render_text(report);
        if (out_path) {
            std::ofstream(*out_path) << text;
        } else {
            std::cout << text;
        }
        return 0;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 3;
    }
}
