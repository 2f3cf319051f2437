// Runs pipeline variants over frozen testcases and writes run.json.
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "patientsim/core/json.hpp"
#include "patientsim/eval/runner.hpp"
#include "patientsim/llm/gateway.hpp"
#include "provider_option.hpp"

using namespace patientsim;

int main(int argc, char** argv) {
    CLI::App app{"Generate variant responses for evaluation testcases"};
    std::string cases_path;
    std::string variants = "full,naive,no_principle_rewrites,no_autogenerated_criteria,no_critique";
    std::string provider_spec;
    std::optional<std::string> config_path;
    std::string out_dir;
    std::size_t workers = 4;
    std::optional<std::uint64_t> seed;
    app.add_option("--cases", cases_path, "JSON array of testcases")->required();
    app.add_option("--variants", variants, "Comma-separated pipeline variants")->capture_default_str();
    app.add_option("--provider", provider_spec, "scripted:FIXTURE or live")->required();
    app.add_option("--config", config_path, "Provider config JSON");
    app.add_option("--out", out_dir, "Output directory")->required();
    app.add_option("--workers", workers, "Parallel testcases")->capture_default_str()->check(CLI::Range(1, 64));
    app.add_option("--seed", seed, "Seed for trace ids");
    CLI11_PARSE(app, argc, argv);

    try {
        auto cases = eval::load_testcases(cases_path);
        auto variant_list = parse_variant_list(variants);
        auto config = llm::load_provider_config(config_path ? std::optional<std::filesystem::path>(*config_path)
                                                            : std::nullopt);
        auto provider = tools::make_provider(provider_spec, config);

        SystemClock clock;
        auto ids = seed ? std::make_unique<IdGenerator>(*seed) : std::make_unique<IdGenerator>();
        llm::Gateway gateway(*provider, clock);
        simulator::Simulator sim(gateway, config.routing, *ids);

        auto run = eval::run_testcases(cases, variant_list, sim, {workers});
        std::filesystem::create_directories(out_dir);
        std::ofstream(std::filesystem::path(out_dir) / "run.json") << nlohmann::json(run).dump(2) << '\n';

        std::size_t auto_ranked = 0;
        for (const auto& set : run.candidate_sets()) auto_ranked += set.auto_ranked ? 1 : 0;
        std::cout << fmt::format("{} testcases, {} failed, {} auto-ranked\n", run.cases.size(), run.failures(),
                                 auto_ranked);
        return run.failures() == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return tools::exit_code_for(e, 2);
    }
}
