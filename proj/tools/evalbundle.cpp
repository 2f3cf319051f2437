// Writes a blinded annotation bundle and its key from run.json.
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "patientsim/error.hpp"
#include "patientsim/eval/annotation.hpp"

using namespace patientsim;

int main(int argc, char** argv) {
    CLI::App app{"Export an annotation bundle"};
    std::string run_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    app.add_option("--run", run_path, "run.json written by evalrun")->required();
    app.add_option("--seed", seed, "Presentation order seed")->required();
    app.add_option("--out", out_dir, "Output directory")->required();
    CLI11_PARSE(app, argc, argv);

    try {
        std::ifstream in(run_path);
        if (!in) throw ValidationError("cannot read " + run_path);
        auto j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded()) throw ValidationError(run_path + " is not valid JSON");
        eval::RunResult run;
        try {
            run = j.get<eval::RunResult>();
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(e.what());
        }
        auto bundle = eval::export_bundle(run, seed);
        eval::write_bundle(bundle, out_dir);
        std::cout << fmt::format("{} cases for annotation, {} auto-ranked, {} failed\n",
                                 bundle.bundle.at("cases").size(), bundle.key.at("auto_ranked").size(),
                                 bundle.key.at("failed").size());
        return 0;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 3;
    }
}
