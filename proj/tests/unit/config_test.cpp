#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include "patientsim/error.hpp"
#include "patientsim/llm/config.hpp"

using namespace patientsim;
using namespace patientsim::llm;

TEST(Routing, DefaultsFollowThePipelineSettings) {
    auto r = ModelRouting::defaults();
    EXPECT_EQ(r.settings(CallRole::kudos).model_id, "gpt-3.5-turbo-1106");
    EXPECT_EQ(r.settings(CallRole::critique).model_id, "gpt-3.5-turbo-1106");
    EXPECT_EQ(r.settings(CallRole::rewrite).model_id, "gpt-4-turbo-1106");
    EXPECT_DOUBLE_EQ(r.settings(CallRole::rewrite).temperature, 0.1);
    EXPECT_DOUBLE_EQ(r.settings(CallRole::simulator).temperature, 0.3);
    EXPECT_FALSE(r.settings(CallRole::simulator).json_mode);
    for (auto role : {CallRole::stage1, CallRole::stage2, CallRole::naive}) {
        EXPECT_EQ(r.settings(role).model_id, "gpt-4-turbo-1106");
        EXPECT_DOUBLE_EQ(r.settings(role).temperature, 0.7);
        EXPECT_TRUE(r.settings(role).json_mode);
    }
}

TEST(Config, FileThenEnvironment) {
    auto path = std::filesystem::temp_directory_path() / "patientsim_config_test.json";
    std::ofstream(path) << R"({"api_base": "http://localhost:9", "api_key": "file-key", "timeout_seconds": 5,
                              "roles": {"stage2": {"model_id": "local-model", "temperature": 0.2}}})";
    std::map<std::string, std::string> env = {{"PATIENTSIM_MODEL_SIMULATOR", "env-model"},
                                              {"PATIENTSIM_TEMPERATURE_SIMULATOR", "0.9"}};
    auto lookup = [&](const std::string& k) -> std::optional<std::string> {
        auto it = env.find(k);
        if (it == env.end()) return std::nullopt;
        return it->second;
    };
    auto cfg = load_provider_config(path, lookup);
    EXPECT_EQ(cfg.api_base, "http://localhost:9");
    EXPECT_EQ(cfg.api_key, "file-key");
    EXPECT_EQ(cfg.timeout.count(), 5);
    EXPECT_EQ(cfg.routing.settings(CallRole::stage2).model_id, "local-model");
    EXPECT_DOUBLE_EQ(cfg.routing.settings(CallRole::stage2).temperature, 0.2);
    EXPECT_TRUE(cfg.routing.settings(CallRole::stage2).json_mode);
    EXPECT_EQ(cfg.routing.settings(CallRole::simulator).model_id, "env-model");
    EXPECT_DOUBLE_EQ(cfg.routing.settings(CallRole::simulator).temperature, 0.9);

    env["PATIENTSIM_API_KEY"] = "env-key";
    EXPECT_EQ(load_provider_config(path, lookup).api_key, "env-key");
    std::filesystem::remove(path);
}

TEST(Config, OpenAiKeyIsTheFallback) {
    auto lookup = [](const std::string& k) -> std::optional<std::string> {
        if (k == "OPENAI_API_KEY") return "sk-test";
        return std::nullopt;
    };
    EXPECT_EQ(load_provider_config(std::nullopt, lookup).api_key, "sk-test");
}

TEST(Config, BadValuesAreRejected) {
    auto lookup = [](const std::string& k) -> std::optional<std::string> {
        if (k == "PATIENTSIM_TEMPERATURE_STAGE1") return "hot";
        return std::nullopt;
    };
    EXPECT_THROW(load_provider_config(std::nullopt, lookup), Error);
    EXPECT_THROW(parse_call_role("judge"), Error);
}
