#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "lapo/config.hpp"
#include "lapo/errors.hpp"
#include "lapo/io.hpp"
#include "lapo/rng.hpp"

using namespace lapo;
using nlohmann::json;

namespace {

const std::string kDefaultConfig = std::string(LAPO_SOURCE_DIR) + "/configs/default.json";

std::string key_path_of(const json& j) {
    try {
        run_config_from_json(j);
    } catch (const ValidationError& e) {
        return e.key_path();
    }
    return "<no error>";
}

}  // namespace

TEST(RunConfig, BundledDefaultMatchesBuiltInDefaults) {
    RunConfig expected;
    expected.resolve();
    EXPECT_EQ(load_run_config(kDefaultConfig), expected);
    EXPECT_EQ(expected.discovery.episodes, 3);
    EXPECT_EQ(expected.discovery.rollouts_per_problem, 8);
    EXPECT_EQ(expected.discovery.max_generation_length, 4096);
    EXPECT_DOUBLE_EQ(expected.reward.alpha, 0.7);
    EXPECT_DOUBLE_EQ(expected.reward.beta, 0.8);
    EXPECT_EQ(expected.discovery.episodes * expected.discovery.steps_per_episode, 240);
}

TEST(RunConfig, RoundTripsThroughJson) {
    RunConfig cfg;
    cfg.seed = 123;
    cfg.guidance = GuidanceMode::Range;
    cfg.target_statistic = TargetStatistic::Minimum;
    cfg.reward.sigma_mode = SigmaProportional{0.2};
    cfg.internalization.episodes = 0;
    cfg.resolve();
    EXPECT_EQ(run_config_from_json(to_json(cfg)), cfg);
}

TEST(RunConfig, StageSeedsDeriveFromRunSeed) {
    RunConfig a, b;
    a.seed = 1;
    b.seed = 2;
    a.resolve();
    b.resolve();
    EXPECT_NE(a.discovery.seed, b.discovery.seed);
    EXPECT_NE(a.discovery.seed, a.internalization.seed);
    EXPECT_EQ(a.discovery.seed, stream_seed({1, stream::kStage, 1}));
}

TEST(RunConfig, RejectsUnknownKeysWithPath) {
    json j = to_json(RunConfig{});
    j["discovery"]["epochs"] = 3;
    EXPECT_EQ(key_path_of(j), "discovery.epochs");
    json top = to_json(RunConfig{});
    top["extra"] = true;
    EXPECT_EQ(key_path_of(top), "extra");
}

TEST(RunConfig, RejectsBadTypesAndValues) {
    json j = to_json(RunConfig{});
    j["reward"]["alpha"] = "high";
    EXPECT_EQ(key_path_of(j), "reward.alpha");

    json g = to_json(RunConfig{});
    g["guidance"] = "loud";
    EXPECT_EQ(key_path_of(g), "guidance");

    json v = to_json(RunConfig{});
    v["schema_version"] = 2;
    EXPECT_THROW(run_config_from_json(v), ConfigError);

    json missing = to_json(RunConfig{});
    missing.erase("schema_version");
    EXPECT_EQ(key_path_of(missing), "schema_version");

    json n = to_json(RunConfig{});
    n["discovery"]["rollouts_per_problem"] = 0;
    EXPECT_THROW(run_config_from_json(n), ConfigError);

    json s = to_json(RunConfig{});
    s["reward"]["sigma_mode"] = {{"kind", "fixed"}, {"tokens", 0}};
    EXPECT_THROW(run_config_from_json(s), ConfigError);

    json p = to_json(RunConfig{});
    p["policy"]["initial_length"] = 3500.0;
    EXPECT_THROW(run_config_from_json(p), ConfigError);
}

TEST(RunConfig, PartialDocumentsKeepDefaults) {
    const auto cfg = run_config_from_json(json{{"schema_version", 1}, {"seed", 9}});
    RunConfig expected;
    expected.seed = 9;
    expected.resolve();
    EXPECT_EQ(cfg, expected);
}

TEST(RunConfig, ParseErrorsCarryPosition) {
    try {
        parse_json_document("{\n  \"seed\": 7,\n  oops\n}", "config");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
    EXPECT_THROW(load_run_config("/nonexistent/config.json"), ConfigError);
}

TEST(RunConfig, DiffAndHash) {
    RunConfig a;
    a.resolve();
    RunConfig b = a;
    b.target_statistic = TargetStatistic::Mean;
    EXPECT_EQ(config_diff(a, b), std::vector<std::string>{"target_statistic"});
    EXPECT_NE(config_hash(a), config_hash(b));
    RunConfig c = a;
    c.output_dir = "elsewhere";
    EXPECT_EQ(config_hash(a), config_hash(c));
}

TEST(Bank, RoundTripAndValidation) {
    const auto bank = make_synthetic_bank(5, 40);
    ASSERT_EQ(bank.size(), 200u);
    EXPECT_EQ(bank.front().id, "l1-000");
    EXPECT_EQ(bank.back().benchmark_tag, "level5");
    EXPECT_EQ(bank_from_json(json::parse(bank_to_json_string(bank))), bank);

    const auto dup = json::parse(R"([{"id":"a","difficulty":1,"benchmark_tag":"t"},{"id":"a","difficulty":2,"benchmark_tag":"t"}])");
    EXPECT_THROW(bank_from_json(dup), ValidationError);
    const auto hard = json::parse(R"([{"id":"a","difficulty":6,"benchmark_tag":"t"}])");
    EXPECT_THROW(bank_from_json(hard), ValidationError);

    const auto path = std::filesystem::temp_directory_path() / "lapo_bank_roundtrip.json";
    save_bank(bank, path);
    EXPECT_EQ(load_bank(path), bank);
    std::filesystem::remove(path);
}

TEST(RolloutLog, RoundTrip) {
    RolloutLog log{{"abc123", 7}, {{"q1", 120, true, std::nullopt}, {"q2", 4096, false, 2168}}};
    std::stringstream buf;
    write_rollout_log(buf, log);
    EXPECT_EQ(read_rollout_log(buf), log);
    std::stringstream bad("{\"not\":\"a header\"}\n");
    EXPECT_THROW(read_rollout_log(bad), ValidationError);
}
