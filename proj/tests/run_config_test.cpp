#include <gtest/gtest.h>

#include <sstream>

#include "sysrisk/errors.hpp"
#include "sysrisk/run_config.hpp"

using namespace sysrisk;

TEST(Settings, ParsesKeyValueLines) {
    std::istringstream in(
        "# paper setup\n"
        "input = cds.csv\n"
        "safe=Germany\n"
        "distressed = Greece, Italy ,Spain   # three\n"
        "\n"
        "lambda = default\n"
        "window = 26\n");
    const auto settings = parse_settings(in);
    ASSERT_EQ(settings.size(), 5u);
    EXPECT_EQ(settings[2], (Setting{"distressed", "Greece, Italy ,Spain"}));
    const RunConfig cfg = make_run_config(settings);
    EXPECT_EQ(cfg.input, "cds.csv");
    EXPECT_EQ(cfg.safe, std::vector<std::string>{"Germany"});
    EXPECT_EQ(cfg.distressed, (std::vector<std::string>{"Greece", "Italy", "Spain"}));
    EXPECT_EQ(cfg.lambda_policy, LambdaPolicy::Default);
    EXPECT_NO_THROW(cfg.validate());
}

TEST(Settings, Defaults) {
    const RunConfig cfg;
    EXPECT_EQ(cfg.tau1, 0.05);
    EXPECT_EQ(cfg.tau2, 0.05);
    EXPECT_EQ(cfg.delta, 1.0);
    EXPECT_EQ(cfg.window, 26u);
    EXPECT_EQ(cfg.frequency, Frequency::Weekly);
    EXPECT_EQ(cfg.lambda_policy, LambdaPolicy::Default);
    EXPECT_NEAR(cfg.estimator(8).lambda, 0.5656094795310271, 1e-15);
}

TEST(Settings, LaterSettingsWin) {
    const RunConfig cfg = make_run_config(
        {{"tau1", "0.05"}, {"lambda", "0.3"}, {"frequency", "weekly"}, {"tau1", "0.01"}, {"frequency", "daily"}});
    EXPECT_EQ(cfg.tau1, 0.01);
    EXPECT_EQ(cfg.frequency, Frequency::Daily);
    EXPECT_EQ(cfg.lambda_policy, LambdaPolicy::Fixed);
    EXPECT_EQ(cfg.estimator(5).lambda, 0.3);
}

TEST(Settings, Errors) {
    std::istringstream no_eq("input cds.csv\n");
    try {
        parse_settings(no_eq);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
    }
    EXPECT_THROW(make_run_config({{"colour", "red"}}), ConfigError);
    EXPECT_THROW(make_run_config({{"tau1", "abc"}}), ConfigError);
    EXPECT_THROW(make_run_config({{"window", "-3"}}), ConfigError);
    EXPECT_THROW(make_run_config({{"frequency", "monthly"}}), ConfigError);
    EXPECT_THROW(make_run_config({{"normalize", "maybe"}}), ConfigError);
    EXPECT_THROW(make_run_config({{"distressed", "A,,B"}}), ConfigError);
    EXPECT_THROW(parse_settings_file("/nonexistent/run.cfg"), ConfigError);
}

TEST(Settings, Validation) {
    RunConfig cfg = make_run_config({{"safe", "A"}, {"distressed", "B,C"}});
    EXPECT_NO_THROW(cfg.validate());
    cfg.window = 1;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.window = 26;
    cfg.tau2 = 1.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.tau2 = 0.05;
    cfg.distressed = {"B", "A"};
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.distressed = {"B"};
    cfg.weights = {1.0, 1.0};
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.weights = {1.0};
    EXPECT_NO_THROW(cfg.validate());
    cfg.lambda_policy = LambdaPolicy::Fixed;
    cfg.lambda = -0.1;
    EXPECT_THROW(cfg.validate(), ConfigError);
}
