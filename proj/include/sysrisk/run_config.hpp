#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sysrisk/covariance.hpp"
#include "sysrisk/panel.hpp"
#include "sysrisk/risk_game.hpp"

namespace sysrisk {

enum class LambdaPolicy {
    Default,  ///< 2 sqrt(ln p / n) with p the institutions active in the window
    Fixed,
};

struct RunConfig {
    std::string input;
    std::vector<std::string> safe;
    std::vector<std::string> distressed;
    double tau1 = 0.05;
    double tau2 = 0.05;
    double delta = 1.0;
    std::size_t window = 26;
    LambdaPolicy lambda_policy = LambdaPolicy::Default;
    double lambda = 0.0;
    GlassoScale scale = GlassoScale::Covariance;
    Frequency frequency = Frequency::Weekly;
    std::vector<double> weights;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    std::string annotations;
    bool normalize = false;
    unsigned threads = 0;  ///< window workers; 0 = hardware concurrency
    std::size_t max_players = kDefaultPlayerCap;

    /// Checks values that do not need the input header. Throws ConfigError.
    void validate() const;
    RiskConfig risk() const;
    EstimatorConfig estimator(std::size_t p) const;
};

using Setting = std::pair<std::string, std::string>;

/// Flat `key = value` lines; `#` starts a comment. Throws ConfigError with the line.
std::vector<Setting> parse_settings(std::istream& in);
std::vector<Setting> parse_settings_file(const std::string& path);

/// Applies one setting; keys are the long CLI flag names (input, safe, distressed,
/// tau1, tau2, delta, window, lambda, scale, frequency, weights, out, seed,
/// annotations, normalize, threads, max_players). Throws ConfigError.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Settings applied in order, so later ones (command-line flags) win.
RunConfig make_run_config(const std::vector<Setting>& settings);

/// Comma-separated list with surrounding blanks trimmed; empty items rejected.
std::vector<std::string> split_list(std::string_view text);

}  // namespace sysrisk
