#include "sysrisk/run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include "sysrisk/errors.hpp"

namespace sysrisk {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size() || !std::isfinite(v)) {
        throw ConfigError("'" + key + "' expects a number, got '" + value + "'");
    }
    return v;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    const auto r = std::from_chars(value.data(), value.data() + value.size(), v);
    if (value.empty() || r.ec != std::errc{} || r.ptr != value.data() + value.size()) {
        throw ConfigError("'" + key + "' expects a nonnegative integer, got '" + value + "'");
    }
    return v;
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no") {
        return false;
    }
    throw ConfigError("'" + key + "' expects true or false, got '" + value + "'");
}

}  // namespace

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    if (trim(text).empty()) {
        return out;
    }
    std::size_t start = 0;
    for (;;) {
        const auto comma = text.find(',', start);
        const auto item = trim(text.substr(start, comma == std::string_view::npos ? comma : comma - start));
        if (item.empty()) {
            throw ConfigError("empty item in list '" + std::string(text) + "'");
        }
        out.emplace_back(item);
        if (comma == std::string_view::npos) {
            return out;
        }
        start = comma + 1;
    }
}

void RunConfig::validate() const {
    if (window < 2) {
        throw ConfigError("window must be at least 2");
    }
    if (lambda_policy == LambdaPolicy::Fixed && !(lambda >= 0.0)) {
        throw ConfigError("lambda must be nonnegative");
    }
    if (safe.empty() || distressed.empty()) {
        throw ConfigError("both --safe and --distressed must name at least one institution");
    }
    std::set<std::string> seen;
    for (const auto* set : {&safe, &distressed}) {
        for (const auto& name : *set) {
            if (!seen.insert(name).second) {
                throw ConfigError("institution '" + name + "' is listed twice");
            }
        }
    }
    risk().validate(safe.size());
}

RiskConfig RunConfig::risk() const {
    RiskConfig r;
    r.tau1 = tau1;
    r.tau2 = tau2;
    r.delta = delta;
    r.weights = weights;
    return r;
}

EstimatorConfig RunConfig::estimator(std::size_t p) const {
    EstimatorConfig e;
    e.lambda = lambda_policy == LambdaPolicy::Fixed ? lambda : default_lambda(p, window);
    e.scale = scale;
    return e;
}

std::vector<Setting> parse_settings(std::istream& in) {
    std::vector<Setting> out;
    std::string line;
    for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) {
            view = view.substr(0, hash);
        }
        view = trim(view);
        if (view.empty()) {
            continue;
        }
        const auto eq = view.find('=');
        if (eq == std::string_view::npos || trim(view.substr(0, eq)).empty()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        out.emplace_back(std::string(trim(view.substr(0, eq))), std::string(trim(view.substr(eq + 1))));
    }
    return out;
}

std::vector<Setting> parse_settings_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    try {
        return parse_settings(in);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "input") {
        cfg.input = value;
    } else if (key == "safe") {
        cfg.safe = split_list(value);
    } else if (key == "distressed") {
        cfg.distressed = split_list(value);
    } else if (key == "tau1") {
        cfg.tau1 = to_double(key, value);
    } else if (key == "tau2") {
        cfg.tau2 = to_double(key, value);
    } else if (key == "delta") {
        cfg.delta = to_double(key, value);
    } else if (key == "window") {
        cfg.window = to_unsigned(key, value);
    } else if (key == "lambda") {
        if (value == "default") {
            cfg.lambda_policy = LambdaPolicy::Default;
        } else {
            cfg.lambda_policy = LambdaPolicy::Fixed;
            cfg.lambda = to_double(key, value);
        }
    } else if (key == "scale") {
        if (value == "covariance") {
            cfg.scale = GlassoScale::Covariance;
        } else if (value == "correlation") {
            cfg.scale = GlassoScale::Correlation;
        } else {
            throw ConfigError("'scale' expects covariance or correlation, got '" + value + "'");
        }
    } else if (key == "frequency") {
        if (value == "weekly") {
            cfg.frequency = Frequency::Weekly;
        } else if (value == "daily") {
            cfg.frequency = Frequency::Daily;
        } else {
            throw ConfigError("'frequency' expects weekly or daily, got '" + value + "'");
        }
    } else if (key == "weights") {
        cfg.weights.clear();
        for (const auto& w : split_list(value)) {
            cfg.weights.push_back(to_double(key, w));
        }
    } else if (key == "out") {
        cfg.out_dir = value;
    } else if (key == "seed") {
        cfg.seed = to_unsigned(key, value);
    } else if (key == "annotations") {
        cfg.annotations = value;
    } else if (key == "normalize") {
        cfg.normalize = to_bool(key, value);
    } else if (key == "threads") {
        cfg.threads = static_cast<unsigned>(to_unsigned(key, value));
    } else if (key == "max_players") {
        cfg.max_players = to_unsigned(key, value);
    } else {
        throw ConfigError("unknown setting '" + key + "'");
    }
}

RunConfig make_run_config(const std::vector<Setting>& settings) {
    RunConfig cfg;
    for (const auto& [key, value] : settings) {
        apply_setting(cfg, key, value);
    }
    return cfg;
}

}  // namespace sysrisk
