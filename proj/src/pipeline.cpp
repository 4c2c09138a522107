#include "sysrisk/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "sysrisk/covariance.hpp"
#include "sysrisk/errors.hpp"

namespace sysrisk {
namespace {

std::size_t column_of(const ReturnPanel& panel, const std::string& name, const char* role) {
    const auto j = panel.find(name);
    if (!j) {
        throw ConfigError(std::string(role) + " institution '" + name + "' is not in the input header");
    }
    return *j;
}

WindowRow process_window(const PanelWindow& window, const RunConfig& cfg,
                         const std::vector<std::size_t>& safe_cols,
                         const std::vector<std::size_t>& distressed_cols) {
    WindowRow row;
    row.date = window.end_date();
    const ReturnPanel& panel = window.panel();
    auto active = [&](std::size_t col) {
        const auto& cols = window.columns();
        return std::find(cols.begin(), cols.end(), col) != cols.end();
    };

    std::vector<std::size_t> model_cols;
    std::vector<std::string> safe_names;
    std::vector<std::string> roster;
    for (std::size_t col : safe_cols) {
        if (!active(col)) {
            row.failure = "safe institution " + panel.institutions()[col] + " unavailable";
            return row;
        }
        model_cols.push_back(col);
        safe_names.push_back(panel.institutions()[col]);
    }
    for (std::size_t col : distressed_cols) {
        if (active(col)) {
            model_cols.push_back(col);
            roster.push_back(panel.institutions()[col]);
        }
    }
    if (roster.empty()) {
        row.failure = "no distressed institution available";
        return row;
    }

    try {
        Eigen::MatrixXd x(window.rows(), model_cols.size());
        std::vector<std::string> labels;
        for (std::size_t k = 0; k < model_cols.size(); ++k) {
            x.col(k) = panel.values().col(model_cols[k]).segment(window.first_row(), window.rows());
            labels.push_back(panel.institutions()[model_cols[k]]);
        }
        const GaussianModel model =
            fit_gaussian_model(sample_moments(x), labels, cfg.estimator(model_cols.size()));
        const auto part = InstitutionPartition::from_labels(labels, safe_names, roster);
        GameConfig game;
        game.risk = cfg.risk();
        game.max_players = cfg.max_players;
        game.threads = 1;
        const CoalitionTable table = build_table(model, part, game);
        row.result = attribute(table, row.date, roster);
        row.ok = true;
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        row.failure = e.what();
    }
    return row;
}

}  // namespace

std::size_t AttributionSeries::failed() const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [](const WindowRow& r) { return !r.ok; }));
}

double AttributionSeries::lookup(const WindowRow& row, const std::vector<double>& values,
                                 const std::string& name) {
    const auto& roster = row.result.roster;
    const auto it = std::find(roster.begin(), roster.end(), name);
    if (!row.ok || it == roster.end()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return values[static_cast<std::size_t>(it - roster.begin())];
}

ReturnPanel load_returns(const RunConfig& cfg) {
    if (cfg.input.empty()) {
        throw ConfigError("no input file given (--input or 'input' in the config file)");
    }
    const ReturnPanel levels = load_levels_file(cfg.input);
    return cfg.frequency == Frequency::Weekly ? log_returns(weekly_aggregate(levels))
                                              : log_returns(levels);
}

AttributionSeries run_rolling_attribution(const ReturnPanel& returns, const RunConfig& cfg) {
    cfg.validate();
    if (cfg.safe.size() + cfg.distressed.size() < 2) {
        throw ConfigError("W and D together must cover at least 2 institutions");
    }
    std::vector<std::size_t> safe_cols;
    std::vector<std::size_t> distressed_cols;
    for (const auto& name : cfg.safe) {
        safe_cols.push_back(column_of(returns, name, "safe"));
    }
    for (const auto& name : cfg.distressed) {
        distressed_cols.push_back(column_of(returns, name, "distressed"));
    }
    if (cfg.distressed.size() > cfg.max_players) {
        throw ConfigError("d = " + std::to_string(cfg.distressed.size()) +
                          " exceeds the distressed-set cap of " + std::to_string(cfg.max_players) +
                          " (2^d coalitions per window); raise max_players to proceed");
    }

    const std::vector<PanelWindow> windows = rolling_windows(returns, cfg.window);
    AttributionSeries series;
    series.distressed = cfg.distressed;
    series.rows.resize(windows.size());

    // Windows are independent; workers pull the next index and write their own slot.
    std::atomic<std::size_t> next{0};
    std::exception_ptr config_failure;
    std::atomic<bool> stop{false};
    auto work = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= windows.size() || stop) {
                return;
            }
            try {
                series.rows[k] = process_window(windows[k], cfg, safe_cols, distressed_cols);
            } catch (...) {
                if (!stop.exchange(true)) {
                    config_failure = std::current_exception();
                }
            }
        }
    };
    unsigned threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, windows.size()));
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(work);
        }
    }
    if (config_failure) {
        std::rethrow_exception(config_failure);
    }
    return series;
}

AttributionSeries run_rolling_attribution(const RunConfig& cfg) {
    return run_rolling_attribution(load_returns(cfg), cfg);
}

bool efficiency_holds(const AttributionSeries& series) {
    for (const auto& row : series.rows) {
        if (!row.ok) {
            continue;
        }
        const double sum = std::accumulate(row.result.shapley.begin(), row.result.shapley.end(), 0.0);
        if (std::fabs(sum - row.result.total) > 1e-10 * std::max(1.0, std::fabs(row.result.total))) {
            return false;
        }
    }
    return true;
}

}  // namespace sysrisk
