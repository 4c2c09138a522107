// sysrisk: summary statistics, rolling SCoES attribution, oracle validation, charts.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sysrisk/errors.hpp"
#include "sysrisk/outputs.hpp"
#include "sysrisk/panel.hpp"
#include "sysrisk/pipeline.hpp"
#include "sysrisk/run_config.hpp"
#include "sysrisk/validation.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3, kValidation = 4 };

std::string opt_value(const std::optional<double>& v) {
    return v ? sysrisk::format_number(*v) : std::string{};
}

void print_stats(const sysrisk::SummaryStats& stats) {
    std::printf("frequency: %s\n", sysrisk::to_string(stats.frequency));
    std::printf("%-16s %6s %10s %10s %10s %10s %10s %10s %10s %12s\n", "institution", "n", "min", "max",
                "mean", "std", "skew", "kurt", "q01", "jb");
    auto opt = [](const std::optional<double>& v, char* buf, std::size_t n) {
        if (v) {
            std::snprintf(buf, n, "%.4f", *v);
        } else {
            std::snprintf(buf, n, "undefined");
        }
        return buf;
    };
    for (const auto& s : stats.institutions) {
        char skew[32], kurt[32], jb[32];
        std::printf("%-16s %6zu %10.4f %10.4f %10.4f %10.4f %10s %10s %10.4f %12s\n", s.name.c_str(),
                    s.observations, s.min, s.max, s.mean, s.std_dev, opt(s.skewness, skew, 32),
                    opt(s.kurtosis, kurt, 32), s.q01, opt(s.jarque_bera, jb, 32));
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Systemic risk attribution with SCoVaR/SCoES and Shapley values"};
    app.require_subcommand(1);

    // stats
    auto* stats = app.add_subcommand("stats", "summary statistics of log returns x100");
    std::string stats_input;
    bool stats_weekly = false;
    stats->add_option("--input", stats_input, "levels CSV")->required();
    auto* sw = stats->add_flag("--weekly", stats_weekly, "ISO-week returns");
    stats->add_flag("--daily", "daily returns (default)")->excludes(sw);

    // run
    auto* run = app.add_subcommand("run", "rolling attribution");
    std::string config_path;
    std::optional<std::string> input, safe, distressed, tau1, tau2, delta, window, lambda, weights, out,
        annotations, threads, max_players, scale, seed;
    run->add_option("--config", config_path, "key=value config file; flags override it");
    run->add_option("--input", input, "levels CSV");
    run->add_option("--safe", safe, "comma-separated safe set W");
    run->add_option("--distressed", distressed, "comma-separated distressed set D");
    run->add_option("--tau1", tau1, "safe-institution level (0.05)");
    run->add_option("--tau2", tau2, "coalition distress level (0.05)");
    run->add_option("--delta", delta, "ES discount (1)");
    run->add_option("--window", window, "rolling window length (26)");
    run->add_option("--lambda", lambda, "graphical lasso penalty, a number or 'default'");
    run->add_option("--scale", scale, "penalty scale: covariance or correlation");
    run->add_option("--weights", weights, "comma-separated safe-institution weights");
    run->add_option("--out", out, "output directory (out)");
    run->add_option("--annotations", annotations, "date,label CSV of chart markers");
    run->add_option("--threads", threads, "window workers, 0 = all cores");
    run->add_option("--max-players", max_players, "cap on |D| (20)");
    run->add_option("--seed", seed, "seed (recorded for reproducibility)");
    bool run_weekly = false, run_daily = false, run_normalize = false;
    auto* rw = run->add_flag("--weekly", run_weekly, "weekly returns (default)");
    run->add_flag("--daily", run_daily, "daily returns")->excludes(rw);
    run->add_flag("--normalize", run_normalize, "divide Shapley/Banzhaf values by the window total");

    // validate
    auto* validate = app.add_subcommand("validate", "Monte Carlo oracle and game property suites");
    sysrisk::ValidationOptions vopts;
    std::string report_path;
    validate->add_option("--seed", vopts.seed, "seed (1)");
    validate->add_option("--draws", vopts.draws, "Monte Carlo draws per spec (1e7)");
    validate->add_option("--specs", vopts.specs, "random 2-d specs (20)");
    validate->add_option("--out", report_path, "also write the report to this file");

    // plot
    auto* plot = app.add_subcommand("plot", "re-render charts from a results CSV");
    std::string plot_input, plot_out = "out", plot_annotations;
    bool plot_normalized = false;
    plot->add_option("--input", plot_input, "attribution CSV")->required();
    plot->add_option("--out", plot_out, "output directory");
    plot->add_option("--annotations", plot_annotations, "date,label CSV of chart markers");
    plot->add_flag("--normalized", plot_normalized, "label the values as shares of the total");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (*stats) {
            const auto levels = sysrisk::load_levels_file(stats_input);
            const auto returns = stats_weekly ? sysrisk::log_returns(sysrisk::weekly_aggregate(levels))
                                              : sysrisk::log_returns(levels);
            print_stats(sysrisk::summary_stats(returns));
            return kOk;
        }
        if (*run) {
            std::vector<sysrisk::Setting> settings;
            if (!config_path.empty()) {
                settings = sysrisk::parse_settings_file(config_path);
            }
            auto flag = [&](const char* key, const std::optional<std::string>& v) {
                if (v) {
                    settings.emplace_back(key, *v);
                }
            };
            flag("input", input);
            flag("safe", safe);
            flag("distressed", distressed);
            flag("tau1", tau1);
            flag("tau2", tau2);
            flag("delta", delta);
            flag("window", window);
            flag("lambda", lambda);
            flag("scale", scale);
            flag("weights", weights);
            flag("out", out);
            flag("annotations", annotations);
            flag("threads", threads);
            flag("max_players", max_players);
            flag("seed", seed);
            if (run_weekly) {
                settings.emplace_back("frequency", "weekly");
            }
            if (run_daily) {
                settings.emplace_back("frequency", "daily");
            }
            if (run_normalize) {
                settings.emplace_back("normalize", "true");
            }
            const sysrisk::RunConfig cfg = sysrisk::make_run_config(settings);
            const auto series = sysrisk::run_rolling_attribution(cfg);
            const auto files = sysrisk::emit_outputs(series, cfg);
            for (const auto& row : series.rows) {
                if (!row.ok) {
                    std::cerr << "window " << sysrisk::format_date(row.date) << " failed: " << row.failure
                              << '\n';
                }
            }
            std::cout << series.rows.size() << " windows, " << series.failed() << " failed\n"
                      << "wrote " << files.csv << ", " << files.json << ", " << files.shapley_svg << ", "
                      << files.total_svg << '\n';
            return series.failed() == series.rows.size() ? kNumerical : kOk;
        }
        if (*validate) {
            const auto report = sysrisk::run_validation(vopts);
            const std::string text = report.text();
            std::cout << text;
            if (!report_path.empty()) {
                std::ofstream f(report_path, std::ios::binary);
                f << text;
                if (!f) {
                    throw sysrisk::IoError("cannot write '" + report_path + "'");
                }
            }
            return report.passed() ? kOk : kValidation;
        }
        if (*plot) {
            std::ifstream in(plot_input);
            if (!in) {
                throw sysrisk::IoError("cannot open results file '" + plot_input + "'");
            }
            const auto series = sysrisk::read_csv(in);
            const auto notes = plot_annotations.empty() ? std::vector<sysrisk::Annotation>{}
                                                        : sysrisk::load_annotations_file(plot_annotations);
            const auto files = sysrisk::render_charts(series, notes, plot_out, plot_normalized);
            std::cout << "wrote " << files.shapley_svg << ", " << files.total_svg << '\n';
            return kOk;
        }
    } catch (const sysrisk::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const sysrisk::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const sysrisk::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kData;
    } catch (const sysrisk::Error& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kNumerical;
    }
    return kOk;
}
