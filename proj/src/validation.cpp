#include "sysrisk/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

#include "sysrisk/covariance.hpp"
#include "sysrisk/monte_carlo.hpp"
#include "sysrisk/risk_game.hpp"

namespace sysrisk {
namespace {

void add(ValidationReport& r, std::string suite, std::string name, double value, double tol) {
    r.checks.push_back({std::move(suite), std::move(name), value, tol, value <= tol});
}

std::string spec_name(std::size_t k, const char* what) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "spec%02zu.%s", k + 1, what);
    return buf;
}

void monte_carlo_suite(const ValidationOptions& opts, ValidationReport& report) {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> rho_dist(-0.95, 0.95);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> log_var(std::log(0.25), std::log(4.0));
    const double tau1 = 0.05, tau2 = 0.05;
    double worst_residual = 0.0;
    for (std::size_t k = 0; k < opts.specs; ++k) {
        const double rho = rho_dist(rng);
        const double var_i = std::exp(log_var(rng));
        const double var_s = std::exp(log_var(rng));
        const double mu_i = z(rng);
        const double mu_s = z(rng);
        const auto pair = CoalitionPairModel::from_moments(mu_i, var_i, mu_s, var_s,
                                                           rho * std::sqrt(var_i * var_s));
        const RiskMeasureResult closed = evaluate_pair(pair, tau1, tau2);
        worst_residual = std::max(worst_residual, closed.root_residual);
        const double closed_scoes =
            opts.scoes_override ? opts.scoes_override(pair, tau1, tau2) : closed.sigma_hat_es;

        McConfig mc;
        mc.draws = opts.draws;
        mc.seed = opts.seed * 1000 + k;
        const PairMcEstimates sim = monte_carlo_pair(pair, tau1, tau2, mc);
        const double tol = opts.z_tolerance;
        add(report, "mc", spec_name(k, "quantile_z"),
            sim.quantile.z_score(gaussian_quantile_threshold(mu_i, var_i, tau1)), tol);
        add(report, "mc", spec_name(k, "es_z"), sim.es.z_score(gaussian_es(mu_i, var_i, tau1)), tol);
        add(report, "mc", spec_name(k, "scovar_z"), sim.scovar.z_score(closed.gamma_hat), tol);
        add(report, "mc", spec_name(k, "scoes_z"), sim.scoes.z_score(closed_scoes), tol);
    }
    add(report, "mc", "scovar_root_residual_max", worst_residual, 1e-10);

    // rho = 0: the distress event carries no information.
    double collapse = 0.0;
    for (double mu : {-1.0, 0.0, 2.5}) {
        const auto pair = CoalitionPairModel::from_moments(mu, 2.0, 0.3, 1.5, 0.0);
        collapse = std::max(collapse, std::fabs(scovar(pair, tau1, tau2) -
                                                gaussian_quantile_threshold(mu, 2.0, tau1)));
        collapse = std::max(collapse, std::fabs(scoes(pair, tau1, tau2) - gaussian_es(mu, 2.0, tau1)));
    }
    add(report, "mc", "independence_collapse_max_abs", collapse, 1e-10);
}

// Order-averaged marginal contributions over all d! arrival orders.
std::vector<double> permutation_shapley(const CoalitionTable& t) {
    std::vector<std::size_t> order(t.d());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> phi(t.d(), 0.0);
    double count = 0.0;
    do {
        Coalition s = 0;
        for (std::size_t j : order) {
            const Coalition next = s | (Coalition{1} << j);
            phi[j] += t[next] - t[s];
            s = next;
        }
        count += 1.0;
    } while (std::next_permutation(order.begin(), order.end()));
    for (double& v : phi) {
        v /= count;
    }
    return phi;
}

GaussianModel random_model(std::mt19937_64& rng, std::size_t p) {
    std::normal_distribution<double> z;
    Eigen::MatrixXd a(p, p);
    for (Eigen::Index k = 0; k < a.size(); ++k) {
        a.data()[k] = z(rng);
    }
    Eigen::VectorXd mu(p);
    std::vector<std::string> labels;
    for (std::size_t j = 0; j < p; ++j) {
        mu(j) = 0.3 * z(rng);
        labels.push_back("x" + std::to_string(j));
    }
    return GaussianModel::from_covariance(mu, a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(p, p),
                                          labels);
}

InstitutionPartition first_safe(const GaussianModel& m, std::size_t safe_count) {
    return InstitutionPartition::from_labels(
        m.labels, {m.labels.begin(), m.labels.begin() + static_cast<long>(safe_count)},
        {m.labels.begin() + static_cast<long>(safe_count), m.labels.end()});
}

void game_suite(const ValidationOptions& opts, ValidationReport& report) {
    std::mt19937_64 rng(opts.seed + 7);
    std::uniform_real_distribution<double> u(-1.0, 3.0);
    double efficiency = 0.0, d2 = 0.0, dummy = 0.0, brute = 0.0;
    for (std::size_t k = 0; k < opts.tables; ++k) {
        const std::size_t d = 1 + k % 6;
        std::vector<double> costs(std::size_t{1} << d, 0.0);
        for (std::size_t s = 1; s < costs.size(); ++s) {
            costs[s] = u(rng);
        }
        const CoalitionTable t(d, costs);
        const auto phi = shapley(t);
        const double sum = std::accumulate(phi.begin(), phi.end(), 0.0);
        efficiency = std::max(efficiency, std::fabs(sum - t.total()) / std::max(1.0, std::fabs(t.total())));
        if (d == 2) {
            const auto beta = banzhaf(t);
            d2 = std::max({d2, std::fabs(beta[0] - phi[0]), std::fabs(beta[1] - phi[1])});
        }
        if (d <= 5) {
            const auto reference = permutation_shapley(t);
            for (std::size_t j = 0; j < d; ++j) {
                brute = std::max(brute, std::fabs(phi[j] - reference[j]));
            }
        }
        // Same table with player j made a dummy.
        const std::size_t j = k % d;
        auto dummy_costs = costs;
        for (std::size_t s = 0; s < dummy_costs.size(); ++s) {
            if (contains(static_cast<Coalition>(s), j)) {
                dummy_costs[s] = dummy_costs[s & ~(std::size_t{1} << j)];
            }
        }
        const CoalitionTable td(d, dummy_costs);
        dummy = std::max({dummy, std::fabs(shapley(td)[j]), std::fabs(banzhaf(td)[j]),
                          is_dummy(j, td, 0.0) ? 0.0 : 1.0});
    }
    add(report, "game", "efficiency_max_rel", efficiency, 1e-10);
    add(report, "game", "banzhaf_eq_shapley_d2_max_abs", d2, 1e-12);
    add(report, "game", "dummy_allocation_max_abs", dummy, 1e-12);
    add(report, "game", "permutation_brute_force_max_abs", brute, 1e-12);

    // Model-based properties.
    double scale = 0.0;
    double empty = 0.0;
    for (int rep = 0; rep < 3; ++rep) {
        const auto m = random_model(rng, 6);
        const auto part = first_safe(m, 2);
        const auto base = build_table(m, part, {});
        empty = std::max(empty, std::fabs(base[0]));
        for (double lam : {0.5, 2.0, 10.0}) {
            Eigen::VectorXd f = Eigen::VectorXd::Ones(6);
            for (std::size_t idx : part.distressed) {
                f(static_cast<Eigen::Index>(idx)) = lam;
            }
            const auto scaled = GaussianModel::from_covariance(
                f.asDiagonal() * m.mu, f.asDiagonal() * m.sigma * f.asDiagonal(), m.labels);
            const auto t = build_table(scaled, part, {});
            for (std::size_t s = 0; s < t.costs().size(); ++s) {
                scale = std::max(scale, std::fabs(t.costs()[s] - base.costs()[s]));
            }
        }
    }
    add(report, "game", "scale_invariance_max_abs", scale, 1e-10);
    add(report, "game", "empty_coalition_abs", empty, 0.0);

    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(5, 5);
    sigma.topLeftCorner(2, 2) << 2.0, 0.6, 0.6, 1.0;
    sigma.bottomRightCorner(3, 3) << 1.0, 0.5, 0.2, 0.5, 3.0, -0.4, 0.2, -0.4, 0.8;
    Eigen::VectorXd mu(5);
    mu << 0.1, -0.3, 0.2, 0.05, -1.0;
    const auto block = GaussianModel::from_covariance(mu, sigma, {"w1", "w2", "d1", "d2", "d3"});
    const auto table = build_table(block, first_safe(block, 2), {});
    double null_cost = 0.0;
    for (double c : table.costs()) {
        null_cost = std::max(null_cost, std::fabs(c));
    }
    add(report, "game", "independence_null_max_abs", null_cost, 1e-12);
}

}  // namespace

std::size_t ValidationReport::failures() const {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [](const ValidationCheck& c) { return !c.passed; }));
}

std::string ValidationReport::text() const {
    std::ostringstream out;
    out << "validation seed=" << seed << '\n';
    for (const auto& c : checks) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%-5s %-36s %.6e <= %.1e  %s\n", c.suite.c_str(), c.name.c_str(),
                      c.value, c.tolerance, c.passed ? "PASS" : "FAIL");
        out << buf;
    }
    out << checks.size() << " checks, " << failures() << " failed\n";
    return out.str();
}

ValidationReport run_validation(const ValidationOptions& opts) {
    ValidationReport report;
    report.seed = opts.seed;
    monte_carlo_suite(opts, report);
    game_suite(opts, report);
    return report;
}

}  // namespace sysrisk
