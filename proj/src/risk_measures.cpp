#include "sysrisk/risk_measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sysrisk/covariance.hpp"
#include "sysrisk/errors.hpp"
#include "sysrisk/gauss.hpp"

namespace sysrisk {
namespace {

void require_probability(double tau, const char* what) {
    if (!(tau > 0.0 && tau < 1.0)) {
        throw DomainError(std::string(what) + " must lie in (0, 1), got " + std::to_string(tau));
    }
}

void require_variance(double var) {
    if (!(var > 0.0) || !std::isfinite(var)) {
        throw DomainError("variance must be positive and finite, got " + std::to_string(var));
    }
}

void require_delta(double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw DomainError("discount factor delta must be positive, got " + std::to_string(delta));
    }
}

// Order-statistic index ceil(tau * n) in [1, n]. The small slack keeps products
// such as 0.05 * 20 from rounding up past an integer.
std::size_t order_index(double tau, std::size_t n) {
    const double k = std::ceil(tau * static_cast<double>(n) * (1.0 - 1e-12));
    return std::clamp<std::size_t>(static_cast<std::size_t>(k), 1, n);
}

struct StandardizedRoot {
    double h = 0.0;
    double residual = 0.0;
};

// Standardized SCoVaR threshold: bvn(h, z2, rho) / tau2 = tau1.
StandardizedRoot solve_standardized(double rho, double tau1, double tau2) {
    const double z2 = std_normal_quantile(tau2);
    auto f = [&](double h) { return bvn_lower_cdf({h, z2, rho}) / tau2 - tau1; };

    double lo = -10.0;
    double hi = 10.0;
    double width = 10.0;
    int doublings = 0;
    while (f(lo) > 0.0) {
        if (++doublings > 200) {
            throw NumericalError("scovar: lower bracket expansion failed", f(lo));
        }
        width *= 2.0;
        lo = -width;
    }
    width = 10.0;
    doublings = 0;
    while (f(hi) < 0.0) {
        if (++doublings > 200 || !std::isfinite(2.0 * width)) {
            throw NumericalError("scovar: upper bracket expansion failed", f(hi));
        }
        width *= 2.0;
        hi = width;
    }
    // Bisect until the bracket is two adjacent doubles: well inside the required
    // 1e-13 sqrt(var_i), and it keeps identities such as rho = 0 => VaR exact to rounding.
    for (;;) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double value = f(mid);
        if (value == 0.0) {
            lo = hi = mid;
            break;
        }
        (value < 0.0 ? lo : hi) = mid;
    }
    StandardizedRoot root;
    root.h = 0.5 * (lo + hi);
    root.residual = std::fabs(f(root.h));
    if (root.residual > 1e-10) {
        throw NumericalError("scovar: root residual above 1e-10", root.residual);
    }
    return root;
}

RiskMeasureResult evaluate_checked(const CoalitionPairModel& pair, double tau1, double tau2) {
    require_probability(tau1, "tau1");
    require_probability(tau2, "tau2");
    require_variance(pair.var_i);
    require_variance(pair.var_s);
    const StandardizedRoot root = solve_standardized(pair.rho, tau1, tau2);
    const double sd_i = std::sqrt(pair.var_i);
    const double z2 = std_normal_quantile(tau2);

    RiskMeasureResult r;
    r.nu_hat = gaussian_quantile_threshold(pair.mu_s, pair.var_s, tau2);
    r.psi_hat = gaussian_es(pair.mu_s, pair.var_s, tau2);
    r.gamma_hat = pair.mu_i + sd_i * root.h;
    r.root_residual = root.residual;
    const double tail = truncated_bvn_lower_mean({root.h, z2, pair.rho});
    r.sigma_hat_es = std::min(pair.mu_i + sd_i * tail, r.gamma_hat);
    return r;
}

std::vector<double> coalition_sums(const Eigen::MatrixXd& scenarios,
                                   const std::vector<std::size_t>& members) {
    if (members.empty()) {
        throw DomainError("coalition must be nonempty");
    }
    std::vector<double> sums(static_cast<std::size_t>(scenarios.rows()), 0.0);
    for (Eigen::Index r = 0; r < scenarios.rows(); ++r) {
        double sum = 0.0;
        for (std::size_t j : members) {
            sum += scenarios(r, static_cast<Eigen::Index>(j));
        }
        sums[static_cast<std::size_t>(r)] = sum;
    }
    return sums;
}

std::vector<double> column(const Eigen::MatrixXd& scenarios, std::size_t i) {
    const Eigen::VectorXd c = scenarios.col(static_cast<Eigen::Index>(i));
    return {c.data(), c.data() + c.size()};
}

// X_i values inside the coalition distress event.
std::vector<double> conditioned(const std::vector<double>& x_i, const std::vector<double>& x_s,
                                double tau2, DistressEvent event) {
    if (x_i.size() != x_s.size() || x_i.empty()) {
        throw DomainError("empirical estimators need equally sized nonempty samples");
    }
    require_probability(tau2, "tau2");
    double threshold = empirical_lower_quantile(x_s, tau2);
    if (event == DistressEvent::EsThreshold) {
        threshold = -empirical_es(x_s, order_index(tau2, x_s.size()), 1.0);
    }
    std::vector<double> kept;
    for (std::size_t r = 0; r < x_s.size(); ++r) {
        if (x_s[r] <= threshold) {
            kept.push_back(x_i[r]);
        }
    }
    if (kept.empty()) {
        throw NumericalError("empirical distress event is empty");
    }
    return kept;
}

}  // namespace

void RiskConfig::validate(std::size_t safe_count) const {
    if (!(tau1 > 0.0 && tau1 < 1.0) || !(tau2 > 0.0 && tau2 < 1.0)) {
        throw ConfigError("tau1 and tau2 must lie in (0, 1)");
    }
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw ConfigError("delta must be positive");
    }
    if (weights.empty()) {
        return;
    }
    if (weights.size() != safe_count) {
        throw ConfigError("expected " + std::to_string(safe_count) + " safe-institution weights, got " +
                          std::to_string(weights.size()));
    }
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw ConfigError("safe-institution weights must be nonnegative");
        }
        sum += w;
    }
    if (std::fabs(sum - static_cast<double>(safe_count)) > 1e-12 * static_cast<double>(safe_count)) {
        throw ConfigError("safe-institution weights must sum to " + std::to_string(safe_count));
    }
}

CoalitionPairModel CoalitionPairModel::from_moments(double mu_i, double var_i, double mu_s,
                                                    double var_s, double cov_is) {
    if (!(var_i > 0.0) || !(var_s > 0.0)) {
        throw DomainError("coalition pair variances must be positive (degenerate coalition sum)");
    }
    if (!std::isfinite(mu_i) || !std::isfinite(mu_s) || !std::isfinite(cov_is) ||
        !std::isfinite(var_i) || !std::isfinite(var_s)) {
        throw DomainError("coalition pair moments must be finite");
    }
    double rho = cov_is / std::sqrt(var_i * var_s);
    if (std::fabs(rho) > 1.0 + 1e-10) {
        throw DomainError("coalition pair correlation outside [-1, 1]: " + std::to_string(rho));
    }
    rho = std::clamp(rho, -1.0, 1.0);
    return {mu_i, mu_s, var_i, var_s, cov_is, rho};
}

CoalitionPairModel coalition_pair_model(const GaussianModel& model, std::size_t i,
                                        const std::vector<std::size_t>& members) {
    const std::size_t p = model.size();
    if (i >= p) {
        throw DomainError("institution index out of range");
    }
    if (members.empty()) {
        throw DomainError("coalition must be nonempty");
    }
    double mu_s = 0.0;
    double var_s = 0.0;
    double cov_is = 0.0;
    for (std::size_t j : members) {
        if (j >= p) {
            throw DomainError("coalition member index out of range");
        }
        if (j == i) {
            throw DomainError("institution " + std::to_string(i) + " belongs to the coalition");
        }
        mu_s += model.mu(j);
        cov_is += model.sigma(i, j);
        for (std::size_t k : members) {
            var_s += model.sigma(j, k);
        }
    }
    return CoalitionPairModel::from_moments(model.mu(i), model.sigma(i, i), mu_s, var_s, cov_is);
}

double gaussian_quantile_threshold(double mu, double var, double tau) {
    require_variance(var);
    require_probability(tau, "tau");
    return mu + std::sqrt(var) * std_normal_quantile(tau);
}

double gaussian_var(double mu, double var, double tau) {
    return -gaussian_quantile_threshold(mu, var, tau);
}

double gaussian_es(double mu, double var, double tau) {
    require_variance(var);
    require_probability(tau, "tau");
    const double z = std_normal_quantile(tau);
    return mu - std::sqrt(var) * std_normal_pdf(z) / tau;
}

double scovar(const CoalitionPairModel& pair, double tau1, double tau2) {
    return evaluate_checked(pair, tau1, tau2).gamma_hat;
}

double scoes(const CoalitionPairModel& pair, double tau1, double tau2) {
    return evaluate_checked(pair, tau1, tau2).sigma_hat_es;
}

RiskMeasureResult evaluate_pair(const CoalitionPairModel& pair, double tau1, double tau2) {
    return evaluate_checked(pair, tau1, tau2);
}

double empirical_es(const std::vector<double>& sample, std::size_t tau_count, double delta) {
    require_delta(delta);
    if (tau_count < 1 || tau_count > sample.size()) {
        throw DomainError("empirical_es: tau_count must lie in [1, " + std::to_string(sample.size()) +
                          "], got " + std::to_string(tau_count));
    }
    std::vector<double> sorted = sample;
    std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(tau_count),
                      sorted.end());
    const double sum = std::accumulate(sorted.begin(),
                                       sorted.begin() + static_cast<std::ptrdiff_t>(tau_count), 0.0);
    return -(delta / static_cast<double>(tau_count)) * sum;
}

double spectral_measure(const std::vector<double>& weights, const std::vector<double>& sample,
                        double delta) {
    require_delta(delta);
    if (weights.size() != sample.size() || sample.empty()) {
        throw DomainError("spectral_measure: need one weight per outcome");
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        if (!(weights[j] >= 0.0)) {
            throw ValidationError("N1", "weight " + std::to_string(j) + " is negative");
        }
        sum += weights[j];
    }
    if (std::fabs(sum - 1.0) > 1e-12) {
        throw ValidationError("N2", "weights sum to " + std::to_string(sum) + ", not 1");
    }
    for (std::size_t j = 1; j < weights.size(); ++j) {
        if (weights[j] > weights[j - 1]) {
            throw ValidationError("M", "weights increase at position " + std::to_string(j));
        }
    }
    std::vector<double> sorted = sample;
    std::stable_sort(sorted.begin(), sorted.end());
    double total = 0.0;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        total += weights[j] * sorted[j];
    }
    return -delta * total;
}

double empirical_lower_quantile(std::vector<double> sample, double tau) {
    if (sample.empty()) {
        throw DomainError("empirical quantile of an empty sample");
    }
    require_probability(tau, "tau");
    const std::size_t k = order_index(tau, sample.size());
    std::nth_element(sample.begin(), sample.begin() + static_cast<std::ptrdiff_t>(k - 1), sample.end());
    return sample[k - 1];
}

double empirical_scovar(const std::vector<double>& x_i, const std::vector<double>& x_s,
                        double tau1, double tau2, DistressEvent event) {
    require_probability(tau1, "tau1");
    return empirical_lower_quantile(conditioned(x_i, x_s, tau2, event), tau1);
}

double empirical_scoes(const std::vector<double>& x_i, const std::vector<double>& x_s,
                       double tau1, double tau2, DistressEvent event) {
    require_probability(tau1, "tau1");
    const std::vector<double> kept = conditioned(x_i, x_s, tau2, event);
    const double level = empirical_lower_quantile(kept, tau1);
    double sum = 0.0;
    std::size_t count = 0;
    for (double x : kept) {
        if (x <= level) {
            sum += x;
            ++count;
        }
    }
    return sum / static_cast<double>(count);
}

double empirical_scovar(const Eigen::MatrixXd& scenarios, std::size_t i,
                        const std::vector<std::size_t>& members, double tau1, double tau2,
                        DistressEvent event) {
    return empirical_scovar(column(scenarios, i), coalition_sums(scenarios, members), tau1, tau2,
                            event);
}

double empirical_scoes(const Eigen::MatrixXd& scenarios, std::size_t i,
                       const std::vector<std::size_t>& members, double tau1, double tau2,
                       DistressEvent event) {
    return empirical_scoes(column(scenarios, i), coalition_sums(scenarios, members), tau1, tau2,
                           event);
}

std::optional<double> delta_lower_bound(const std::vector<double>& member_returns, double tau2) {
    require_probability(tau2, "tau2");
    double sum = 0.0;
    double negative = 0.0;
    for (double x : member_returns) {
        sum += x;
        if (x < 0.0) {
            negative += x;
        }
    }
    if (!(negative < 0.0)) {
        return std::nullopt;
    }
    return -tau2 * sum / negative;
}

}  // namespace sysrisk
