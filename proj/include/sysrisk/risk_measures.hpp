#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <vector>

namespace sysrisk {

struct GaussianModel;

// Sign convention: everything below works on the quantile (lower-tail) scale, so
// VaR thresholds and Expected Shortfalls of a profit-and-loss variable are
// typically negative. gaussian_var() is the one accessor on the "negative of the
// quantile" scale; empirical_es() and spectral_measure() follow that loss scale too,
// because they implement the discrete definitions verbatim.

struct RiskConfig {
    double tau1 = 0.05;
    double tau2 = 0.05;
    double delta = 1.0;
    /// One weight per safe institution, summing to their count. Empty means all ones.
    std::vector<double> weights;

    /// Throws ConfigError; safe_count is |W| for the weight check.
    void validate(std::size_t safe_count) const;
    double weight(std::size_t i) const { return weights.empty() ? 1.0 : weights[i]; }
};

/// Law of (X_i, sum_{j in S} X_j).
struct CoalitionPairModel {
    double mu_i = 0.0;
    double mu_s = 0.0;
    double var_i = 1.0;
    double var_s = 1.0;
    double cov_is = 0.0;
    double rho = 0.0;

    /// Derives rho, clamping rounding excursions just beyond +-1.
    /// Throws DomainError for nonpositive variances or |rho| materially above 1.
    static CoalitionPairModel from_moments(double mu_i, double var_i, double mu_s, double var_s,
                                           double cov_is);
};

/// Pair law of institution i against the sum over `members` (indices into model).
CoalitionPairModel coalition_pair_model(const GaussianModel& model, std::size_t i,
                                        const std::vector<std::size_t>& members);

struct RiskMeasureResult {
    double nu_hat = 0.0;        ///< tau2-quantile of the coalition sum
    double psi_hat = 0.0;       ///< tau2 Expected Shortfall of the coalition sum
    double gamma_hat = 0.0;     ///< SCoVaR
    double sigma_hat_es = 0.0;  ///< SCoES
    double root_residual = 0.0; ///< |F(gamma, nu)/tau2 - tau1|
};

/// mu + sqrt(var) * Phi^{-1}(tau).
double gaussian_quantile_threshold(double mu, double var, double tau);
/// Value-at-Risk as the negative of the tau-quantile.
double gaussian_var(double mu, double var, double tau);
/// E[X | X <= q_tau] = mu - sqrt(var) * phi(z) / tau, z = Phi^{-1}(tau).
double gaussian_es(double mu, double var, double tau);

/// Solves F(y, nu_hat) / tau2 = tau1 for y by bisection.
double scovar(const CoalitionPairModel& pair, double tau1, double tau2);
/// E[X_i | X_i <= SCoVaR, S <= nu_hat].
double scoes(const CoalitionPairModel& pair, double tau1, double tau2);
RiskMeasureResult evaluate_pair(const CoalitionPairModel& pair, double tau1, double tau2);

/// -(delta / tau_count) * sum of the tau_count smallest values.
double empirical_es(const std::vector<double>& sample, std::size_t tau_count, double delta);

/// -delta * sum_j w_j x_(j) over the increasing rearrangement. Throws
/// ValidationError with check "N1" (negative weight), "N2" (sum != 1) or
/// "M" (increasing weights).
double spectral_measure(const std::vector<double>& weights, const std::vector<double>& sample,
                        double delta);

/// Order statistic k = ceil(tau * n) (1-based) of an unsorted sample: the
/// smallest value whose empirical cdf reaches tau.
double empirical_lower_quantile(std::vector<double> sample, double tau);

/// How the coalition-sum distress event is thresholded in the empirical estimators.
enum class DistressEvent {
    QuantileThreshold,  ///< S <= empirical tau2-quantile of S
    EsThreshold,        ///< S <= empirical tau2 tail mean of S
};

/// Smallest x in the conditioning set with conditional frequency of {X_i <= x} >= tau1.
/// x_i and x_s are paired scenario values of X_i and the coalition sum.
double empirical_scovar(const std::vector<double>& x_i, const std::vector<double>& x_s,
                        double tau1, double tau2,
                        DistressEvent event = DistressEvent::QuantileThreshold);
/// Mean of X_i on {X_i <= empirical SCoVaR} within the conditioning set.
double empirical_scoes(const std::vector<double>& x_i, const std::vector<double>& x_s,
                       double tau1, double tau2,
                       DistressEvent event = DistressEvent::QuantileThreshold);

/// Scenario matrix forms: rows are equiprobable outcomes, columns institutions.
double empirical_scovar(const Eigen::MatrixXd& scenarios, std::size_t i,
                        const std::vector<std::size_t>& members, double tau1, double tau2,
                        DistressEvent event = DistressEvent::QuantileThreshold);
double empirical_scoes(const Eigen::MatrixXd& scenarios, std::size_t i,
                       const std::vector<std::size_t>& members, double tau1, double tau2,
                       DistressEvent event = DistressEvent::QuantileThreshold);

/// Lower bound on delta for one realized coalition return vector:
/// -tau2 * sum / (sum of the negative returns). A nonpositive bound means every
/// delta > 0 works (e.g. all returns negative); nullopt when no return is negative.
std::optional<double> delta_lower_bound(const std::vector<double>& member_returns, double tau2);

}  // namespace sysrisk
