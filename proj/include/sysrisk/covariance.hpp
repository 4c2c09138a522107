#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace sysrisk {

class PanelWindow;

/// X ~ N_p(mu, sigma) with theta = sigma^{-1}, one entry per label.
struct GaussianModel {
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma;
    Eigen::MatrixXd theta;
    std::vector<std::string> labels;

    std::size_t size() const { return static_cast<std::size_t>(mu.size()); }

    /// Builds a model from a covariance matrix, inverting it for theta.
    /// Throws DomainError unless sigma is symmetric positive definite.
    static GaussianModel from_covariance(Eigen::VectorXd mu, Eigen::MatrixXd sigma,
                                         std::vector<std::string> labels = {});
};

struct SampleMoments {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;  ///< 1/N normalization (maximum likelihood)
};

/// Column means and 1/N covariance of an N x p matrix (N >= 2).
SampleMoments sample_moments(const Eigen::MatrixXd& x);
SampleMoments sample_moments(const PanelWindow& window);

/// 2 sqrt(ln p / n).
double default_lambda(std::size_t p, std::size_t n);

enum class GlassoScale { Covariance, Correlation };

struct EstimatorConfig {
    double lambda = 0.0;
    double tol = 1e-6;
    int max_iter = 200;
    bool penalize_diagonal = false;
    /// Correlation: the penalty is applied to the standardized matrix and the
    /// estimate is mapped back to the covariance scale.
    GlassoScale scale = GlassoScale::Covariance;

    void validate() const;
};

struct GlassoFit {
    Eigen::MatrixXd sigma;
    Eigen::MatrixXd theta;
    int iterations = 0;
    double last_change = 0.0;  ///< average |delta sigma| of the final sweep
};

/// Graphical lasso (Friedman, Hastie & Tibshirani 2008): maximizes
/// log det(theta) - tr(S theta) - lambda sum_{j != k} |theta_jk|
/// by block coordinate descent over columns, each block a coordinate-descent lasso.
/// Throws NumericalError carrying the last change on non-convergence.
GlassoFit graphical_lasso(const Eigen::MatrixXd& s, const EstimatorConfig& cfg);

/// mean + graphical lasso estimate for a window.
GaussianModel fit_gaussian_model(const SampleMoments& moments, std::vector<std::string> labels,
                                 const EstimatorConfig& cfg);

}  // namespace sysrisk
