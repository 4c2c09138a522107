#include "sysrisk/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sysrisk/errors.hpp"
#include "sysrisk/panel.hpp"

namespace sysrisk {
namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void require_symmetric(const Eigen::MatrixXd& m, const char* what) {
    if (m.rows() != m.cols()) {
        throw DomainError(std::string(what) + " must be square");
    }
    if (!m.allFinite()) {
        throw DomainError(std::string(what) + " has non-finite entries");
    }
    const double asym = max_abs(m - m.transpose());
    if (asym > 1e-12 * std::max(1.0, max_abs(m))) {
        throw DomainError(std::string(what) + " is not symmetric (max asymmetry " +
                          std::to_string(asym) + ")");
    }
}

double soft_threshold(double x, double lambda) {
    if (x > lambda) {
        return x - lambda;
    }
    if (x < -lambda) {
        return x + lambda;
    }
    return 0.0;
}

// min 0.5 b'Vb - u'b + lambda |b|_1 by cyclic coordinate descent, warm-started in b.
void lasso_cd(const Eigen::MatrixXd& v, const Eigen::VectorXd& u, double lambda,
              Eigen::VectorXd& b) {
    const Eigen::Index m = u.size();
    Eigen::VectorXd vb = v * b;
    const double scale = u.cwiseAbs().maxCoeff() + lambda;
    const double stop = 1e-13 * std::max(scale, 1e-300);
    for (int sweep = 0; sweep < 20000; ++sweep) {
        double largest = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            const double r = u(j) - (vb(j) - v(j, j) * b(j));
            const double next = soft_threshold(r, lambda) / v(j, j);
            const double delta = next - b(j);
            if (delta != 0.0) {
                vb += v.col(j) * delta;
                b(j) = next;
                largest = std::max(largest, std::fabs(delta) * v(j, j));
            }
        }
        if (largest <= stop) {
            return;
        }
    }
}

GlassoFit glasso_covariance_scale(const Eigen::MatrixXd& s, const EstimatorConfig& cfg) {
    const Eigen::Index p = s.rows();
    const double lambda = cfg.lambda;

    Eigen::MatrixXd w = s;
    if (cfg.penalize_diagonal) {
        w.diagonal().array() += lambda;
    }

    GlassoFit fit;
    if (p == 1) {
        fit.sigma = w;
        fit.theta = w.cwiseInverse();
        return fit;
    }

    double offdiag_scale = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index k = 0; k < p; ++k) {
            if (j != k) {
                offdiag_scale += std::fabs(s(j, k));
            }
        }
    }
    const double offdiag_count = static_cast<double>(p * (p - 1));
    offdiag_scale /= offdiag_count;
    const double threshold = cfg.tol * offdiag_scale;

    // beta.col(j) holds the lasso coefficients of column j against the others
    // (entry j unused). Warm starts carry over between sweeps.
    Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(p, p);
    std::vector<Eigen::Index> others(p - 1);
    Eigen::MatrixXd v(p - 1, p - 1);
    Eigen::VectorXd u(p - 1);
    Eigen::VectorXd b(p - 1);

    auto gather = [&](Eigen::Index j) {
        Eigen::Index n = 0;
        for (Eigen::Index k = 0; k < p; ++k) {
            if (k != j) {
                others[n++] = k;
            }
        }
        for (Eigen::Index a = 0; a < p - 1; ++a) {
            u(a) = s(others[a], j);
            b(a) = beta(others[a], j);
            for (Eigen::Index c = 0; c < p - 1; ++c) {
                v(a, c) = w(others[a], others[c]);
            }
        }
    };

    bool converged = false;
    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        const Eigen::MatrixXd previous = w;
        for (Eigen::Index j = 0; j < p; ++j) {
            gather(j);
            lasso_cd(v, u, lambda, b);
            const Eigen::VectorXd w12 = v * b;
            for (Eigen::Index a = 0; a < p - 1; ++a) {
                beta(others[a], j) = b(a);
                w(others[a], j) = w12(a);
                w(j, others[a]) = w12(a);
            }
        }
        fit.iterations = iter;
        fit.last_change = (w - previous).cwiseAbs().sum() / offdiag_count;
        if (fit.last_change <= threshold) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw NumericalError("graphical lasso did not converge within " +
                                 std::to_string(cfg.max_iter) + " sweeps",
                             fit.last_change);
    }

    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        gather(j);
        const Eigen::VectorXd w12 = v * b;
        const double schur = w(j, j) - w12.dot(b);
        if (!(schur > 0.0)) {
            throw NumericalError("graphical lasso produced a non positive-definite estimate");
        }
        const double tjj = 1.0 / schur;
        theta(j, j) = tjj;
        for (Eigen::Index a = 0; a < p - 1; ++a) {
            theta(others[a], j) = -b(a) * tjj;
        }
    }
    theta = 0.5 * (theta + theta.transpose()).eval();

    Eigen::LLT<Eigen::MatrixXd> llt(theta);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("graphical lasso precision is not positive definite");
    }
    fit.theta = theta;
    fit.sigma = llt.solve(Eigen::MatrixXd::Identity(p, p));
    fit.sigma = 0.5 * (fit.sigma + fit.sigma.transpose()).eval();
    return fit;
}

}  // namespace

GaussianModel GaussianModel::from_covariance(Eigen::VectorXd mu, Eigen::MatrixXd sigma,
                                             std::vector<std::string> labels) {
    require_symmetric(sigma, "covariance");
    if (mu.size() != sigma.rows()) {
        throw DomainError("mean and covariance dimensions differ");
    }
    if (!mu.allFinite()) {
        throw DomainError("mean has non-finite entries");
    }
    if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != mu.size()) {
        throw DomainError("label count differs from model dimension");
    }
    const Eigen::Index p = sigma.rows();
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) {
        throw DomainError("covariance is not positive definite");
    }
    GaussianModel model;
    model.mu = std::move(mu);
    model.theta = llt.solve(Eigen::MatrixXd::Identity(p, p));
    model.theta = 0.5 * (model.theta + model.theta.transpose()).eval();
    model.sigma = std::move(sigma);
    model.labels = std::move(labels);
    return model;
}

SampleMoments sample_moments(const Eigen::MatrixXd& x) {
    if (x.rows() < 2) {
        throw DataError("sample moments need at least 2 rows, got " + std::to_string(x.rows()));
    }
    if (!x.allFinite()) {
        throw DataError("sample moments: non-finite observation");
    }
    SampleMoments m;
    m.mean = x.colwise().mean().transpose();
    const Eigen::MatrixXd centered = x.rowwise() - m.mean.transpose();
    m.covariance = (centered.transpose() * centered) / static_cast<double>(x.rows());
    m.covariance = 0.5 * (m.covariance + m.covariance.transpose()).eval();
    return m;
}

SampleMoments sample_moments(const PanelWindow& window) { return sample_moments(window.matrix()); }

double default_lambda(std::size_t p, std::size_t n) {
    if (p < 1 || n < 1) {
        throw DomainError("default_lambda needs p >= 1 and n >= 1");
    }
    return 2.0 * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

void EstimatorConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw ConfigError("graphical lasso penalty must be a finite nonnegative number");
    }
    if (!(tol > 0.0)) {
        throw ConfigError("graphical lasso tolerance must be positive");
    }
    if (max_iter < 1) {
        throw ConfigError("graphical lasso max_iter must be at least 1");
    }
}

GlassoFit graphical_lasso(const Eigen::MatrixXd& s, const EstimatorConfig& cfg) {
    cfg.validate();
    require_symmetric(s, "sample covariance");
    if (s.rows() == 0) {
        throw DomainError("sample covariance is empty");
    }
    if (!(s.diagonal().array() > 0.0).all()) {
        throw DomainError("sample covariance must have a strictly positive diagonal");
    }
    if (cfg.scale == GlassoScale::Covariance) {
        return glasso_covariance_scale(s, cfg);
    }
    const Eigen::VectorXd sd = s.diagonal().cwiseSqrt();
    const Eigen::VectorXd inv = sd.cwiseInverse();
    const Eigen::MatrixXd r = inv.asDiagonal() * s * inv.asDiagonal();
    GlassoFit fit = glasso_covariance_scale(0.5 * (r + r.transpose()), cfg);
    fit.sigma = sd.asDiagonal() * fit.sigma * sd.asDiagonal();
    fit.theta = inv.asDiagonal() * fit.theta * inv.asDiagonal();
    return fit;
}

GaussianModel fit_gaussian_model(const SampleMoments& moments, std::vector<std::string> labels,
                                 const EstimatorConfig& cfg) {
    const GlassoFit fit = graphical_lasso(moments.covariance, cfg);
    GaussianModel model;
    model.mu = moments.mean;
    model.sigma = fit.sigma;
    model.theta = fit.theta;
    model.labels = std::move(labels);
    return model;
}

}  // namespace sysrisk
