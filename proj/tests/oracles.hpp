#pragma once

// Reference computations built only from std::erfc and Boost adaptive quadrature
// and root bracketing; none of them call the library under test.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <utility>

namespace oracle {

inline double pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
inline double cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double quantile(double p) {
    double lo = -40.0;
    double hi = 40.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        (cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline double bvn(double h, double k, double rho) {
    using boost::math::quadrature::gauss_kronrod;
    const double s = std::sqrt(1.0 - rho * rho);
    auto f = [&](double x) { return pdf(x) * cdf((k - rho * x) / s); };
    return gauss_kronrod<double, 61>::integrate(f, -std::numeric_limits<double>::infinity(), h, 15,
                                                1e-15);
}

inline double truncated_mean(double h, double k, double rho) {
    using boost::math::quadrature::gauss_kronrod;
    const double s = std::sqrt(1.0 - rho * rho);
    auto f = [&](double x) { return x * pdf(x) * cdf((k - rho * x) / s); };
    const double num = gauss_kronrod<double, 61>::integrate(
        f, -std::numeric_limits<double>::infinity(), h, 15, 1e-15);
    return num / bvn(h, k, rho);
}

/// Standardized SCoVaR threshold h with bvn(h, Phi^{-1}(tau2), rho) = tau1 tau2,
/// by TOMS 748 on the quadrature cdf.
inline double scovar_standardized(double rho, double tau1, double tau2) {
    const double k = quantile(tau2);
    auto f = [&](double h) { return bvn(h, k, rho) / tau2 - tau1; };
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(
        f, -12.0, 12.0, boost::math::tools::eps_tolerance<double>(50), iters);
    return 0.5 * (r.first + r.second);
}

/// Gaussian tail mean E[X | X <= q_tau] for N(mu, var), by quadrature of x phi.
inline double es(double mu, double var, double tau) {
    using boost::math::quadrature::gauss_kronrod;
    const double z = quantile(tau);
    auto f = [](double x) { return x * pdf(x); };
    const double num = gauss_kronrod<double, 61>::integrate(
        f, -std::numeric_limits<double>::infinity(), z, 15, 1e-15);
    return mu + std::sqrt(var) * num / cdf(z);
}

}  // namespace oracle
