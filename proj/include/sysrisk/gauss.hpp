#pragma once

// Scalar and bivariate standard-normal primitives.
//
// The bivariate lower-orthant probability follows the Drezner & Wesolowsky
// (1990) single-integral reduction with Genz's double-precision modifications
// for |rho| close to 1 (A. Genz, "Numerical computation of rectangular
// bivariate and trivariate normal and t probabilities", Statistics and
// Computing 14, 2004). Gauss-Legendre rules of 6/12/20 points are used
// depending on |rho|; absolute accuracy is about 1e-15.

namespace sysrisk {

/// Correlated standard bivariate normal orthant spec: thresholds h, k and correlation rho.
struct BivariateSpec {
    double h = 0.0;
    double k = 0.0;
    double rho = 0.0;
};

/// Correlations with |rho| at or above this are treated as exactly +-1.
inline constexpr double kDegenerateRho = 1.0 - 1e-12;

/// Probabilities below this are clamped to 0 and flagged.
inline constexpr double kUnderflowProbability = 1e-300;

double std_normal_pdf(double x);
double std_normal_cdf(double x);

/// Inverse of std_normal_cdf on (0, 1): Acklam's rational approximation polished by
/// two Halley steps against the erfc-based cdf.
double std_normal_quantile(double p);

struct OrthantProbability {
    double value = 0.0;
    bool underflow = false;  ///< true when the raw value fell below kUnderflowProbability
};

/// P(Z1 <= h, Z2 <= k) for a standard bivariate normal with correlation rho.
double bvn_lower_cdf(const BivariateSpec& spec);
OrthantProbability bvn_lower_cdf_flagged(const BivariateSpec& spec);

/// E[Z1 | Z1 <= h, Z2 <= k]. Throws NumericalError when the orthant has zero probability.
double truncated_bvn_lower_mean(const BivariateSpec& spec);

}  // namespace sysrisk
