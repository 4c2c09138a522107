#include "sysrisk/gauss.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "sysrisk/errors.hpp"

namespace sysrisk {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kInvSqrtTwoPi = 1.0 / std::sqrt(kTwoPi);

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw DomainError(std::string(what) + ": argument must be finite");
    }
}

struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Nodes and weights on [-1, 1] by Newton iteration on P_n.
GaussLegendreRule make_gauss_legendre(int n) {
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double step = p1 / dp;
            x -= step;
            if (std::fabs(step) < 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

const GaussLegendreRule& rule_for(double abs_rho) {
    static const GaussLegendreRule gl6 = make_gauss_legendre(6);
    static const GaussLegendreRule gl12 = make_gauss_legendre(12);
    static const GaussLegendreRule gl20 = make_gauss_legendre(20);
    if (abs_rho < 0.3) {
        return gl6;
    }
    if (abs_rho < 0.75) {
        return gl12;
    }
    return gl20;
}

// Upper orthant P(Z1 > dh, Z2 > dk), Genz's BVNU with 0 < |r| < 1.
double bvn_upper(double dh, double dk, double r) {
    const GaussLegendreRule& gl = rule_for(std::fabs(r));
    double h = dh;
    double k = dk;
    double hk = h * k;
    double bvn = 0.0;

    if (std::fabs(r) < 0.925) {
        const double hs = 0.5 * (h * h + k * k);
        const double asr = 0.5 * std::asin(r);
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double sn = std::sin(asr * (1.0 + gl.nodes[i]));
            bvn += gl.weights[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
        }
        return bvn * asr / kTwoPi + std_normal_cdf(-h) * std_normal_cdf(-k);
    }

    if (r < 0.0) {
        k = -k;
        hk = -hk;
    }
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 80.0;
    double asr = -0.5 * (bs / as + hk);
    if (asr > -100.0) {
        bvn = a * std::exp(asr) * (1.0 - c * (bs - as) * (1.0 - d * bs) / 3.0 + c * d * as * as);
    }
    if (hk > -100.0) {
        const double b = std::sqrt(bs);
        const double sp = std::sqrt(kTwoPi) * std_normal_cdf(-b / a);
        bvn -= std::exp(-0.5 * hk) * sp * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0);
    }
    a *= 0.5;
    double tail = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        const double t = a * (1.0 + gl.nodes[i]);
        const double xs = t * t;
        asr = -0.5 * (bs / xs + hk);
        if (asr > -100.0) {
            const double sp = 1.0 + c * xs * (1.0 + 5.0 * d * xs);
            const double rs = std::sqrt(1.0 - xs);
            const double ep = std::exp(-0.5 * hk * xs / ((1.0 + rs) * (1.0 + rs))) / rs;
            tail += gl.weights[i] * std::exp(asr) * (sp - ep);
        }
    }
    bvn = (a * tail - bvn) / kTwoPi;

    if (r > 0.0) {
        return bvn + std_normal_cdf(-std::max(h, k));
    }
    if (h >= k) {
        return -bvn;
    }
    const double band = h < 0.0 ? std_normal_cdf(k) - std_normal_cdf(h)
                                 : std_normal_cdf(-h) - std_normal_cdf(-k);
    return band - bvn;
}

void validate(const BivariateSpec& spec) {
    require_finite(spec.h, "bivariate threshold h");
    require_finite(spec.k, "bivariate threshold k");
    if (!(std::fabs(spec.rho) <= 1.0)) {
        throw DomainError("bivariate correlation must lie in [-1, 1], got " +
                          std::to_string(spec.rho));
    }
}

double raw_lower_cdf(const BivariateSpec& spec) {
    const double h = spec.h;
    const double k = spec.k;
    const double rho = spec.rho;
    if (rho >= kDegenerateRho) {
        return std_normal_cdf(std::min(h, k));
    }
    if (rho <= -kDegenerateRho) {
        // Z2 = -Z1: the event is -k <= Z1 <= h.
        if (h <= -k) {
            return 0.0;
        }
        return h <= 0.0 ? std_normal_cdf(h) - std_normal_cdf(-k)
                        : std_normal_cdf(k) - std_normal_cdf(-h);
    }
    if (rho == 0.0) {
        return std_normal_cdf(h) * std_normal_cdf(k);
    }
    return std::clamp(bvn_upper(-h, -k, rho), 0.0, 1.0);
}

}  // namespace

double std_normal_pdf(double x) {
    require_finite(x, "std_normal_pdf");
    return kInvSqrtTwoPi * std::exp(-0.5 * x * x);
}

double std_normal_cdf(double x) {
    require_finite(x, "std_normal_cdf");
    return 0.5 * std::erfc(-x * std::numbers::sqrt2 * 0.5);
}

double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("std_normal_quantile: probability must lie in (0, 1), got " +
                          std::to_string(p));
    }
    if (p > 0.5) {
        // 1 - p is exact here, and the lower branch keeps full relative accuracy.
        return -std_normal_quantile(1.0 - p);
    }

    // Acklam's rational approximation (relative error ~1.2e-9) on the lower half.
    static constexpr std::array<double, 6> a = {-3.969683028665376e+01, 2.209460984245205e+02,
                                                -2.759285104469687e+02, 1.383577518672690e+02,
                                                -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr std::array<double, 5> b = {-5.447609879822406e+01, 1.615858368580409e+02,
                                                -1.556989798598866e+02, 6.680131188771972e+01,
                                                -1.328068155288572e+01};
    static constexpr std::array<double, 6> c = {-7.784894002430293e-03, -3.223964580411365e-01,
                                                -2.400758277161838e+00, -2.549732539343734e+00,
                                                4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr std::array<double, 4> d = {7.784695709041462e-03, 3.224671290700398e-01,
                                                2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x = 0.0;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }

    // Halley refinement against the erfc-based cdf; two steps reach double precision.
    for (int step = 0; step < 2; ++step) {
        const double e = std_normal_cdf(x) - p;
        const double u = e * std::sqrt(kTwoPi) * std::exp(0.5 * x * x);
        if (!std::isfinite(u)) {
            break;
        }
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

OrthantProbability bvn_lower_cdf_flagged(const BivariateSpec& spec) {
    validate(spec);
    const double raw = raw_lower_cdf(spec);
    if (raw < kUnderflowProbability) {
        const bool empty_region = spec.rho <= -kDegenerateRho && spec.h <= -spec.k;
        return {0.0, !empty_region};
    }
    return {raw, false};
}

double bvn_lower_cdf(const BivariateSpec& spec) { return bvn_lower_cdf_flagged(spec).value; }

double truncated_bvn_lower_mean(const BivariateSpec& spec) {
    const double prob = bvn_lower_cdf(spec);
    if (!(prob > 0.0)) {
        throw NumericalError("truncated_bvn_lower_mean: conditioning region has zero probability");
    }
    const double h = spec.h;
    const double k = spec.k;
    const double rho = spec.rho;

    double mean = 0.0;
    if (rho >= kDegenerateRho) {
        const double m = std::min(h, k);
        mean = -std_normal_pdf(m) / prob;
    } else if (rho <= -kDegenerateRho) {
        // Z1 restricted to [-k, h].
        mean = (std_normal_pdf(-k) - std_normal_pdf(h)) / prob;
    } else {
        const double s = std::sqrt((1.0 - rho) * (1.0 + rho));
        const double num = std_normal_pdf(h) * std_normal_cdf((k - rho * h) / s) +
                           rho * std_normal_pdf(k) * std_normal_cdf((h - rho * k) / s);
        mean = -num / prob;
    }
    return std::min(mean, h);
}

}  // namespace sysrisk
