#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "sysrisk/errors.hpp"
#include "sysrisk/gauss.hpp"

using namespace sysrisk;

namespace {

// Oracles below use only the C library erfc/exp and adaptive quadrature, never the
// implementation under test.
double oracle_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double oracle_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double quad_cdf(double x) {
    using boost::math::quadrature::gauss_kronrod;
    return gauss_kronrod<double, 61>::integrate(oracle_pdf, -std::numeric_limits<double>::infinity(),
                                                x, 15, 1e-15);
}

double quad_bvn(double h, double k, double rho) {
    using boost::math::quadrature::gauss_kronrod;
    const double s = std::sqrt(1.0 - rho * rho);
    auto f = [&](double x) { return oracle_pdf(x) * oracle_cdf((k - rho * x) / s); };
    return gauss_kronrod<double, 61>::integrate(f, -std::numeric_limits<double>::infinity(), h, 15,
                                                1e-15);
}

double quad_truncated_mean(double h, double k, double rho) {
    using boost::math::quadrature::gauss_kronrod;
    const double s = std::sqrt(1.0 - rho * rho);
    auto f = [&](double x) { return x * oracle_pdf(x) * oracle_cdf((k - rho * x) / s); };
    const double num = gauss_kronrod<double, 61>::integrate(
        f, -std::numeric_limits<double>::infinity(), h, 15, 1e-15);
    return num / quad_bvn(h, k, rho);
}

}  // namespace

TEST(StdNormal, PdfValues) {
    EXPECT_DOUBLE_EQ(std_normal_pdf(0.0), 0.3989422804014327);
    EXPECT_EQ(std_normal_pdf(1.5), std_normal_pdf(-1.5));
    // 40-digit series evaluation: 0.24197072451914334979...
    EXPECT_NEAR(std_normal_pdf(1.0), 0.24197072451914337, 1e-16);
    EXPECT_GT(std_normal_pdf(30.0), 0.0);
}

TEST(StdNormal, CdfValues) {
    EXPECT_EQ(std_normal_cdf(0.0), 0.5);
    EXPECT_NEAR(quad_cdf(-1.6448536269514722), 0.05, 1e-12);
    EXPECT_NEAR(std_normal_cdf(-1.6448536269514722), 0.05, 1e-12);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-8.0, 8.0);
    for (int i = 0; i < 200; ++i) {
        const double x = u(rng);
        EXPECT_NEAR(std_normal_cdf(x) + std_normal_cdf(-x), 1.0, 1e-15);
        EXPECT_NEAR(std_normal_cdf(x), quad_cdf(x), 1e-13);
    }
}

TEST(StdNormal, CdfMonotone) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        double a = u(rng);
        double b = u(rng);
        if (a > b) {
            std::swap(a, b);
        }
        EXPECT_LE(std_normal_cdf(a), std_normal_cdf(b));
    }
}

TEST(StdNormal, Quantile) {
    EXPECT_EQ(std_normal_quantile(0.5), 0.0);

    // Bisection on the quadrature cdf.
    double lo = -3.0;
    double hi = 0.0;
    for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
        const double mid = 0.5 * (lo + hi);
        (quad_cdf(mid) < 0.05 ? lo : hi) = mid;
    }
    EXPECT_NEAR(lo, -1.6448536269514722, 1e-12);
    EXPECT_NEAR(std_normal_quantile(0.05), -1.6448536269514722, 1e-14);

    std::mt19937_64 rng(3);
    // Above x = 5 the upper-tail cdf has too few bits left for a 1e-10 round trip.
    std::uniform_real_distribution<double> u(-7.5, 5.0);
    for (int i = 0; i < 500; ++i) {
        const double x = u(rng);
        EXPECT_NEAR(std_normal_quantile(std_normal_cdf(x)), x, 1e-10) << x;
    }
    for (double p : {1e-300, 1e-20, 1e-8, 0.001, 0.02425, 0.3, 0.7, 0.975, 1.0 - 1e-12}) {
        EXPECT_NEAR(std_normal_cdf(std_normal_quantile(p)), p, 1e-12 * std::max(1.0, p)) << p;
        EXPECT_NEAR(std_normal_cdf(std_normal_quantile(p)) / p, 1.0, 1e-12) << p;
    }
}

TEST(StdNormal, DomainErrors) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_THROW(std_normal_pdf(nan), DomainError);
    EXPECT_THROW(std_normal_cdf(inf), DomainError);
    EXPECT_THROW(std_normal_quantile(0.0), DomainError);
    EXPECT_THROW(std_normal_quantile(1.0), DomainError);
    EXPECT_THROW(std_normal_quantile(nan), DomainError);
    EXPECT_THROW(bvn_lower_cdf({0.0, 0.0, 1.0000001}), DomainError);
    EXPECT_THROW(bvn_lower_cdf({nan, 0.0, 0.5}), DomainError);
}

TEST(Bivariate, ClosedFormIdentities) {
    EXPECT_NEAR(bvn_lower_cdf({0.0, 0.0, 0.5}), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(quad_bvn(0.0, 0.0, 0.5), 1.0 / 3.0, 1e-13);
    for (double rho : {-0.99, -0.93, -0.8, -0.5, -0.2, 0.1, 0.4, 0.7, 0.93, 0.999}) {
        EXPECT_NEAR(bvn_lower_cdf({0.0, 0.0, rho}), 0.25 + std::asin(rho) / (2.0 * std::numbers::pi),
                    1e-15)
            << rho;
    }
    for (double h : {-3.0, -1.2, 0.0, 0.7, 2.5}) {
        for (double k : {-2.0, 0.3, 1.9}) {
            EXPECT_NEAR(bvn_lower_cdf({h, k, 0.0}), oracle_cdf(h) * oracle_cdf(k), 2e-16);
            EXPECT_NEAR(bvn_lower_cdf({h, k, 1.0}), oracle_cdf(std::min(h, k)), 2e-16);
            EXPECT_NEAR(bvn_lower_cdf({h, k, -1.0}), std::max(0.0, oracle_cdf(h) - oracle_cdf(-k)),
                        1e-15);
        }
    }
}

TEST(Bivariate, MatchesQuadratureToTwelveDigits) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> thr(-4.0, 3.0);
    std::uniform_real_distribution<double> cor(-0.999, 0.999);
    for (int i = 0; i < 300; ++i) {
        const double h = thr(rng);
        const double k = thr(rng);
        const double rho = cor(rng);
        EXPECT_NEAR(bvn_lower_cdf({h, k, rho}), quad_bvn(h, k, rho), 1e-12)
            << h << " " << k << " " << rho;
    }
}

TEST(Bivariate, SymmetryAndMonotonicity) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> thr(-3.0, 3.0);
    std::uniform_real_distribution<double> cor(-0.98, 0.98);
    std::uniform_real_distribution<double> step(0.0, 0.5);
    for (int i = 0; i < 500; ++i) {
        const double h = thr(rng);
        const double k = thr(rng);
        const double rho = cor(rng);
        const double base = bvn_lower_cdf({h, k, rho});
        EXPECT_EQ(base, bvn_lower_cdf({k, h, rho}));
        EXPECT_GE(base, 0.0);
        EXPECT_LE(base, std::min(oracle_cdf(h), oracle_cdf(k)) + 1e-15);
        const double dh = step(rng);
        EXPECT_LE(base, bvn_lower_cdf({h + dh, k, rho}) + 1e-15);
        EXPECT_LE(base, bvn_lower_cdf({h, k + dh, rho}) + 1e-15);
        EXPECT_LE(base, bvn_lower_cdf({h, k, std::min(rho + dh, 1.0)}) + 1e-15);
    }
}

TEST(Bivariate, UnderflowIsClampedAndFlagged) {
    const OrthantProbability tiny = bvn_lower_cdf_flagged({-30.0, -30.0, 0.0});
    EXPECT_EQ(tiny.value, 0.0);
    EXPECT_TRUE(tiny.underflow);
    EXPECT_TRUE(bvn_lower_cdf_flagged({-27.0, -27.0, 0.0}).underflow);
    // An exactly empty region is zero, not underflow.
    EXPECT_FALSE(bvn_lower_cdf_flagged({-1.0, 0.5, -1.0}).underflow);
    const OrthantProbability normal = bvn_lower_cdf_flagged({-1.0, -1.0, 0.3});
    EXPECT_FALSE(normal.underflow);
    EXPECT_GT(normal.value, 0.0);
}

TEST(TruncatedMean, LimitsAndQuadrature) {
    for (double h : {-2.5, -1.0, 0.0, 1.3}) {
        const double uni = -oracle_pdf(h) / oracle_cdf(h);
        // Second threshold far out: constraint is vacuous in double precision.
        EXPECT_NEAR(truncated_bvn_lower_mean({h, 40.0, 0.6}), uni, 1e-14);
        EXPECT_NEAR(truncated_bvn_lower_mean({h, 40.0, -0.3}), uni, 1e-14);
        EXPECT_NEAR(truncated_bvn_lower_mean({h, -0.5, 0.0}), uni, 1e-14);
    }
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> thr(-2.5, 2.0);
    std::uniform_real_distribution<double> cor(-0.95, 0.95);
    for (int i = 0; i < 200; ++i) {
        const double h = thr(rng);
        const double k = thr(rng);
        const double rho = cor(rng);
        const double m = truncated_bvn_lower_mean({h, k, rho});
        EXPECT_LE(m, h);
        EXPECT_NEAR(m, quad_truncated_mean(h, k, rho), 1e-9) << h << " " << k << " " << rho;
    }
}

TEST(TruncatedMean, DegenerateCorrelation) {
    EXPECT_NEAR(truncated_bvn_lower_mean({-1.0, -0.5, 1.0}), -oracle_pdf(-1.0) / oracle_cdf(-1.0),
                1e-14);
    EXPECT_NEAR(truncated_bvn_lower_mean({-0.5, -1.0, 1.0}), -oracle_pdf(-1.0) / oracle_cdf(-1.0),
                1e-14);
    // rho = -1: Z1 uniform-truncated to [-k, h] = [-1, 0.5].
    const double interval = (oracle_pdf(-1.0) - oracle_pdf(0.5)) / (oracle_cdf(0.5) - oracle_cdf(-1.0));
    EXPECT_NEAR(truncated_bvn_lower_mean({0.5, 1.0, -1.0}), interval, 1e-14);
    EXPECT_THROW(truncated_bvn_lower_mean({-1.0, -1.0, -1.0}), NumericalError);
    EXPECT_THROW(truncated_bvn_lower_mean({-40.0, -40.0, 0.0}), NumericalError);
}

TEST(TruncatedMean, MonteCarloAtHighCorrelation) {
    // 1e7 seeded draws of (Z1, Z2) with rho = 0.9, region {Z1 <= -1.6449, Z2 <= -1.6449}.
    const double h = -1.6449;
    const double rho = 0.9;
    const double s = std::sqrt(1.0 - rho * rho);
    std::mt19937_64 rng(20240501);
    std::normal_distribution<double> n01;
    double sum = 0.0;
    double sum_sq = 0.0;
    long count = 0;
    for (long i = 0; i < 10'000'000; ++i) {
        const double z1 = n01(rng);
        const double z2 = rho * z1 + s * n01(rng);
        if (z1 <= h && z2 <= h) {
            sum += z1;
            sum_sq += z1 * z1;
            ++count;
        }
    }
    const double mean = sum / count;
    const double se = std::sqrt((sum_sq / count - mean * mean) / count);
    EXPECT_NEAR(truncated_bvn_lower_mean({h, h, rho}), mean, 3.0 * se);
}

// All four primitives against one shared set of 1e7 seeded draws, 50 random specs.
TEST(GaussCore, MonteCarloAgreementOnRandomSpecs) {
    constexpr long n = 10'000'000;
    std::mt19937_64 rng(424242);
    std::normal_distribution<double> n01;
    std::vector<double> z(n);
    std::vector<double> w(n);
    for (long i = 0; i < n; ++i) {
        z[i] = n01(rng);
        w[i] = n01(rng);
    }
    std::vector<double> sorted = z;
    std::sort(sorted.begin(), sorted.end());

    std::mt19937_64 spec_rng(17);
    std::uniform_real_distribution<double> thr(-2.0, 1.0);
    std::uniform_real_distribution<double> cor(-0.95, 0.95);
    std::uniform_real_distribution<double> prob(0.02, 0.98);
    for (int t = 0; t < 50; ++t) {
        const double h = thr(spec_rng);
        const double k = thr(spec_rng);
        const double rho = cor(spec_rng);
        const double p = prob(spec_rng);
        const double s = std::sqrt(1.0 - rho * rho);

        long below = 0;
        long joint = 0;
        double tail_sum = 0.0;
        double tail_sq = 0.0;
        for (long i = 0; i < n; ++i) {
            below += z[i] <= h;
            if (z[i] <= h && rho * z[i] + s * w[i] <= k) {
                ++joint;
                tail_sum += z[i];
                tail_sq += z[i] * z[i];
            }
        }
        if (joint < 5000) {
            // Too few draws in the region for a meaningful tail mean; redraw the spec.
            --t;
            continue;
        }
        const double cdf_mc = static_cast<double>(below) / n;
        EXPECT_NEAR(std_normal_cdf(h), cdf_mc, 4.0 * std::sqrt(cdf_mc * (1 - cdf_mc) / n));

        const double joint_mc = static_cast<double>(joint) / n;
        EXPECT_NEAR(bvn_lower_cdf({h, k, rho}), joint_mc,
                    4.0 * std::sqrt(joint_mc * (1 - joint_mc) / n));

        const double mean_mc = tail_sum / joint;
        const double se_mean = std::sqrt((tail_sq / joint - mean_mc * mean_mc) / joint);
        EXPECT_NEAR(truncated_bvn_lower_mean({h, k, rho}), mean_mc, 4.0 * se_mean);

        const auto idx = static_cast<std::size_t>(std::ceil(p * n)) - 1;
        const double q_mc = sorted[idx];
        const double q = std_normal_quantile(p);
        EXPECT_NEAR(q, q_mc, 4.0 * std::sqrt(p * (1 - p) / n) / oracle_pdf(q));
    }
}
