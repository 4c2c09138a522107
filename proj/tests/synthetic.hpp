#pragma once

// Seeded Gaussian return panels for pipeline tests and the acceptance run.

#include <Eigen/Dense>
#include <chrono>
#include <random>
#include <string>
#include <vector>

#include "sysrisk/panel.hpp"

namespace synth {

struct Regime {
    std::size_t rows;
    Eigen::MatrixXd cov;
};

inline std::vector<std::string> labels(std::size_t p, const std::string& prefix = "c") {
    std::vector<std::string> out;
    for (std::size_t j = 0; j < p; ++j) {
        out.push_back(prefix + std::to_string(j));
    }
    return out;
}

/// Weekly (Friday) dates from 2008-01-04.
inline std::vector<sysrisk::Date> fridays(std::size_t n) {
    using namespace std::chrono;
    std::vector<sysrisk::Date> dates;
    const sysrisk::Date start = sys_days(year{2008} / January / 4);
    for (std::size_t t = 0; t < n; ++t) {
        dates.push_back(start + days(7 * static_cast<int>(t)));
    }
    return dates;
}

/// Rows drawn i.i.d. N(mu, cov) within each regime, regimes stacked in order.
inline Eigen::MatrixXd draw(std::uint64_t seed, const Eigen::VectorXd& mu,
                            const std::vector<Regime>& regimes) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::size_t n = 0;
    for (const auto& r : regimes) {
        n += r.rows;
    }
    const auto p = mu.size();
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), p);
    Eigen::Index row = 0;
    for (const auto& r : regimes) {
        const Eigen::MatrixXd l = r.cov.llt().matrixL();
        for (std::size_t t = 0; t < r.rows; ++t, ++row) {
            Eigen::VectorXd e(p);
            for (Eigen::Index j = 0; j < p; ++j) {
                e(j) = z(rng);
            }
            x.row(row) = (mu + l * e).transpose();
        }
    }
    return x;
}

inline sysrisk::ReturnPanel weekly_returns(std::uint64_t seed, const Eigen::VectorXd& mu,
                                           const std::vector<Regime>& regimes,
                                           std::vector<std::string> names = {}) {
    Eigen::MatrixXd x = draw(seed, mu, regimes);
    if (names.empty()) {
        names = labels(static_cast<std::size_t>(mu.size()));
    }
    auto dates = fridays(static_cast<std::size_t>(x.rows()));
    return sysrisk::ReturnPanel(std::move(dates), std::move(names), std::move(x),
                                sysrisk::PanelKind::Returns, sysrisk::Frequency::Weekly);
}

/// Equicorrelated block: variance v, correlation r.
inline Eigen::MatrixXd equicorrelated(std::size_t p, double v, double r) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Constant(p, p, r * v);
    c.diagonal().setConstant(v);
    return c;
}

}  // namespace synth
