#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sysrisk/risk_measures.hpp"

namespace sysrisk {

struct ValidationCheck {
    std::string suite;
    std::string name;
    double value = 0.0;      ///< measured statistic (z-score, error, ...)
    double tolerance = 0.0;  ///< passes when value <= tolerance
    bool passed = false;
};

struct ValidationReport {
    std::uint64_t seed = 0;
    std::vector<ValidationCheck> checks;

    std::size_t failures() const;
    bool passed() const { return failures() == 0; }
    /// Fixed-format listing; identical options give identical text.
    std::string text() const;
};

using ScoesFunction = std::function<double(const CoalitionPairModel&, double, double)>;

struct ValidationOptions {
    std::uint64_t seed = 1;
    std::size_t specs = 20;            ///< random 2-d Gaussian specs, |rho| <= 0.95
    std::size_t draws = 10'000'000;    ///< per spec
    double z_tolerance = 4.0;          ///< Monte Carlo standard errors
    std::size_t tables = 100;          ///< random cost tables, d <= 6
    /// Test hook: replaces the closed-form SCoES in the Monte Carlo suite.
    ScoesFunction scoes_override;
};

/// Monte Carlo oracle suite (closed-form vs simulated quantile, ES, SCoVaR,
/// SCoES) plus the game property suite.
ValidationReport run_validation(const ValidationOptions& opts);

}  // namespace sysrisk
