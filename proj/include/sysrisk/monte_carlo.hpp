#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "sysrisk/risk_measures.hpp"

namespace sysrisk {

/// Point estimate with a batch-means standard error.
struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;

    /// |value - reference| in standard errors.
    double z_score(double reference) const;
};

struct PairMcEstimates {
    McEstimate quantile;  ///< tau1-quantile of X_i
    McEstimate es;        ///< tail mean of X_i below its tau1-quantile
    McEstimate scovar;
    McEstimate scoes;
    std::size_t draws = 0;
};

struct McConfig {
    std::size_t draws = 10'000'000;
    std::size_t batches = 50;
    std::uint64_t seed = 1;
    DistressEvent event = DistressEvent::QuantileThreshold;
};

/// Simulates (X_i, coalition sum) from the pair law and evaluates the empirical
/// estimators batch by batch. Each batch draws from its own generator seeded by
/// (seed, batch), so results depend only on the config.
PairMcEstimates monte_carlo_pair(const CoalitionPairModel& pair, double tau1, double tau2,
                                 const McConfig& cfg);

/// Generator for batch b of a seeded run.
std::mt19937_64 batch_generator(std::uint64_t seed, std::uint64_t batch);

}  // namespace sysrisk
