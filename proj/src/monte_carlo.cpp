#include "sysrisk/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sysrisk/errors.hpp"

namespace sysrisk {
namespace {

McEstimate batch_mean(const std::vector<double>& estimates) {
    const double n = static_cast<double>(estimates.size());
    double mean = 0.0;
    for (double e : estimates) {
        mean += e;
    }
    mean /= n;
    double ss = 0.0;
    for (double e : estimates) {
        ss += (e - mean) * (e - mean);
    }
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

double tail_mean(const std::vector<double>& x, double level) {
    double sum = 0.0;
    std::size_t count = 0;
    for (double v : x) {
        if (v <= level) {
            sum += v;
            ++count;
        }
    }
    return sum / static_cast<double>(count);
}

}  // namespace

double McEstimate::z_score(double reference) const {
    return std::fabs(value - reference) / std_error;
}

std::mt19937_64 batch_generator(std::uint64_t seed, std::uint64_t batch) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(batch), static_cast<std::uint32_t>(batch >> 32)};
    return std::mt19937_64(seq);
}

PairMcEstimates monte_carlo_pair(const CoalitionPairModel& pair, double tau1, double tau2,
                                 const McConfig& cfg) {
    if (cfg.batches < 2 || cfg.draws < cfg.batches) {
        throw ConfigError("Monte Carlo needs at least 2 batches and one draw per batch");
    }
    const std::size_t per_batch = cfg.draws / cfg.batches;
    const double sd_i = std::sqrt(pair.var_i);
    const double sd_s = std::sqrt(pair.var_s);
    const double rho = pair.rho;
    const double rho_c = std::sqrt(std::max(0.0, (1.0 - rho) * (1.0 + rho)));

    std::vector<double> q(cfg.batches), es(cfg.batches), cv(cfg.batches), ce(cfg.batches);
    std::vector<double> x_i(per_batch), x_s(per_batch);
    for (std::size_t b = 0; b < cfg.batches; ++b) {
        auto rng = batch_generator(cfg.seed, b);
        std::normal_distribution<double> z;
        for (std::size_t r = 0; r < per_batch; ++r) {
            const double z1 = z(rng);
            const double z2 = z(rng);
            x_i[r] = pair.mu_i + sd_i * z1;
            x_s[r] = pair.mu_s + sd_s * (rho * z1 + rho_c * z2);
        }
        q[b] = empirical_lower_quantile(x_i, tau1);
        es[b] = tail_mean(x_i, q[b]);
        cv[b] = empirical_scovar(x_i, x_s, tau1, tau2, cfg.event);
        ce[b] = empirical_scoes(x_i, x_s, tau1, tau2, cfg.event);
    }
    PairMcEstimates out;
    out.quantile = batch_mean(q);
    out.es = batch_mean(es);
    out.scovar = batch_mean(cv);
    out.scoes = batch_mean(ce);
    out.draws = per_batch * cfg.batches;
    return out;
}

}  // namespace sysrisk
