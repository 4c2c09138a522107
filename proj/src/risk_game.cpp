#include "sysrisk/risk_game.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "sysrisk/covariance.hpp"
#include "sysrisk/errors.hpp"

namespace sysrisk {
namespace {

// (d - s)! (s - 1)! / d!, 1 <= s <= d.
std::vector<double> shapley_weights(std::size_t d) {
    std::vector<double> w(d + 1, 0.0);
    for (std::size_t s = 1; s <= d; ++s) {
        if (d > 18) {
            w[s] = std::exp(std::lgamma(double(d - s + 1)) + std::lgamma(double(s)) -
                            std::lgamma(double(d + 1)));
        } else {
            double num = 1.0;
            for (std::size_t k = 2; k <= d - s; ++k) {
                num *= double(k);
            }
            for (std::size_t k = 2; k <= s - 1; ++k) {
                num *= double(k);
            }
            double den = 1.0;
            for (std::size_t k = 2; k <= d; ++k) {
                den *= double(k);
            }
            w[s] = num / den;
        }
    }
    return w;
}

}  // namespace

InstitutionPartition InstitutionPartition::from_labels(
    const std::vector<std::string>& labels, const std::vector<std::string>& safe_names,
    const std::vector<std::string>& distressed_names) {
    InstitutionPartition part;
    part.labels = labels;
    auto in = [](const std::vector<std::string>& set, const std::string& name) {
        return std::find(set.begin(), set.end(), name) != set.end();
    };
    for (const auto& name : safe_names) {
        if (in(distressed_names, name)) {
            throw ConfigError("institution '" + name + "' is listed as both safe and distressed");
        }
        if (!in(labels, name)) {
            throw ConfigError("safe institution '" + name + "' is not in the model");
        }
    }
    for (const auto& name : distressed_names) {
        if (!in(labels, name)) {
            throw ConfigError("distressed institution '" + name + "' is not in the model");
        }
    }
    for (std::size_t k = 0; k < labels.size(); ++k) {
        if (in(safe_names, labels[k])) {
            part.safe.push_back(k);
        } else if (in(distressed_names, labels[k])) {
            part.distressed.push_back(k);
        } else {
            throw ConfigError("institution '" + labels[k] + "' is neither safe nor distressed");
        }
    }
    if (part.safe.empty() || part.distressed.empty()) {
        throw ConfigError("both the safe and the distressed set must be nonempty");
    }
    if (part.distressed.size() > 31) {
        throw ConfigError("at most 31 distressed institutions fit a coalition bitset");
    }
    return part;
}

CoalitionTable::CoalitionTable(std::size_t d, std::vector<double> costs)
    : d_(d), costs_(std::move(costs)) {
    if (d > 31 || costs_.size() != (std::size_t{1} << d)) {
        throw DomainError("coalition table needs 2^d entries");
    }
    if (costs_[0] != 0.0) {
        throw DomainError("coalition table: cost of the empty coalition must be 0");
    }
    for (double c : costs_) {
        if (!std::isfinite(c)) {
            throw DomainError("coalition table has a non-finite cost");
        }
    }
}

std::string describe(Coalition s, const InstitutionPartition& part) {
    std::string out = "{";
    for (std::size_t k = 0; k < part.d(); ++k) {
        if (contains(s, k)) {
            if (out.size() > 1) {
                out += ", ";
            }
            out += part.labels[part.distressed[k]];
        }
    }
    return out + "}";
}

double coalition_cost(const GaussianModel& model, const InstitutionPartition& part, Coalition s,
                      const RiskConfig& cfg) {
    if (s == 0) {
        return 0.0;
    }
    std::vector<std::size_t> members;
    for (std::size_t k = 0; k < part.d(); ++k) {
        if (contains(s, k)) {
            members.push_back(part.distressed[k]);
        }
    }
    double sum = 0.0;
    for (std::size_t n = 0; n < part.safe.size(); ++n) {
        const std::size_t i = part.safe[n];
        try {
            const CoalitionPairModel pair = coalition_pair_model(model, i, members);
            const double es = gaussian_es(model.mu(i), model.sigma(i, i), cfg.tau1);
            sum += cfg.weight(n) * (es - scoes(pair, cfg.tau1, cfg.tau2));
        } catch (const Error& e) {
            throw NumericalError("institution " + part.labels[i] + ", coalition " +
                                 describe(s, part) + ": " + e.what());
        }
    }
    return sum / static_cast<double>(part.safe.size());
}

CoalitionTable build_table(const GaussianModel& model, const InstitutionPartition& part,
                           const GameConfig& cfg) {
    const std::size_t d = part.d();
    if (d > cfg.max_players) {
        throw ConfigError("d = " + std::to_string(d) + " exceeds the distressed-set cap of " +
                          std::to_string(cfg.max_players) +
                          " (2^d coalitions); raise the cap explicitly to proceed");
    }
    cfg.risk.validate(part.safe.size());
    const std::size_t n = std::size_t{1} << d;
    std::vector<double> costs(n, 0.0);

    unsigned threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                        : cfg.threads;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));

    std::atomic<std::size_t> next{1};
    std::mutex failure_mutex;
    std::size_t failed_at = n;
    std::exception_ptr failure;

    auto work = [&] {
        for (;;) {
            const std::size_t s = next.fetch_add(1);
            if (s >= n) {
                return;
            }
            try {
                costs[s] = coalition_cost(model, part, static_cast<Coalition>(s), cfg.risk);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (s < failed_at) {
                    failed_at = s;
                    failure = std::current_exception();
                }
            }
        }
    };
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(work);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return CoalitionTable(d, std::move(costs));
}

std::vector<double> shapley(const CoalitionTable& table) {
    const std::size_t d = table.d();
    const std::vector<double> w = shapley_weights(d);
    std::vector<double> phi(d, 0.0);
    for (Coalition s = 1; s <= table.grand(); ++s) {
        const double weight = w[coalition_size(s)];
        for (std::size_t j = 0; j < d; ++j) {
            if (contains(s, j)) {
                phi[j] += weight * (table[s] - table[s & ~(Coalition{1} << j)]);
            }
        }
        if (s == table.grand()) {
            break;
        }
    }
    return phi;
}

std::vector<double> banzhaf(const CoalitionTable& table) {
    const std::size_t d = table.d();
    std::vector<double> beta(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        const Coalition bit = Coalition{1} << j;
        double sum = 0.0;
        for (Coalition s = 0; s <= table.grand(); ++s) {
            if (!(s & bit)) {
                sum += table[s | bit] - table[s];
            }
            if (s == table.grand()) {
                break;
            }
        }
        beta[j] = std::ldexp(sum, -static_cast<int>(d - 1));
    }
    return beta;
}

bool is_dummy(std::size_t j, const CoalitionTable& table, double tol) {
    const Coalition bit = Coalition{1} << j;
    for (Coalition s = 0; s <= table.grand(); ++s) {
        if (!(s & bit) && std::fabs(table[s | bit] - table[s]) > tol) {
            return false;
        }
        if (s == table.grand()) {
            break;
        }
    }
    return true;
}

std::vector<Coalition> check_no_undercut(const std::vector<double>& allocation,
                                         const CoalitionTable& table) {
    if (allocation.size() != table.d()) {
        throw DomainError("allocation must have one entry per distressed institution");
    }
    const double tol = 1e-12 * std::max(1.0, std::fabs(table.total()));
    std::vector<Coalition> violations;
    for (Coalition s = 1; s <= table.grand(); ++s) {
        double charged = 0.0;
        for (std::size_t j = 0; j < table.d(); ++j) {
            if (contains(s, j)) {
                charged += allocation[j];
            }
        }
        if (charged > table[s] + tol) {
            violations.push_back(s);
        }
        if (s == table.grand()) {
            break;
        }
    }
    return violations;
}

SubadditivityReport is_subadditive(const CoalitionTable& table, double tol) {
    const Coalition all = table.grand();
    for (Coalition s = 1; s <= all && s != 0; ++s) {
        const Coalition rest = all & ~s;
        // Submasks t of the complement with t > s, so each unordered pair is seen once.
        for (Coalition t = rest; t != 0; t = (t - 1) & rest) {
            if (t > s && table[s | t] > table[s] + table[t] + tol) {
                SubadditivityReport r;
                r.subadditive = false;
                r.s = s;
                r.t = t;
                // Report the smallest t for this s.
                for (Coalition u = rest; u != 0; u = (u - 1) & rest) {
                    if (u > s && u < r.t && table[s | u] > table[s] + table[u] + tol) {
                        r.t = u;
                    }
                }
                return r;
            }
        }
        if (s == all) {
            break;
        }
    }
    return {};
}

AttributionResult attribute(const CoalitionTable& table, Date window_date,
                            std::vector<std::string> roster) {
    AttributionResult r;
    r.window_date = window_date;
    r.roster = std::move(roster);
    r.shapley = shapley(table);
    r.banzhaf = banzhaf(table);
    r.total = table.total();
    return r;
}

}  // namespace sysrisk
