#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sysrisk/panel.hpp"
#include "sysrisk/risk_measures.hpp"

namespace sysrisk {

struct GaussianModel;

/// Safe set W and distressed set D as indices into a model's institutions.
/// Coalition bit k stands for distressed[k].
struct InstitutionPartition {
    std::vector<std::string> labels;
    std::vector<std::size_t> safe;
    std::vector<std::size_t> distressed;

    std::size_t d() const { return distressed.size(); }

    /// Every label must be named in exactly one of the two sets; both nonempty.
    /// Throws ConfigError naming the offending institution.
    static InstitutionPartition from_labels(const std::vector<std::string>& labels,
                                            const std::vector<std::string>& safe_names,
                                            const std::vector<std::string>& distressed_names);
};

/// Subset of D as a bitset over D's ordering.
using Coalition = std::uint32_t;

inline int coalition_size(Coalition s) { return __builtin_popcount(s); }
inline bool contains(Coalition s, std::size_t j) { return (s >> j) & 1u; }

/// c(S) for every S subset of D, indexed by bitset.
class CoalitionTable {
public:
    /// Throws DomainError unless costs has 2^d finite entries with costs[0] == 0.
    CoalitionTable(std::size_t d, std::vector<double> costs);

    std::size_t d() const { return d_; }
    Coalition grand() const { return static_cast<Coalition>((std::uint64_t{1} << d_) - 1); }
    double operator[](Coalition s) const { return costs_[s]; }
    double total() const { return costs_[grand()]; }
    const std::vector<double>& costs() const { return costs_; }

private:
    std::size_t d_;
    std::vector<double> costs_;
};

constexpr std::size_t kDefaultPlayerCap = 20;

struct GameConfig {
    RiskConfig risk;
    std::size_t max_players = kDefaultPlayerCap;
    /// Worker threads for table construction; 0 picks the hardware concurrency.
    unsigned threads = 1;
};

/// (1/|W|) sum_{i in W} alpha_i [ES_tau1(X_i) - SCoES_{i|S}]; exactly 0 for the empty
/// coalition. Solver failures are rethrown as NumericalError tagged with (i, S).
double coalition_cost(const GaussianModel& model, const InstitutionPartition& part, Coalition s,
                      const RiskConfig& cfg);

/// All 2^d costs. Any failing coalition fails the whole table (the lowest failing
/// bitset is reported, independent of scheduling). Throws ConfigError above the cap.
CoalitionTable build_table(const GaussianModel& model, const InstitutionPartition& part,
                           const GameConfig& cfg);

std::vector<double> shapley(const CoalitionTable& table);
std::vector<double> banzhaf(const CoalitionTable& table);

/// |c(S + j) - c(S)| <= tol for every S not containing j.
bool is_dummy(std::size_t j, const CoalitionTable& table, double tol);

/// Coalitions charged more than their stand-alone cost, ascending by bitset;
/// tolerance 1e-12 max(1, |c(D)|). Empty means the allocation lies in the core.
std::vector<Coalition> check_no_undercut(const std::vector<double>& allocation,
                                         const CoalitionTable& table);

struct SubadditivityReport {
    bool subadditive = true;
    Coalition s = 0;  ///< first violating pair (s < t), when not subadditive
    Coalition t = 0;
};

/// c(S u T) <= c(S) + c(T) + tol over disjoint nonempty S, T. O(3^d).
SubadditivityReport is_subadditive(const CoalitionTable& table, double tol);

struct AttributionResult {
    Date window_date{};
    std::vector<std::string> roster;  ///< active distressed institutions, in D order
    std::vector<double> shapley;
    std::vector<double> banzhaf;
    double total = 0.0;
};

AttributionResult attribute(const CoalitionTable& table, Date window_date,
                            std::vector<std::string> roster);

/// Member labels of a coalition, e.g. "{Greece, Italy}".
std::string describe(Coalition s, const InstitutionPartition& part);

}  // namespace sysrisk
