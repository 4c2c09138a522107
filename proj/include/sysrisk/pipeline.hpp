#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sysrisk/panel.hpp"
#include "sysrisk/risk_game.hpp"
#include "sysrisk/run_config.hpp"

namespace sysrisk {

/// One rolling window: either an attribution or the reason it failed.
struct WindowRow {
    Date date{};
    bool ok = false;
    AttributionResult result;  ///< valid when ok
    std::string failure;       ///< set when !ok
};

struct AttributionSeries {
    std::vector<std::string> distressed;  ///< full D, column order of every output
    std::vector<WindowRow> rows;          ///< strictly increasing dates

    std::size_t failed() const;

    /// Value of institution `name` in a row, NaN when it was not in that window's roster.
    static double lookup(const WindowRow& row, const std::vector<double>& values,
                         const std::string& name);
};

/// Levels file -> log returns x100 at the configured frequency.
ReturnPanel load_returns(const RunConfig& cfg);

/// Per window: sample moments -> graphical lasso -> coalition table -> Shapley,
/// Banzhaf and total. Distressed institutions unavailable in a window leave that
/// window's roster; a window with an unavailable safe institution, an empty
/// roster or a failed solve becomes a failed row. Throws ConfigError when W or D
/// do not match the panel header.
AttributionSeries run_rolling_attribution(const ReturnPanel& returns, const RunConfig& cfg);
AttributionSeries run_rolling_attribution(const RunConfig& cfg);

/// |sum shapley - total| <= 1e-10 max(1, |total|) for every successful row.
bool efficiency_holds(const AttributionSeries& series);

}  // namespace sysrisk
