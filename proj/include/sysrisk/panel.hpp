#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sysrisk {

using Date = std::chrono::sys_days;

/// Parses a strict ISO-8601 calendar date (YYYY-MM-DD).
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date date);

enum class PanelKind { Levels, Returns };
enum class Frequency { Daily, Weekly };

const char* to_string(Frequency frequency);

/// Inclusive row range on which an institution has observations.
struct Availability {
    std::size_t first = 0;
    std::size_t last = 0;

    bool covers(std::size_t from, std::size_t to) const { return first <= from && to <= last; }
};

/// Dated matrix of institution observations. Cells outside an institution's
/// availability range are NaN; cells inside are finite. Immutable once built.
class ReturnPanel {
public:
    /// Validates the invariants and derives availability from the NaN pattern.
    /// Throws DataError on any violation.
    ReturnPanel(std::vector<Date> dates, std::vector<std::string> institutions,
                Eigen::MatrixXd values, PanelKind kind, Frequency frequency = Frequency::Daily);

    std::size_t rows() const { return dates_.size(); }
    std::size_t cols() const { return institutions_.size(); }

    const std::vector<Date>& dates() const { return dates_; }
    const std::vector<std::string>& institutions() const { return institutions_; }
    const Eigen::MatrixXd& values() const { return values_; }
    PanelKind kind() const { return kind_; }
    Frequency frequency() const { return frequency_; }
    const Availability& availability(std::size_t column) const { return availability_.at(column); }

    double value(std::size_t row, std::size_t column) const { return values_(row, column); }

    /// Column index of an institution, or nullopt.
    std::optional<std::size_t> find(std::string_view name) const;

private:
    std::vector<Date> dates_;
    std::vector<std::string> institutions_;
    Eigen::MatrixXd values_;
    PanelKind kind_;
    Frequency frequency_;
    std::vector<Availability> availability_;
};

struct CsvFormat {
    char delimiter = ',';
};

/// Reads a levels CSV: header `date,<name1>,...`, one ISO date per row, decimal
/// cells, empty cells only at the start or end of a column.
ReturnPanel load_levels(std::istream& in, const CsvFormat& format = {});
ReturnPanel load_levels_file(const std::string& path, const CsvFormat& format = {});

/// 100 * ln(level_t / level_{t-1}); the first date is dropped.
ReturnPanel log_returns(const ReturnPanel& levels);

/// ISO-week aggregation of a daily panel. Levels keep the last observation of
/// the week, returns are summed. Weeks without rows do not appear.
ReturnPanel weekly_aggregate(const ReturnPanel& panel);

/// Rows [first_row, last_row] of a panel restricted to institutions available
/// over the whole range. Holds a pointer to the panel, which must outlive it.
class PanelWindow {
public:
    PanelWindow(const ReturnPanel& panel, std::size_t first_row, std::size_t last_row,
                std::vector<std::size_t> columns)
        : panel_(&panel), first_row_(first_row), last_row_(last_row), columns_(std::move(columns)) {}

    std::size_t rows() const { return last_row_ - first_row_ + 1; }
    std::size_t first_row() const { return first_row_; }
    std::size_t last_row() const { return last_row_; }
    Date end_date() const { return panel_->dates()[last_row_]; }
    const std::vector<std::size_t>& columns() const { return columns_; }
    std::vector<std::string> labels() const;
    std::vector<Date> dates() const;
    const ReturnPanel& panel() const { return *panel_; }

    /// rows() x columns().size() copy of the windowed values.
    Eigen::MatrixXd matrix() const;

private:
    const ReturnPanel* panel_;
    std::size_t first_row_;
    std::size_t last_row_;
    std::vector<std::size_t> columns_;
};

/// One window per terminal row t >= n - 1, each of exactly n rows.
std::vector<PanelWindow> rolling_windows(const ReturnPanel& panel, std::size_t n);

struct InstitutionStats {
    std::string name;
    std::size_t observations = 0;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double std_dev = 0.0;                ///< sample standard deviation (n - 1)
    std::optional<double> skewness;      ///< m3 / m2^1.5; empty for a constant series
    std::optional<double> kurtosis;      ///< m4 / m2^2 (normal = 3); empty for a constant series
    double q01 = 0.0;                    ///< 1% quantile, linear interpolation between order statistics
    std::optional<double> jarque_bera;   ///< (n/6) (skew^2 + (kurt - 3)^2 / 4)
};

struct SummaryStats {
    Frequency frequency = Frequency::Daily;
    std::vector<InstitutionStats> institutions;
};

/// Table of moment statistics per institution over its availability range.
SummaryStats summary_stats(const ReturnPanel& returns);

/// Moment statistics of a single series (at least 4 values).
InstitutionStats series_stats(std::string name, std::vector<double> values);

/// Linear-interpolation quantile of an ascending-sorted sample (R type 7).
double interpolated_quantile(const std::vector<double>& sorted, double p);

}  // namespace sysrisk
