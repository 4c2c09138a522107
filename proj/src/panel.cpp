#include "sysrisk/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include "sysrisk/errors.hpp"

namespace sysrisk {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delimiter, start);
        if (pos == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            return fields;
        }
        fields.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
}

std::optional<double> parse_number(std::string_view text) {
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

Date monday_of(Date d) {
    const std::chrono::weekday wd{d};
    return d - std::chrono::days{wd.iso_encoding() - 1};
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    auto digits = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        int v = 0;
        const auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, v);
        if (ec != std::errc{} || ptr != text.data() + pos + len) {
            return std::nullopt;
        }
        return v;
    };
    const auto y = digits(0, 4);
    const auto m = digits(5, 2);
    const auto d = digits(8, 2);
    if (!y || !m || !d) {
        return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{*y},
                                          std::chrono::month{static_cast<unsigned>(*m)},
                                          std::chrono::day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) {
        return std::nullopt;
    }
    return Date{ymd};
}

std::string format_date(Date date) {
    const std::chrono::year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

const char* to_string(Frequency frequency) {
    return frequency == Frequency::Daily ? "daily" : "weekly";
}

ReturnPanel::ReturnPanel(std::vector<Date> dates, std::vector<std::string> institutions,
                         Eigen::MatrixXd values, PanelKind kind, Frequency frequency)
    : dates_(std::move(dates)),
      institutions_(std::move(institutions)),
      values_(std::move(values)),
      kind_(kind),
      frequency_(frequency) {
    if (static_cast<std::size_t>(values_.rows()) != dates_.size() ||
        static_cast<std::size_t>(values_.cols()) != institutions_.size()) {
        throw DataError("panel dimensions do not match dates x institutions");
    }
    if (dates_.empty() || institutions_.empty()) {
        throw DataError("panel must have at least one date and one institution");
    }
    for (std::size_t t = 1; t < dates_.size(); ++t) {
        if (!(dates_[t - 1] < dates_[t])) {
            throw DataError("panel dates must be strictly increasing (at " + format_date(dates_[t]) +
                            ")");
        }
    }
    std::set<std::string> seen;
    availability_.reserve(institutions_.size());
    for (std::size_t j = 0; j < institutions_.size(); ++j) {
        if (!seen.insert(institutions_[j]).second) {
            throw DataError("duplicate institution '" + institutions_[j] + "'");
        }
        std::optional<std::size_t> first;
        std::size_t last = 0;
        for (std::size_t t = 0; t < dates_.size(); ++t) {
            if (!std::isnan(values_(t, j))) {
                if (!std::isfinite(values_(t, j))) {
                    throw DataError("non-finite value for '" + institutions_[j] + "' at " +
                                    format_date(dates_[t]));
                }
                if (!first) {
                    first = t;
                } else if (last + 1 != t) {
                    throw DataError("missing interior value for '" + institutions_[j] + "' before " +
                                    format_date(dates_[t]));
                }
                last = t;
            }
        }
        if (!first) {
            throw DataError("institution '" + institutions_[j] + "' has no observations");
        }
        availability_.push_back({*first, last});
    }
}

std::optional<std::size_t> ReturnPanel::find(std::string_view name) const {
    for (std::size_t j = 0; j < institutions_.size(); ++j) {
        if (institutions_[j] == name) {
            return j;
        }
    }
    return std::nullopt;
}

ReturnPanel load_levels(std::istream& in, const CsvFormat& format) {
    std::string line;
    std::size_t line_no = 0;

    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) {
                line.erase(0, 3);
            }
            if (!trim(line).empty()) {
                return true;
            }
        }
        return false;
    };

    if (!next_line()) {
        throw ParseError("empty input, expected a header row", line_no, 0);
    }
    const auto header = split(line, format.delimiter);
    if (header.size() < 2 || header[0] != "date") {
        throw ParseError("header must start with 'date' followed by institution names", line_no, 1);
    }
    std::vector<std::string> names;
    std::set<std::string, std::less<>> seen;
    for (std::size_t c = 1; c < header.size(); ++c) {
        if (header[c].empty()) {
            throw ParseError("empty institution name", line_no, c + 1);
        }
        if (!seen.emplace(header[c]).second) {
            throw ParseError("duplicate institution name '" + std::string(header[c]) + "'", line_no,
                             c + 1);
        }
        names.emplace_back(header[c]);
    }

    std::vector<Date> dates;
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> row_lines;
    while (next_line()) {
        const auto fields = split(line, format.delimiter);
        if (fields.size() != header.size()) {
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(fields.size()),
                             line_no, 0);
        }
        const auto date = parse_date(fields[0]);
        if (!date) {
            throw ParseError("malformed date '" + std::string(fields[0]) + "'", line_no, 1);
        }
        if (!dates.empty()) {
            if (*date == dates.back()) {
                throw ParseError("duplicate date " + format_date(*date), line_no, 1);
            }
            if (*date < dates.back()) {
                throw ParseError("dates must be strictly increasing", line_no, 1);
            }
        }
        std::vector<double> row(names.size(), kNaN);
        for (std::size_t c = 1; c < fields.size(); ++c) {
            if (fields[c].empty()) {
                continue;
            }
            const auto v = parse_number(fields[c]);
            if (!v) {
                throw ParseError("non-numeric cell '" + std::string(fields[c]) + "'", line_no, c + 1);
            }
            row[c - 1] = *v;
        }
        dates.push_back(*date);
        rows.push_back(std::move(row));
        row_lines.push_back(line_no);
    }
    if (dates.empty()) {
        throw ParseError("no data rows", line_no, 0);
    }

    Eigen::MatrixXd values(dates.size(), names.size());
    for (std::size_t t = 0; t < rows.size(); ++t) {
        for (std::size_t j = 0; j < names.size(); ++j) {
            values(t, j) = rows[t][j];
        }
    }
    // Empty cells may only trim a column at either end.
    for (std::size_t j = 0; j < names.size(); ++j) {
        std::optional<std::size_t> first;
        std::size_t last = 0;
        for (std::size_t t = 0; t < rows.size(); ++t) {
            if (!std::isnan(values(t, j))) {
                first = first.value_or(t);
                last = t;
            }
        }
        if (!first) {
            throw ParseError("column '" + names[j] + "' has no values", row_lines.front(), j + 2);
        }
        for (std::size_t t = *first; t <= last; ++t) {
            if (std::isnan(values(t, j))) {
                throw ParseError("missing interior value for '" + names[j] + "'", row_lines[t], j + 2);
            }
        }
    }
    return ReturnPanel(std::move(dates), std::move(names), std::move(values), PanelKind::Levels,
                       Frequency::Daily);
}

ReturnPanel load_levels_file(const std::string& path, const CsvFormat& format) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open input file '" + path + "'");
    }
    return load_levels(in, format);
}

ReturnPanel log_returns(const ReturnPanel& levels) {
    if (levels.kind() != PanelKind::Levels) {
        throw DataError("log_returns expects a panel of levels");
    }
    if (levels.rows() < 2) {
        throw DataError("log_returns needs at least two dates");
    }
    const std::size_t n = levels.rows() - 1;
    Eigen::MatrixXd out = Eigen::MatrixXd::Constant(n, levels.cols(), kNaN);
    for (std::size_t j = 0; j < levels.cols(); ++j) {
        const Availability& a = levels.availability(j);
        for (std::size_t t = a.first; t <= a.last; ++t) {
            if (!(levels.value(t, j) > 0.0)) {
                throw DomainError("nonpositive level for '" + levels.institutions()[j] + "' at " +
                                  format_date(levels.dates()[t]));
            }
        }
        for (std::size_t t = a.first + 1; t <= a.last; ++t) {
            out(t - 1, j) = 100.0 * std::log(levels.value(t, j) / levels.value(t - 1, j));
        }
    }
    std::vector<Date> dates(levels.dates().begin() + 1, levels.dates().end());
    return ReturnPanel(std::move(dates), levels.institutions(), std::move(out), PanelKind::Returns,
                       levels.frequency());
}

ReturnPanel weekly_aggregate(const ReturnPanel& panel) {
    if (panel.rows() == 0) {
        throw DataError("weekly_aggregate: empty panel");
    }
    if (panel.frequency() != Frequency::Daily) {
        throw DataError("weekly_aggregate expects a daily panel");
    }
    // Row ranges sharing an ISO week (weeks start on Monday).
    std::vector<std::pair<std::size_t, std::size_t>> weeks;
    for (std::size_t t = 0; t < panel.rows(); ++t) {
        if (weeks.empty() || monday_of(panel.dates()[t]) != monday_of(panel.dates()[weeks.back().first])) {
            weeks.emplace_back(t, t);
        } else {
            weeks.back().second = t;
        }
    }

    Eigen::MatrixXd out = Eigen::MatrixXd::Constant(weeks.size(), panel.cols(), kNaN);
    std::vector<Date> dates;
    dates.reserve(weeks.size());
    for (std::size_t w = 0; w < weeks.size(); ++w) {
        const auto [from, to] = weeks[w];
        dates.push_back(panel.dates()[to]);
        for (std::size_t j = 0; j < panel.cols(); ++j) {
            const Availability& a = panel.availability(j);
            const std::size_t lo = std::max(from, a.first);
            const std::size_t hi = std::min(to, a.last);
            if (lo > hi) {
                continue;
            }
            if (panel.kind() == PanelKind::Levels) {
                out(w, j) = panel.value(hi, j);
            } else {
                double sum = 0.0;
                for (std::size_t t = lo; t <= hi; ++t) {
                    sum += panel.value(t, j);
                }
                out(w, j) = sum;
            }
        }
    }
    return ReturnPanel(std::move(dates), panel.institutions(), std::move(out), panel.kind(),
                       Frequency::Weekly);
}

std::vector<std::string> PanelWindow::labels() const {
    std::vector<std::string> out;
    out.reserve(columns_.size());
    for (auto c : columns_) {
        out.push_back(panel_->institutions()[c]);
    }
    return out;
}

std::vector<Date> PanelWindow::dates() const {
    return {panel_->dates().begin() + static_cast<std::ptrdiff_t>(first_row_),
            panel_->dates().begin() + static_cast<std::ptrdiff_t>(last_row_) + 1};
}

Eigen::MatrixXd PanelWindow::matrix() const {
    Eigen::MatrixXd m(rows(), columns_.size());
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        for (std::size_t t = 0; t < rows(); ++t) {
            m(t, c) = panel_->value(first_row_ + t, columns_[c]);
        }
    }
    return m;
}

std::vector<PanelWindow> rolling_windows(const ReturnPanel& panel, std::size_t n) {
    if (n < 2) {
        throw DomainError("rolling window length must be at least 2");
    }
    if (n > panel.rows()) {
        throw DataError("rolling window length " + std::to_string(n) + " exceeds panel length " +
                        std::to_string(panel.rows()));
    }
    std::vector<PanelWindow> windows;
    windows.reserve(panel.rows() - n + 1);
    for (std::size_t last = n - 1; last < panel.rows(); ++last) {
        const std::size_t first = last + 1 - n;
        std::vector<std::size_t> columns;
        for (std::size_t j = 0; j < panel.cols(); ++j) {
            if (panel.availability(j).covers(first, last)) {
                columns.push_back(j);
            }
        }
        windows.emplace_back(panel, first, last, std::move(columns));
    }
    return windows;
}

double interpolated_quantile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) {
        throw DomainError("quantile of an empty sample");
    }
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

InstitutionStats series_stats(std::string name, std::vector<double> values) {
    const std::size_t n = values.size();
    if (n < 4) {
        throw DataError("summary statistics for '" + name + "' need at least 4 observations");
    }
    InstitutionStats s;
    s.name = std::move(name);
    s.observations = n;
    std::sort(values.begin(), values.end());
    s.min = values.front();
    s.max = values.back();
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    s.mean = sum / static_cast<double>(n);
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
    for (double v : values) {
        const double d = v - s.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    const double dn = static_cast<double>(n);
    s.std_dev = std::sqrt(m2 / (dn - 1.0));
    m2 /= dn;
    m3 /= dn;
    m4 /= dn;
    s.q01 = interpolated_quantile(values, 0.01);

    const double scale = std::max(std::fabs(s.min), std::fabs(s.max));
    if (m2 <= 1e-24 * scale * scale || m2 == 0.0) {
        s.std_dev = 0.0;
        return s;
    }
    const double skew = m3 / std::pow(m2, 1.5);
    const double kurt = m4 / (m2 * m2);
    s.skewness = skew;
    s.kurtosis = kurt;
    s.jarque_bera = dn / 6.0 * (skew * skew + 0.25 * (kurt - 3.0) * (kurt - 3.0));
    return s;
}

SummaryStats summary_stats(const ReturnPanel& returns) {
    SummaryStats out;
    out.frequency = returns.frequency();
    for (std::size_t j = 0; j < returns.cols(); ++j) {
        const Availability& a = returns.availability(j);
        std::vector<double> v;
        v.reserve(a.last - a.first + 1);
        for (std::size_t t = a.first; t <= a.last; ++t) {
            v.push_back(returns.value(t, j));
        }
        out.institutions.push_back(series_stats(returns.institutions()[j], std::move(v)));
    }
    return out;
}

}  // namespace sysrisk
