#include "sysrisk/outputs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <json.hpp>
#include <sstream>

#include "sysrisk/errors.hpp"

namespace sysrisk {
namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string::npos ? comma : comma - start));
        if (comma == std::string::npos) {
            return out;
        }
        start = comma + 1;
    }
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
}

// Reasons go on one CSV line.
std::string one_line(std::string text) {
    std::replace(text.begin(), text.end(), '\n', ' ');
    std::replace(text.begin(), text.end(), '\r', ' ');
    return text;
}

double scaled(double value, double total, bool normalize) {
    return normalize ? value / total : value;
}

std::string cell(double v) { return std::isnan(v) ? std::string{} : format_number(v); }

std::string fixed(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string escape_xml(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Line {
    std::string name;
    std::vector<double> y;  // NaN breaks the polyline
};

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string line_chart(const std::string& title, const std::string& y_label,
                       const std::vector<Date>& dates, const std::vector<Line>& lines,
                       const std::vector<Annotation>& annotations) {
    const double width = 900, height = 420;
    const double left = 70, right = 170, top = 40, bottom = 60;
    const double plot_w = width - left - right, plot_h = height - top - bottom;

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& line : lines) {
        for (double v : line.y) {
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    if (!std::isfinite(lo)) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    const double d0 = dates.empty() ? 0.0 : double(dates.front().time_since_epoch().count());
    const double d1 = dates.empty() ? 1.0 : double(dates.back().time_since_epoch().count());
    const double span = d1 > d0 ? d1 - d0 : 1.0;
    auto px = [&](Date d) { return left + plot_w * (double(d.time_since_epoch().count()) - d0) / span; };
    auto py = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << fixed(left) << "\" y=\"24\" font-size=\"14\">" << escape_xml(title) << "</text>\n";
    svg << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(top) << "\" width=\"" << fixed(plot_w)
        << "\" height=\"" << fixed(plot_h) << "\" fill=\"none\" stroke=\"#333\"/>\n";

    for (int k = 0; k <= 4; ++k) {
        const double v = lo + (hi - lo) * k / 4.0;
        svg << "<line x1=\"" << fixed(left - 4) << "\" x2=\"" << fixed(left) << "\" y1=\"" << fixed(py(v))
            << "\" y2=\"" << fixed(py(v)) << "\" stroke=\"#333\"/>";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4g", v);
        svg << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(py(v) + 4)
            << "\" text-anchor=\"end\">" << buf << "</text>\n";
    }
    if (lo < 0.0 && hi > 0.0) {
        svg << "<line x1=\"" << fixed(left) << "\" x2=\"" << fixed(left + plot_w) << "\" y1=\"" << fixed(py(0))
            << "\" y2=\"" << fixed(py(0)) << "\" stroke=\"#bbb\"/>\n";
    }
    if (!dates.empty()) {
        const std::size_t ticks = std::min<std::size_t>(5, dates.size());
        for (std::size_t k = 0; k < ticks; ++k) {
            const std::size_t idx = ticks == 1 ? 0 : k * (dates.size() - 1) / (ticks - 1);
            const double x = px(dates[idx]);
            svg << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(top + plot_h + 16)
                << "\" text-anchor=\"middle\">" << format_date(dates[idx]) << "</text>\n";
        }
    }
    svg << "<text transform=\"translate(16," << fixed(top + plot_h / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
        << escape_xml(y_label) << "</text>\n";

    for (const auto& a : annotations) {
        if (dates.empty() || a.date < dates.front() || a.date > dates.back()) {
            continue;
        }
        const double x = px(a.date);
        svg << "<line x1=\"" << fixed(x) << "\" x2=\"" << fixed(x) << "\" y1=\"" << fixed(top) << "\" y2=\""
            << fixed(top + plot_h) << "\" stroke=\"#888\" stroke-dasharray=\"4,3\"/>";
        svg << "<text transform=\"translate(" << fixed(x + 3) << ',' << fixed(top + 10)
            << ") rotate(90)\" fill=\"#555\">" << escape_xml(a.label) << "</text>\n";
    }

    for (std::size_t l = 0; l < lines.size(); ++l) {
        const char* color = kPalette[l % std::size(kPalette)];
        std::string points;
        auto flush = [&] {
            if (!points.empty()) {
                svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
                    << points << "\"/>\n";
                points.clear();
            }
        };
        for (std::size_t t = 0; t < dates.size(); ++t) {
            const double v = lines[l].y[t];
            if (!std::isfinite(v)) {
                flush();
                continue;
            }
            if (!points.empty()) {
                points += ' ';
            }
            points += fixed(px(dates[t])) + ',' + fixed(py(v));
        }
        flush();
        const double ly = top + 14.0 * double(l) + 8;
        svg << "<line x1=\"" << fixed(width - right + 12) << "\" x2=\"" << fixed(width - right + 32)
            << "\" y1=\"" << fixed(ly) << "\" y2=\"" << fixed(ly) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/><text x=\"" << fixed(width - right + 36) << "\" y=\"" << fixed(ly + 4)
            << "\">" << escape_xml(lines[l].name) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::vector<Date> all_dates(const AttributionSeries& series) {
    std::vector<Date> dates;
    for (const auto& row : series.rows) {
        dates.push_back(row.date);
    }
    return dates;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    out.flush();
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
}

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create output directory '" + dir + "'" +
                      (ec ? ": " + ec.message() : std::string{}));
    }
}

}  // namespace

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<Annotation> load_annotations(std::istream& in) {
    std::vector<Annotation> out;
    std::string line;
    for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
        strip_cr(line);
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        const auto comma = line.find(',');
        const std::string first = line.substr(0, comma);
        if (line_no == 1 && first == "date") {
            continue;
        }
        const auto date = parse_date(first);
        if (!date) {
            throw ParseError("malformed annotation date '" + first + "'", line_no, 1);
        }
        out.push_back({*date, comma == std::string::npos ? std::string{} : line.substr(comma + 1)});
    }
    return out;
}

std::vector<Annotation> load_annotations_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open annotations file '" + path + "'");
    }
    return load_annotations(in);
}

void write_csv(const AttributionSeries& series, std::ostream& out, bool normalize) {
    out << "date,total";
    for (const auto& name : series.distressed) {
        out << ",shapley_" << name;
    }
    for (const auto& name : series.distressed) {
        out << ",banzhaf_" << name;
    }
    out << '\n';
    for (const auto& row : series.rows) {
        if (!row.ok) {
            out << '#' << format_date(row.date) << ",FAILED," << one_line(row.failure) << '\n';
            continue;
        }
        const double total = row.result.total;
        out << format_date(row.date) << ',' << format_number(total);
        for (const auto& name : series.distressed) {
            out << ',' << cell(scaled(AttributionSeries::lookup(row, row.result.shapley, name), total, normalize));
        }
        for (const auto& name : series.distressed) {
            out << ',' << cell(scaled(AttributionSeries::lookup(row, row.result.banzhaf, name), total, normalize));
        }
        out << '\n';
    }
}

AttributionSeries read_csv(std::istream& in) {
    AttributionSeries series;
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) {
        throw ParseError("empty results file", 1, 0);
    }
    strip_cr(line);
    const auto header = split_fields(line);
    if (header.size() < 4 || header[0] != "date" || header[1] != "total" || (header.size() - 2) % 2 != 0) {
        throw ParseError("expected header date,total,shapley_<name>...,banzhaf_<name>...", 1, 0);
    }
    const std::size_t d = (header.size() - 2) / 2;
    for (std::size_t k = 0; k < d; ++k) {
        const std::string& s = header[2 + k];
        const std::string& b = header[2 + d + k];
        if (s.rfind("shapley_", 0) != 0 || b != "banzhaf_" + s.substr(8)) {
            throw ParseError("mismatched shapley/banzhaf columns", 1, 3 + k);
        }
        series.distressed.push_back(s.substr(8));
    }
    auto number = [&](const std::string& text, std::size_t col) {
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (text.empty() || end != text.c_str() + text.size()) {
            throw ParseError("non-numeric cell '" + text + "'", line_no, col);
        }
        return v;
    };
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) {
            continue;
        }
        WindowRow row;
        if (line[0] == '#') {
            const auto fields = split_fields(line.substr(1));
            const auto date = parse_date(fields[0]);
            if (!date || fields.size() < 2 || fields[1] != "FAILED") {
                throw ParseError("malformed failed-window line", line_no, 0);
            }
            row.date = *date;
            const auto second = line.find(',', line.find(',') + 1);
            row.failure = second == std::string::npos ? std::string{} : line.substr(second + 1);
        } else {
            const auto fields = split_fields(line);
            if (fields.size() != header.size()) {
                throw ParseError("expected " + std::to_string(header.size()) + " fields", line_no, 0);
            }
            const auto date = parse_date(fields[0]);
            if (!date) {
                throw ParseError("malformed date '" + fields[0] + "'", line_no, 1);
            }
            row.date = *date;
            row.ok = true;
            row.result.window_date = *date;
            row.result.total = number(fields[1], 2);
            for (std::size_t k = 0; k < d; ++k) {
                const bool has_s = !fields[2 + k].empty();
                const bool has_b = !fields[2 + d + k].empty();
                if (has_s != has_b) {
                    throw ParseError("shapley and banzhaf cells disagree on the roster", line_no, 3 + k);
                }
                if (has_s) {
                    row.result.roster.push_back(series.distressed[k]);
                    row.result.shapley.push_back(number(fields[2 + k], 3 + k));
                    row.result.banzhaf.push_back(number(fields[2 + d + k], 3 + d + k));
                }
            }
        }
        if (!series.rows.empty() && row.date <= series.rows.back().date) {
            throw ParseError("dates must be strictly increasing", line_no, 1);
        }
        series.rows.push_back(std::move(row));
    }
    return series;
}

void write_json(const AttributionSeries& series, std::ostream& out, bool normalize) {
    using json = nlohmann::ordered_json;
    json doc;
    doc["distressed"] = series.distressed;
    doc["normalized"] = normalize;
    json windows = json::array();
    for (const auto& row : series.rows) {
        json w;
        w["date"] = format_date(row.date);
        if (!row.ok) {
            w["failed"] = row.failure;
            windows.push_back(std::move(w));
            continue;
        }
        const double total = row.result.total;
        w["roster"] = row.result.roster;
        w["total"] = total;
        json s = json::object();
        json b = json::object();
        for (std::size_t k = 0; k < row.result.roster.size(); ++k) {
            s[row.result.roster[k]] = scaled(row.result.shapley[k], total, normalize);
            b[row.result.roster[k]] = scaled(row.result.banzhaf[k], total, normalize);
        }
        w["shapley"] = std::move(s);
        w["banzhaf"] = std::move(b);
        windows.push_back(std::move(w));
    }
    doc["windows"] = std::move(windows);
    out << doc.dump(2) << '\n';
}

std::string shapley_chart_svg(const AttributionSeries& series,
                              const std::vector<Annotation>& annotations, bool normalized) {
    std::vector<Line> lines;
    for (const auto& name : series.distressed) {
        Line line{name, {}};
        for (const auto& row : series.rows) {
            line.y.push_back(row.ok ? scaled(AttributionSeries::lookup(row, row.result.shapley, name),
                                             row.result.total, normalized)
                                    : kNaN);
        }
        lines.push_back(std::move(line));
    }
    return line_chart(normalized ? "Shapley value / total cost" : "Shapley value",
                      normalized ? "share of total" : "Shapley value", all_dates(series), lines,
                      annotations);
}

std::string total_chart_svg(const AttributionSeries& series,
                            const std::vector<Annotation>& annotations) {
    Line line{"total", {}};
    for (const auto& row : series.rows) {
        line.y.push_back(row.ok ? row.result.total : kNaN);
    }
    return line_chart("Total cost c(D)", "c(D)", all_dates(series), {line}, annotations);
}

OutputFiles render_charts(const AttributionSeries& series,
                          const std::vector<Annotation>& annotations, const std::string& out_dir,
                          bool normalized) {
    ensure_directory(out_dir);
    const std::filesystem::path dir(out_dir);
    OutputFiles files;
    files.shapley_svg = (dir / "shapley.svg").string();
    files.total_svg = (dir / "total.svg").string();
    write_file(files.shapley_svg, shapley_chart_svg(series, annotations, normalized));
    write_file(files.total_svg, total_chart_svg(series, annotations));
    return files;
}

OutputFiles emit_outputs(const AttributionSeries& series, const RunConfig& cfg) {
    if (series.rows.empty()) {
        throw DataError("no windows to write");
    }
    const std::vector<Annotation> annotations =
        cfg.annotations.empty() ? std::vector<Annotation>{} : load_annotations_file(cfg.annotations);
    OutputFiles files = render_charts(series, annotations, cfg.out_dir, cfg.normalize);
    const std::filesystem::path dir(cfg.out_dir);
    files.csv = (dir / "attribution.csv").string();
    files.json = (dir / "attribution.json").string();
    std::ostringstream csv;
    write_csv(series, csv, cfg.normalize);
    write_file(files.csv, csv.str());
    std::ostringstream json;
    write_json(series, json, cfg.normalize);
    write_file(files.json, json.str());
    return files;
}

}  // namespace sysrisk
