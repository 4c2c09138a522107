#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "sysrisk/pipeline.hpp"

namespace sysrisk {

/// Event marker drawn on the charts.
struct Annotation {
    Date date{};
    std::string label;
};

/// `date,label` lines; an optional `date,label` header; blank lines skipped.
std::vector<Annotation> load_annotations(std::istream& in);
std::vector<Annotation> load_annotations_file(const std::string& path);

/// %.17g, so a double survives the round trip exactly.
std::string format_number(double x);

/// Header `date,total,shapley_<name>...,banzhaf_<name>...` over the full D.
/// Cells of institutions outside a window's roster are empty. Failed windows
/// are `#<date>,FAILED,<reason>` lines. With normalize, Shapley and Banzhaf
/// values are divided by the window total (total itself is kept).
void write_csv(const AttributionSeries& series, std::ostream& out, bool normalize = false);

/// Inverse of write_csv. Throws ParseError.
AttributionSeries read_csv(std::istream& in);

void write_json(const AttributionSeries& series, std::ostream& out, bool normalize = false);

std::string shapley_chart_svg(const AttributionSeries& series,
                              const std::vector<Annotation>& annotations, bool normalized = false);
std::string total_chart_svg(const AttributionSeries& series,
                            const std::vector<Annotation>& annotations);

struct OutputFiles {
    std::string csv;
    std::string json;
    std::string shapley_svg;
    std::string total_svg;
};

/// Writes attribution.csv, attribution.json, shapley.svg and total.svg into
/// cfg.out_dir (created if needed). Throws IoError.
OutputFiles emit_outputs(const AttributionSeries& series, const RunConfig& cfg);

/// The two charts only, e.g. re-rendered from a results CSV.
OutputFiles render_charts(const AttributionSeries& series,
                          const std::vector<Annotation>& annotations, const std::string& out_dir,
                          bool normalized = false);

}  // namespace sysrisk
