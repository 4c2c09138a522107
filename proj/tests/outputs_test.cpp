#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "synthetic.hpp"
#include "sysrisk/errors.hpp"
#include "sysrisk/outputs.hpp"

using namespace sysrisk;

namespace {

AttributionSeries five_rows() {
    Eigen::MatrixXd c = synth::equicorrelated(3, 2.0, 0.5);
    const auto panel = synth::weekly_returns(21, Eigen::VectorXd::Zero(3), {{30, c}}, {"DE", "GR", "IT"});
    RunConfig cfg;
    cfg.safe = {"DE"};
    cfg.distressed = {"GR", "IT"};
    cfg.threads = 1;
    return run_rolling_attribution(panel, cfg);
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        out.push_back(line);
    }
    return out;
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "sysrisk_outputs_test" / name;
    std::filesystem::remove_all(dir);
    return dir;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(Csv, SchemaForFiveRowsAndTwoInstitutions) {
    const auto series = five_rows();
    std::ostringstream out;
    write_csv(series, out);
    const auto lines = lines_of(out.str());
    ASSERT_EQ(lines.size(), 6u);
    EXPECT_EQ(lines[0], "date,total,shapley_GR,shapley_IT,banzhaf_GR,banzhaf_IT");
    for (std::size_t k = 1; k < lines.size(); ++k) {
        EXPECT_EQ(std::count(lines[k].begin(), lines[k].end(), ','), 5) << lines[k];
    }
    EXPECT_EQ(lines[1].substr(0, 10), format_date(series.rows[0].date));
}

TEST(Csv, SeventeenSignificantDigits) {
    EXPECT_EQ(format_number(0.1), "0.10000000000000001");
    EXPECT_EQ(format_number(-2.5), "-2.5");
    EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Csv, RoundTripReproducesValues) {
    auto series = five_rows();
    series.rows[2].ok = false;
    series.rows[2].failure = "solver did not converge, last change 1e-3\nsecond line";
    // A window where IT dropped out.
    series.rows[3].result.roster = {"GR"};
    series.rows[3].result.shapley.resize(1);
    series.rows[3].result.banzhaf.resize(1);
    std::ostringstream out;
    write_csv(series, out);
    std::istringstream in(out.str());
    const auto back = read_csv(in);
    EXPECT_EQ(back.distressed, series.distressed);
    ASSERT_EQ(back.rows.size(), series.rows.size());
    for (std::size_t k = 0; k < back.rows.size(); ++k) {
        const auto& a = back.rows[k];
        const auto& b = series.rows[k];
        EXPECT_EQ(a.date, b.date);
        EXPECT_EQ(a.ok, b.ok);
        if (!b.ok) {
            EXPECT_EQ(a.failure, "solver did not converge, last change 1e-3 second line");
            continue;
        }
        EXPECT_EQ(a.result.roster, b.result.roster);
        EXPECT_NEAR(a.result.total, b.result.total, 1e-12);
        for (std::size_t j = 0; j < b.result.roster.size(); ++j) {
            EXPECT_NEAR(a.result.shapley[j], b.result.shapley[j], 1e-12);
            EXPECT_NEAR(a.result.banzhaf[j], b.result.banzhaf[j], 1e-12);
        }
    }
    std::ostringstream again;
    write_csv(back, again);
    EXPECT_EQ(again.str(), out.str());
}

TEST(Csv, NormalizedValuesAreSharesOfTheTotal) {
    const auto series = five_rows();
    std::ostringstream out;
    write_csv(series, out, true);
    std::istringstream in(out.str());
    const auto back = read_csv(in);
    for (std::size_t k = 0; k < back.rows.size(); ++k) {
        const auto& r = series.rows[k].result;
        EXPECT_DOUBLE_EQ(back.rows[k].result.total, r.total);
        EXPECT_NEAR(back.rows[k].result.shapley[0] + back.rows[k].result.shapley[1], 1.0, 1e-12);
        EXPECT_DOUBLE_EQ(back.rows[k].result.banzhaf[1], r.banzhaf[1] / r.total);
    }
}

TEST(Csv, MalformedInput) {
    std::istringstream bad_header("date,total,shapley_A\n");
    EXPECT_THROW(read_csv(bad_header), ParseError);
    std::istringstream bad_cell("date,total,shapley_A,banzhaf_A\n2010-01-01,x,1,1\n");
    EXPECT_THROW(read_csv(bad_cell), ParseError);
    std::istringstream unsorted("date,total,shapley_A,banzhaf_A\n2010-01-08,1,1,1\n2010-01-01,1,1,1\n");
    EXPECT_THROW(read_csv(unsorted), ParseError);
}

TEST(Json, MirrorsTheSeries) {
    const auto series = five_rows();
    std::ostringstream out;
    write_json(series, out);
    const auto doc = nlohmann::json::parse(out.str());
    EXPECT_EQ(doc["distressed"], nlohmann::json({"GR", "IT"}));
    EXPECT_EQ(doc["normalized"], false);
    ASSERT_EQ(doc["windows"].size(), 5u);
    const auto& w = doc["windows"][0];
    EXPECT_EQ(w["date"], format_date(series.rows[0].date));
    EXPECT_EQ(w["total"].get<double>(), series.rows[0].result.total);
    EXPECT_EQ(w["shapley"]["IT"].get<double>(), series.rows[0].result.shapley[1]);
    EXPECT_EQ(w["banzhaf"]["GR"].get<double>(), series.rows[0].result.banzhaf[0]);
}

TEST(Annotations, ParseAndMarkers) {
    std::istringstream empty("");
    const auto none = load_annotations(empty);
    EXPECT_TRUE(none.empty());
    const auto series = five_rows();
    EXPECT_EQ(shapley_chart_svg(series, none).find("stroke-dasharray"), std::string::npos);

    std::istringstream notes("date,label\n" + format_date(series.rows[2].date) + ",rating cut\n\n1990-01-01,outside\n");
    const auto marks = load_annotations(notes);
    ASSERT_EQ(marks.size(), 2u);
    EXPECT_EQ(marks[0].label, "rating cut");
    const auto svg = total_chart_svg(series, marks);
    EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
    EXPECT_NE(svg.find("rating cut"), std::string::npos);
    EXPECT_EQ(svg.find("outside"), std::string::npos);

    std::istringstream bad("2010-13-01,x\n");
    EXPECT_THROW(load_annotations(bad), ParseError);
}

TEST(Charts, OneLinePerInstitutionAndWellFormed) {
    const auto series = five_rows();
    const auto svg = shapley_chart_svg(series, {});
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    std::size_t polylines = 0;
    for (auto at = svg.find("<polyline"); at != std::string::npos; at = svg.find("<polyline", at + 1)) {
        ++polylines;
    }
    EXPECT_EQ(polylines, 2u);
    EXPECT_NE(svg.find(">GR<"), std::string::npos);
}

TEST(Emit, WritesAllFilesDeterministically) {
    const auto series = five_rows();
    RunConfig cfg;
    cfg.out_dir = scratch("emit").string();
    const auto files = emit_outputs(series, cfg);
    for (const auto& p : {files.csv, files.json, files.shapley_svg, files.total_svg}) {
        EXPECT_TRUE(std::filesystem::exists(p)) << p;
    }
    const std::string csv = slurp(files.csv);
    const std::string json = slurp(files.json);
    emit_outputs(series, cfg);
    EXPECT_EQ(slurp(files.csv), csv);
    EXPECT_EQ(slurp(files.json), json);
    std::istringstream in(csv);
    EXPECT_EQ(read_csv(in).rows.size(), 5u);
}

TEST(Emit, UnwritableDirectoryIsAnIoError) {
    const auto dir = scratch("blocked");
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "file") << "x";
    RunConfig cfg;
    cfg.out_dir = (dir / "file" / "sub").string();
    EXPECT_THROW(emit_outputs(five_rows(), cfg), IoError);
    cfg.out_dir = dir.string();
    cfg.annotations = (dir / "missing.csv").string();
    EXPECT_THROW(emit_outputs(five_rows(), cfg), IoError);
    EXPECT_THROW(emit_outputs(AttributionSeries{}, cfg), DataError);
}
