#include <doctest.h>

#include <cmath>
#include <string>

#include "chaoslab/csv.hpp"
#include "chaoslab/plot.hpp"
#include "support.hpp"

using namespace chaoslab;

namespace {

std::size_t occurrences(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

CsvTable rate_table(std::vector<double> n, std::vector<double> gap) {
    CsvTable t;
    t.header = {"n", "mean_sq_gap", "std_error"};
    for (std::size_t i = 0; i < n.size(); ++i)
        t.add_row({format_real(n[i]), format_real(gap[i]), format_real(0.05 * gap[i])});
    return t;
}

} // namespace

TEST_SUITE("plot") {

TEST_CASE("log-log fit annotates the slope") {
    std::vector<double> n{16, 32, 64, 128}, gap;
    for (double x : n) gap.push_back(3.0 * std::pow(x, -1.02));
    const auto table = plot_from_table(rate_table(n, gap), PlotKind::loglog, "gap");
    REQUIRE(table.fit.has_value());
    CHECK(table.fit->slope == doctest::Approx(-1.02).epsilon(1e-9));
    const auto svg = emit_plot(table, PlotKind::loglog);
    CHECK(svg.find("slope=-1.02") != std::string::npos);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(occurrences(svg, "<circle") == 4);
}

TEST_CASE("a single point has no fit line") {
    const auto table = plot_from_table(rate_table({16}, {0.1}), PlotKind::loglog, "gap");
    const auto svg = emit_plot(table, PlotKind::loglog);
    CHECK(svg.find("slope=") == std::string::npos);
    CHECK(occurrences(svg, "<circle") == 1);
}

TEST_CASE("log axes skip points they cannot show") {
    const auto table = plot_from_table(rate_table({16, 32, 64}, {0.1, 0.0, 0.02}), PlotKind::loglog, "gap");
    CHECK(occurrences(emit_plot(table, PlotKind::loglog), "<circle") == 2);
}

TEST_CASE("output is a function of the input") {
    std::vector<double> n{16, 32, 64}, gap{0.3, 0.16, 0.07};
    const auto a = emit_plot(plot_from_table(rate_table(n, gap), PlotKind::loglog, "gap"), PlotKind::loglog);
    const auto b = emit_plot(plot_from_table(rate_table(n, gap), PlotKind::loglog, "gap"), PlotKind::loglog);
    CHECK(a == b);
    gap[1] = 0.15;
    CHECK(a != emit_plot(plot_from_table(rate_table(n, gap), PlotKind::loglog, "gap"), PlotKind::loglog));
}

TEST_CASE("deviation layout fits over the flagged window") {
    CsvTable t;
    t.header = {"r", "threshold", "n_r2", "exceedances", "prob", "wilson_lo", "wilson_hi", "in_fit_window", "monotone_flag"};
    const double c = 2.0;
    for (int k = 0; k < 5; ++k) {
        const double x = 0.5 * k;
        const double p = k == 4 ? 0.5 : std::exp(-c * x); // last row outside the window
        t.add_row({format_real(0.1 * k), format_real(0.1 * k), format_real(x), "0", format_real(p), format_real(p / 2),
                   format_real(std::min(1.0, 2 * p)), k >= 1 && k <= 3 ? "1" : "0", "0"});
    }
    const auto table = plot_from_table(t, PlotKind::loglinear, "tail");
    REQUIRE(table.fit.has_value());
    CHECK(table.fit->slope == doctest::Approx(-c).epsilon(1e-9));
    CHECK(table.y_lo.size() == 5);
    CHECK(emit_plot(table, PlotKind::loglinear).find("slope=-2.00") != std::string::npos);
}

TEST_CASE("plot kinds by name") {
    for (auto k : {PlotKind::loglog, PlotKind::loglinear, PlotKind::timeseries})
        CHECK(plot_kind_from_name(plot_kind_name(k)) == k);
    CHECK_FALSE(plot_kind_from_name("pie").has_value());
}

TEST_CASE("csv round trips reals and measures") {
    testing::Gen gen(5);
    for (int i = 0; i < 200; ++i) {
        const double v = gen.normal() * std::pow(10.0, gen.uniform(-30, 30));
        CHECK(parse_real(format_real(v)) == v);
    }
    CHECK(std::isnan(parse_real(format_real(std::nan("")))));
    CHECK(parse_real(format_real(-INFINITY)) == -INFINITY);
    const auto m = gen.weighted_measure(7, 3);
    const auto text = measure_table(m).to_string();
    const auto back = measure_from_table(parse_csv(text));
    REQUIRE(back.size() == m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        CHECK(back.weight(i) == m.weight(i));
        for (std::size_t d = 0; d < 3; ++d) CHECK(back.point(i)[d] == m.point(i)[d]);
    }
    CHECK(parse_csv(text).to_string() == text);
}

}
