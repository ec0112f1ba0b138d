#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chaoslab/csv.hpp"

namespace chaoslab {

enum class PlotKind { loglog, loglinear, timeseries };

std::optional<PlotKind> plot_kind_from_name(std::string_view name);
std::string_view plot_kind_name(PlotKind kind);

/// Straight line in the plot's own coordinates: ln y = intercept + slope ln x
/// (loglog), ln y = intercept + slope x (loglinear), y = intercept + slope x
/// (timeseries).
struct PlotFit {
    double slope = 0.0;
    double intercept = 0.0;
};

struct PlotTable {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> y_lo; // error bar ends; empty for none
    std::vector<double> y_hi;
    std::optional<PlotFit> fit;
};

/// Standalone SVG with axes, points, error bars and, when the fit is present
/// and at least two points are drawable, the fit line with a slope annotation.
/// Points a log axis cannot show are skipped. Output depends only on the input.
std::string emit_plot(const PlotTable& table, PlotKind kind);

/// Reads the plotted columns of a result table and fits a line over its fit
/// window: rows flagged in_fit_window / in_fit when such a column exists,
/// otherwise every drawable row. Unknown layouts plot column 1 against column 0.
PlotTable plot_from_table(const CsvTable& table, PlotKind kind, std::string title);

} // namespace chaoslab
