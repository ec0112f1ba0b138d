#include "chaoslab/plot.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "chaoslab/errors.hpp"
#include "chaoslab/stats.hpp"

namespace chaoslab {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 24.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 56.0;

bool log_x(PlotKind k) { return k == PlotKind::loglog; }
bool log_y(PlotKind k) { return k != PlotKind::timeseries; }

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

struct Axis {
    bool log = false;
    double lo = 0.0; // in axis units: log10 of the value on log axes
    double hi = 1.0;
    double pixel_lo = 0.0;
    double pixel_hi = 1.0;

    static double to_units(bool log, double v) { return log ? std::log10(v) : v; }
    double pixel(double value) const {
        const double u = to_units(log, value);
        return pixel_lo + (u - lo) / (hi - lo) * (pixel_hi - pixel_lo);
    }
};

void fit_range(Axis& axis, double lo, double hi) {
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    axis.lo = lo - pad;
    axis.hi = hi + pad;
}

std::vector<double> nice_ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) break;
    }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step)
        ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    return ticks;
}

// Tick values (in data units) for an axis.
std::vector<double> tick_values(const Axis& a) {
    if (!a.log) return nice_ticks(a.lo, a.hi);
    std::vector<double> out;
    if (a.hi - a.lo >= 1.0) {
        const double first = std::ceil(a.lo);
        const double last = std::floor(a.hi);
        const double stride = std::max(1.0, std::ceil((last - first + 1.0) / 8.0));
        for (double k = first; k <= last; k += stride) out.push_back(std::pow(10.0, k));
    } else {
        for (double v : nice_ticks(std::pow(10.0, a.lo), std::pow(10.0, a.hi)))
            if (v > 0.0) out.push_back(v);
    }
    return out;
}

std::string tick_label(double v) { return fmt::format("{:.3g}", v); }

bool drawable(PlotKind kind, double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return false;
    if (log_x(kind) && !(x > 0.0)) return false;
    if (log_y(kind) && !(y > 0.0)) return false;
    return true;
}

double fit_value(PlotKind kind, const PlotFit& fit, double x) {
    switch (kind) {
    case PlotKind::loglog: return std::exp(fit.intercept + fit.slope * std::log(x));
    case PlotKind::loglinear: return std::exp(fit.intercept + fit.slope * x);
    case PlotKind::timeseries: return fit.intercept + fit.slope * x;
    }
    return 0.0;
}

} // namespace

std::optional<PlotKind> plot_kind_from_name(std::string_view name) {
    if (name == "loglog") return PlotKind::loglog;
    if (name == "loglinear") return PlotKind::loglinear;
    if (name == "timeseries") return PlotKind::timeseries;
    return std::nullopt;
}

std::string_view plot_kind_name(PlotKind kind) {
    switch (kind) {
    case PlotKind::loglog: return "loglog";
    case PlotKind::loglinear: return "loglinear";
    case PlotKind::timeseries: return "timeseries";
    }
    return "";
}

std::string emit_plot(const PlotTable& t, PlotKind kind) {
    if (t.x.size() != t.y.size()) throw SpecificationError("emit_plot: x and y differ in length");
    const bool bars = !t.y_lo.empty();
    if (bars && (t.y_lo.size() != t.y.size() || t.y_hi.size() != t.y.size()))
        throw SpecificationError("emit_plot: error bars differ in length");

    std::vector<std::size_t> shown;
    for (std::size_t i = 0; i < t.x.size(); ++i)
        if (drawable(kind, t.x[i], t.y[i])) shown.push_back(i);

    Axis ax{log_x(kind), 0.0, 1.0, kLeft, kWidth - kRight};
    Axis ay{log_y(kind), 0.0, 1.0, kHeight - kBottom, kTop};
    if (!shown.empty()) {
        double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
        for (std::size_t i : shown) {
            const double xu = Axis::to_units(ax.log, t.x[i]);
            xlo = std::min(xlo, xu);
            xhi = std::max(xhi, xu);
            for (double v : {t.y[i], bars ? t.y_lo[i] : t.y[i], bars ? t.y_hi[i] : t.y[i]}) {
                if (!std::isfinite(v) || (ay.log && !(v > 0.0))) continue;
                const double yu = Axis::to_units(ay.log, v);
                ylo = std::min(ylo, yu);
                yhi = std::max(yhi, yu);
            }
        }
        fit_range(ax, xlo, xhi);
        fit_range(ay, ylo, yhi);
    }

    std::string s;
    s += fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
                     "viewBox=\"0 0 {:.0f} {:.0f}\" font-family=\"sans-serif\" font-size=\"12\">\n",
                     kWidth, kHeight, kWidth, kHeight);
    s += fmt::format("<rect x=\"0\" y=\"0\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"white\"/>\n", kWidth, kHeight);
    s += fmt::format("<defs><clipPath id=\"plot-area\"><rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" "
                     "height=\"{:.2f}\"/></clipPath></defs>\n",
                     kLeft, kTop, kWidth - kLeft - kRight, kHeight - kTop - kBottom);
    s += fmt::format("<text x=\"{:.2f}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                     kWidth / 2.0, escape(t.title));

    // Axes, ticks and grid.
    s += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
                     "stroke=\"black\"/>\n",
                     kLeft, kTop, kWidth - kLeft - kRight, kHeight - kTop - kBottom);
    if (!shown.empty()) {
        for (double v : tick_values(ax)) {
            const double px = ax.pixel(v);
            s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#dddddd\"/>\n",
                             px, kTop, kHeight - kBottom);
            s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", px,
                             kHeight - kBottom + 16.0, tick_label(v));
        }
        for (double v : tick_values(ay)) {
            const double py = ay.pixel(v);
            s += fmt::format("<line x1=\"{1:.2f}\" y1=\"{0:.2f}\" x2=\"{2:.2f}\" y2=\"{0:.2f}\" stroke=\"#dddddd\"/>\n",
                             py, kLeft, kWidth - kRight);
            s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", kLeft - 6.0,
                             py + 4.0, tick_label(v));
        }
    }
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", (kLeft + kWidth - kRight) / 2.0,
                     kHeight - 14.0, escape(t.x_label));
    s += fmt::format("<text x=\"16\" y=\"{0:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0:.2f})\">{1}</text>\n",
                     (kTop + kHeight - kBottom) / 2.0, escape(t.y_label));

    s += "<g clip-path=\"url(#plot-area)\">\n";
    if (bars) {
        for (std::size_t i : shown) {
            const double px = ax.pixel(t.x[i]);
            // A lower end a log axis cannot show runs to the bottom edge.
            const double lo = t.y_lo[i];
            const double hi = t.y_hi[i];
            const double lo_px = !std::isfinite(lo) ? ay.pixel(t.y[i]) : (ay.log && !(lo > 0.0)) ? kHeight - kBottom : ay.pixel(lo);
            const double hi_px = std::isfinite(hi) && (!ay.log || hi > 0.0) ? ay.pixel(hi) : ay.pixel(t.y[i]);
            s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#4a6fa5\"/>\n",
                             px, lo_px, hi_px);
        }
    }
    if (t.fit && shown.size() >= 2) {
        const double x0 = ax.log ? std::pow(10.0, ax.lo) : ax.lo;
        const double x1 = ax.log ? std::pow(10.0, ax.hi) : ax.hi;
        const double y0 = fit_value(kind, *t.fit, x0);
        const double y1 = fit_value(kind, *t.fit, x1);
        if (std::isfinite(y0) && std::isfinite(y1) && (!ay.log || (y0 > 0.0 && y1 > 0.0)))
            s += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#c0392b\" "
                             "stroke-dasharray=\"6 4\"/>\n",
                             ax.pixel(x0), ay.pixel(y0), ax.pixel(x1), ay.pixel(y1));
    }
    for (std::size_t i : shown)
        s += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"#1f3b73\"/>\n", ax.pixel(t.x[i]),
                         ay.pixel(t.y[i]));
    s += "</g>\n";
    if (t.fit && shown.size() >= 2)
        s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\" fill=\"#c0392b\">slope={:.2f}</text>\n",
                         kWidth - kRight - 8.0, kTop + 18.0, t.fit->slope);
    if (shown.empty())
        s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">no drawable points</text>\n",
                         kWidth / 2.0, kHeight / 2.0);
    s += "</svg>\n";
    return s;
}

PlotTable plot_from_table(const CsvTable& table, PlotKind kind, std::string title) {
    if (table.rows.empty()) throw ValidationError("plot: table has no rows");
    if (table.header.size() < 2) throw ValidationError("plot: table needs at least two columns");
    PlotTable p;
    p.title = std::move(title);

    std::string xs = table.header[0];
    std::string ys = table.header[1];
    std::string err;
    std::string lo;
    std::string hi;
    std::string window;
    if (table.has_column("mean_sq_gap")) {
        xs = "n";
        ys = "mean_sq_gap";
        err = "std_error";
    } else if (table.has_column("prob") && table.has_column("n_r2")) {
        xs = "n_r2";
        ys = "prob";
        lo = "wilson_lo";
        hi = "wilson_hi";
        window = "in_fit_window";
    } else if (table.has_column("w2")) {
        xs = "t";
        ys = "w2";
        err = "std_error";
        window = "in_fit";
    } else if (table.has_column("std_error")) {
        err = "std_error";
    }
    p.x_label = xs;
    p.y_label = ys;
    p.x = table.column(xs);
    p.y = table.column(ys);
    if (!err.empty() && table.has_column(err)) {
        const auto e = table.column(err);
        for (std::size_t i = 0; i < e.size(); ++i) {
            p.y_lo.push_back(p.y[i] - e[i]);
            p.y_hi.push_back(p.y[i] + e[i]);
        }
    } else if (!lo.empty() && table.has_column(lo) && table.has_column(hi)) {
        p.y_lo = table.column(lo);
        p.y_hi = table.column(hi);
    }

    std::vector<double> in_window;
    if (!window.empty() && table.has_column(window)) in_window = table.column(window);
    std::vector<double> fx;
    std::vector<double> fy;
    for (std::size_t i = 0; i < p.x.size(); ++i) {
        if (!in_window.empty() && in_window[i] == 0.0) continue;
        if (!drawable(kind, p.x[i], p.y[i])) continue;
        fx.push_back(log_x(kind) ? std::log(p.x[i]) : p.x[i]);
        fy.push_back(log_y(kind) ? std::log(p.y[i]) : p.y[i]);
    }
    const bool distinct = std::any_of(fx.begin(), fx.end(), [&](double v) { return v != fx.front(); });
    if (fx.size() >= 2 && distinct) {
        const auto fit = least_squares(fx, fy);
        p.fit = PlotFit{fit.slope, fit.intercept};
    }
    return p;
}

} // namespace chaoslab
