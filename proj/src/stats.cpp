#include "chaoslab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

#include "chaoslab/errors.hpp"

namespace chaoslab {

MeanEstimate estimate_mean(std::span<const double> values) {
    MeanEstimate e;
    e.count = values.size();
    if (values.empty()) return e;
    double sum = 0.0;
    for (double v : values) sum += v;
    e.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - e.mean) * (v - e.mean);
        const double var = ss / static_cast<double>(values.size() - 1);
        e.std_error = std::sqrt(var / static_cast<double>(values.size()));
    }
    return e;
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    const double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
    const double hi = successes == trials ? 1.0 : std::min(1.0, centre + half);
    return {lo, hi};
}

double student_t_critical(double level, double dof) {
    boost::math::students_t dist(dof);
    return boost::math::quantile(dist, 0.5 + 0.5 * level);
}

Interval LinearFit::slope_interval(double level) const {
    if (points < 3 || !std::isfinite(slope_se)) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        return {nan, nan};
    }
    const double t = student_t_critical(level, static_cast<double>(points - 2));
    return {slope - t * slope_se, slope + t * slope_se};
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw SpecificationError("least_squares: x and y differ in length");
    if (x.size() < 2) throw ValidationError("least_squares: need at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw ValidationError("least_squares: x values are all equal");
    LinearFit fit;
    fit.points = x.size();
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        sse += r * r;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
    fit.slope_se = x.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : std::numeric_limits<double>::quiet_NaN();
    return fit;
}

std::vector<std::size_t> monotone_violations(std::span<const double> values) {
    std::vector<std::size_t> out;
    for (std::size_t k = 1; k < values.size(); ++k)
        if (values[k] > values[k - 1]) out.push_back(k);
    return out;
}

} // namespace chaoslab
