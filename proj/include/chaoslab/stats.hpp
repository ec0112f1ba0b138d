#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace chaoslab {

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0; // sample standard deviation / sqrt(n)
    std::size_t count = 0;
};

/// Mean and standard error, summed in index order.
MeanEstimate estimate_mean(std::span<const double> values);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

/// Wilson score interval for a binomial proportion (95% by default).
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

/// Ordinary least squares y = intercept + slope x.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double slope_se = 0.0; // NaN when fewer than three points
    std::size_t points = 0;

    /// Two-sided confidence interval for the slope (Student t, n - 2 dof).
    Interval slope_interval(double level = 0.95) const;
};

/// Requires at least two points with distinct x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Two-sided Student-t critical value for the given level and degrees of freedom.
double student_t_critical(double level, double dof);

/// Indices k where values[k] > values[k-1], i.e. breaks of a nonincreasing sequence.
std::vector<std::size_t> monotone_violations(std::span<const double> values);

} // namespace chaoslab
