#include <doctest.h>

#include <cmath>
#include <vector>

#include "chaoslab/errors.hpp"
#include "chaoslab/stats.hpp"
#include "support.hpp"

using namespace chaoslab;

TEST_SUITE("stats") {

TEST_CASE("mean and standard error") {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    const auto e = estimate_mean(v);
    CHECK(e.mean == 2.5);
    CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)).epsilon(1e-15));
    CHECK(e.count == 4);
    CHECK(estimate_mean(std::vector<double>{7.0}).std_error == 0.0);
}

TEST_CASE("Wilson interval reference values") {
    const auto w = wilson_interval(5, 100);
    CHECK(w.lo == doctest::Approx(0.02154).epsilon(1e-3));
    CHECK(w.hi == doctest::Approx(0.11175).epsilon(1e-3));
    const auto zero = wilson_interval(0, 50);
    CHECK(zero.lo == 0.0);
    CHECK(zero.hi > 0.0);
    const auto all = wilson_interval(50, 50);
    CHECK(all.hi == doctest::Approx(1.0));
    CHECK(all.contains(1.0));
    CHECK(w.overlaps(Interval{0.1, 0.2}));
    CHECK_FALSE(w.overlaps(Interval{0.2, 0.3}));
}

TEST_CASE("least squares recovers an exact line") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 - 2.0 * v);
    const auto f = least_squares(x, y);
    CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(f.intercept == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f.slope_se == doctest::Approx(0.0).scale(1.0));
    CHECK(f.points == 5);
    CHECK(std::isnan(least_squares(std::vector<double>{0, 1}, std::vector<double>{0, 1}).slope_se));
    CHECK_THROWS_AS(least_squares(std::vector<double>{1, 1}, std::vector<double>{0, 1}), ValidationError);
    CHECK_THROWS_AS(least_squares(std::vector<double>{1}, std::vector<double>{0}), ValidationError);
}

TEST_CASE("slope interval covers the true slope at the nominal rate") {
    testing::Gen gen(5);
    int covered = 0;
    constexpr int trials = 2000;
    std::vector<double> x{0, 1, 2, 3, 4, 5, 6, 7};
    for (int t = 0; t < trials; ++t) {
        std::vector<double> y;
        for (double v : x) y.push_back(1.0 + 0.5 * v + gen.normal());
        if (least_squares(x, y).slope_interval().contains(0.5)) ++covered;
    }
    const double rate = static_cast<double>(covered) / trials;
    CHECK(rate > 0.93);
    CHECK(rate < 0.97);
}

TEST_CASE("Student t critical values") {
    CHECK(student_t_critical(0.95, 10) == doctest::Approx(2.2281388519862747).epsilon(1e-12));
    CHECK(student_t_critical(0.95, 1e7) == doctest::Approx(1.959963984540054).epsilon(1e-6));
}

TEST_CASE("monotone violations") {
    CHECK(monotone_violations(std::vector<double>{1.0, 0.5, 0.5, 0.1}).empty());
    CHECK(monotone_violations(std::vector<double>{1.0, 0.5, 0.6, 0.1, 0.2}) == std::vector<std::size_t>{2, 4});
}

TEST_CASE("standard error halves when replicas quadruple") {
    testing::Gen gen(8);
    std::vector<double> ratios;
    for (int t = 0; t < 200; ++t) {
        std::vector<double> a, b;
        for (int i = 0; i < 100; ++i) a.push_back(gen.normal());
        for (int i = 0; i < 400; ++i) b.push_back(gen.normal());
        ratios.push_back(estimate_mean(b).std_error / estimate_mean(a).std_error);
    }
    CHECK(estimate_mean(ratios).mean == doctest::Approx(0.5).epsilon(0.05));
}

}
