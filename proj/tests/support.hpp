#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "chaoslab/measure.hpp"

namespace testing {

// Small hand-rolled generator for property tests; fixed seeds keep failures reproducible.
struct Gen {
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    double normal() { return std::normal_distribution<double>()(rng); }
    std::size_t integer(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    }

    std::vector<double> points(std::size_t n, std::size_t d, double box = 3.0) {
        std::vector<double> out(n * d);
        for (double& v : out) v = uniform(-box, box);
        return out;
    }

    chaoslab::EmpiricalMeasure uniform_measure(std::size_t n, std::size_t d, double box = 3.0) {
        return chaoslab::EmpiricalMeasure::uniform(d, points(n, d, box));
    }

    chaoslab::EmpiricalMeasure weighted_measure(std::size_t n, std::size_t d, double box = 3.0) {
        std::vector<double> w(n);
        double total = 0.0;
        for (double& v : w) total += (v = uniform(0.1, 1.0));
        for (double& v : w) v /= total;
        return chaoslab::EmpiricalMeasure(d, points(n, d, box), w);
    }

    std::mt19937_64 rng;
};

} // namespace testing
