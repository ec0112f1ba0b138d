#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace chaoslab {

/// Small dense row-major matrix. State dimensions here are single digits, so
/// no blocking or expression templates.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), values(r * c, fill) {}

    static Matrix identity(std::size_t n, double scale = 1.0);
    static Matrix diagonal(std::span<const double> diag);

    double& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }

    /// out = M x, summed in column order.
    void apply(std::span<const double> x, std::span<double> out) const;

    bool is_zero() const;
    bool operator==(const Matrix&) const = default;
};

/// Per-call work vector: stack storage for the small dimensions used here,
/// heap beyond that.
class Scratch {
public:
    explicit Scratch(std::size_t n) : view_(small_.data(), n) {
        if (n > small_.size()) {
            large_.resize(n);
            view_ = large_;
        }
    }
    Scratch(const Scratch&) = delete;
    Scratch& operator=(const Scratch&) = delete;

    std::span<double> span() noexcept { return view_; }
    double& operator[](std::size_t i) noexcept { return view_[i]; }

private:
    std::array<double, 16> small_{};
    std::vector<double> large_;
    std::span<double> view_;
};

inline double squared_norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

inline double norm(std::span<const double> x) { return std::sqrt(squared_norm(x)); }

inline double squared_distance(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) {
        const double d = x[c] - y[c];
        s += d * d;
    }
    return s;
}

inline double distance(std::span<const double> x, std::span<const double> y) {
    return std::sqrt(squared_distance(x, y));
}

} // namespace chaoslab
