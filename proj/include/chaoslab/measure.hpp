#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace chaoslab {

/// Weighted point cloud in R^d. Points are stored row-major (n x d).
class EmpiricalMeasure {
public:
    EmpiricalMeasure() = default;

    /// General weighted measure; weights must be nonnegative and sum to 1 within 1e-12.
    EmpiricalMeasure(std::size_t dim, std::vector<double> points, std::vector<double> weights);

    /// Uniform measure 1/n sum delta_{x_i}; every weight is exactly 1.0/n.
    static EmpiricalMeasure uniform(std::size_t dim, std::vector<double> points);
    static EmpiricalMeasure uniform(std::size_t dim, std::span<const double> points);

    std::size_t size() const noexcept { return weights_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    bool empty() const noexcept { return weights_.empty(); }
    bool is_uniform() const noexcept { return uniform_; }

    std::span<const double> point(std::size_t i) const { return {points_.data() + i * dim_, dim_}; }
    double weight(std::size_t i) const { return weights_[i]; }
    std::span<const double> points() const noexcept { return points_; }
    std::span<const double> weights() const noexcept { return weights_; }

    /// Copy with atoms sorted lexicographically by (coordinates, weight). Any
    /// permutation of the same atoms has the same canonical form.
    EmpiricalMeasure canonical() const;

    /// Weighted mean, summed in canonical order.
    std::vector<double> mean() const;

    /// Each atom moved by `shift`.
    EmpiricalMeasure translated(std::span<const double> shift) const;

    /// Atoms i in `indices`, reweighted uniformly.
    EmpiricalMeasure subset(std::span<const std::size_t> indices) const;

    /// Projection onto one coordinate.
    EmpiricalMeasure coordinate(std::size_t c) const;

private:
    std::size_t dim_ = 0;
    std::vector<double> points_;
    std::vector<double> weights_;
    bool uniform_ = false;
};

/// Order of atoms in canonical form: lexicographic on (coordinates, weight).
std::vector<std::size_t> canonical_order(const EmpiricalMeasure& measure);

} // namespace chaoslab
