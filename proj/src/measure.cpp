#include "chaoslab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chaoslab/errors.hpp"

namespace chaoslab {

EmpiricalMeasure::EmpiricalMeasure(std::size_t dim, std::vector<double> points, std::vector<double> weights)
    : dim_(dim), points_(std::move(points)), weights_(std::move(weights)) {
    if (dim_ == 0) throw ValidationError("EmpiricalMeasure: dimension must be positive");
    if (points_.size() != weights_.size() * dim_)
        throw ValidationError("EmpiricalMeasure: point array does not match weights x dimension");
    double total = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("EmpiricalMeasure: weights must be nonnegative");
        total += w;
    }
    if (!weights_.empty() && std::abs(total - 1.0) > 1e-12)
        throw ValidationError("EmpiricalMeasure: weights must sum to 1");
    const std::size_t n = weights_.size();
    uniform_ = n > 0 && std::all_of(weights_.begin(), weights_.end(),
                                    [n](double w) { return w == 1.0 / static_cast<double>(n); });
}

EmpiricalMeasure EmpiricalMeasure::uniform(std::size_t dim, std::vector<double> points) {
    if (dim == 0) throw ValidationError("EmpiricalMeasure: dimension must be positive");
    if (points.size() % dim != 0) throw ValidationError("EmpiricalMeasure: point array not a multiple of dimension");
    const std::size_t n = points.size() / dim;
    EmpiricalMeasure m;
    m.dim_ = dim;
    m.points_ = std::move(points);
    m.weights_.assign(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n));
    m.uniform_ = n > 0;
    return m;
}

EmpiricalMeasure EmpiricalMeasure::uniform(std::size_t dim, std::span<const double> points) {
    return uniform(dim, std::vector<double>(points.begin(), points.end()));
}

std::vector<std::size_t> canonical_order(const EmpiricalMeasure& measure) {
    std::vector<std::size_t> order(measure.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto pa = measure.point(a);
        const auto pb = measure.point(b);
        for (std::size_t c = 0; c < pa.size(); ++c) {
            if (pa[c] < pb[c]) return true;
            if (pb[c] < pa[c]) return false;
        }
        return measure.weight(a) < measure.weight(b);
    });
    return order;
}

EmpiricalMeasure EmpiricalMeasure::canonical() const {
    const auto order = canonical_order(*this);
    EmpiricalMeasure out;
    out.dim_ = dim_;
    out.uniform_ = uniform_;
    out.points_.reserve(points_.size());
    out.weights_.reserve(weights_.size());
    for (std::size_t i : order) {
        const auto p = point(i);
        out.points_.insert(out.points_.end(), p.begin(), p.end());
        out.weights_.push_back(weights_[i]);
    }
    return out;
}

std::vector<double> EmpiricalMeasure::mean() const {
    std::vector<double> m(dim_, 0.0);
    for (std::size_t i : canonical_order(*this)) {
        const auto p = point(i);
        for (std::size_t c = 0; c < dim_; ++c) m[c] += weights_[i] * p[c];
    }
    return m;
}

EmpiricalMeasure EmpiricalMeasure::translated(std::span<const double> shift) const {
    if (shift.size() != dim_) throw SpecificationError("EmpiricalMeasure::translated: dimension mismatch");
    EmpiricalMeasure out = *this;
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t c = 0; c < dim_; ++c) out.points_[i * dim_ + c] += shift[c];
    return out;
}

EmpiricalMeasure EmpiricalMeasure::subset(std::span<const std::size_t> indices) const {
    std::vector<double> pts;
    pts.reserve(indices.size() * dim_);
    for (std::size_t i : indices) {
        if (i >= size()) throw SpecificationError("EmpiricalMeasure::subset: index out of range");
        const auto p = point(i);
        pts.insert(pts.end(), p.begin(), p.end());
    }
    return uniform(dim_, std::move(pts));
}

EmpiricalMeasure EmpiricalMeasure::coordinate(std::size_t c) const {
    if (c >= dim_) throw SpecificationError("EmpiricalMeasure::coordinate: index out of range");
    std::vector<double> pts(size());
    for (std::size_t i = 0; i < size(); ++i) pts[i] = points_[i * dim_ + c];
    if (uniform_) return uniform(1, std::move(pts));
    return EmpiricalMeasure(1, std::move(pts), weights_);
}

} // namespace chaoslab
