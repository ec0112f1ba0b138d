#include "chaoslab/field.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "chaoslab/errors.hpp"

namespace chaoslab {
namespace {

constexpr std::array<std::array<double, 4>, 4> kBinomial{{
    {1, 0, 0, 0},
    {1, 1, 0, 0},
    {1, 2, 1, 0},
    {1, 3, 3, 1},
}};

double ipow(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

} // namespace

FieldEvaluator::FieldEvaluator(const DriftKernel& kernel) : kernel_(kernel), prepared_(Free{}) {
    if (!kernel.law_independent())
        throw SpecificationError("FieldEvaluator: kernel depends on the measure, a measure is required");
}

FieldEvaluator::FieldEvaluator(const DriftKernel& kernel, const EmpiricalMeasure& measure) : kernel_(kernel) {
    if (measure.empty()) throw SpecificationError("FieldEvaluator: empty measure");
    if (measure.dim() != kernel.dim) throw SpecificationError("FieldEvaluator: dimension mismatch");

    if (std::holds_alternative<LawIndependent>(kernel.structure)) {
        prepared_ = Free{};
    } else if (std::holds_alternative<AffineInteraction>(kernel.structure)) {
        prepared_ = Mean{measure.mean()};
    } else if (const auto* power = std::get_if<PowerInteraction1d>(&kernel.structure)) {
        if (kernel.dim != 1 || power->exponent < 1 || power->exponent > 3)
            throw SpecificationError("FieldEvaluator: power interaction needs d = 1 and exponent in 1..3");
        const auto canon = measure.canonical();
        const std::size_t n = canon.size();
        const auto k = static_cast<std::size_t>(power->exponent);
        Moments m;
        m.sorted.assign(canon.points().begin(), canon.points().end());
        double centre = 0.0;
        for (std::size_t i = 0; i < n; ++i) centre += canon.weight(i) * m.sorted[i];
        m.centre = centre;
        m.prefix.assign((n + 1) * (k + 1), 0.0);
        m.suffix.assign((n + 1) * (k + 1), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double y = m.sorted[i] - centre;
            double yp = canon.weight(i);
            for (std::size_t j = 0; j <= k; ++j) {
                m.prefix[(i + 1) * (k + 1) + j] = m.prefix[i * (k + 1) + j] + yp;
                yp *= y;
            }
        }
        for (std::size_t i = n; i-- > 0;) {
            const double y = m.sorted[i] - centre;
            double yp = canon.weight(i);
            for (std::size_t j = 0; j <= k; ++j) {
                m.suffix[i * (k + 1) + j] = m.suffix[(i + 1) * (k + 1) + j] + yp;
                yp *= y;
            }
        }
        prepared_ = std::move(m);
    } else {
        prepared_ = Direct{measure.canonical()};
    }
}

void FieldEvaluator::drift(std::span<const double> x, std::span<double> out) const {
    const std::size_t d = kernel_.dim;
    if (x.size() != d || out.size() != d) throw SpecificationError("FieldEvaluator::drift: dimension mismatch");

    if (std::holds_alternative<Free>(prepared_)) {
        std::get<LawIndependent>(kernel_.structure).self(x, out);
        return;
    }
    if (const auto* mean = std::get_if<Mean>(&prepared_)) {
        const auto& affine = std::get<AffineInteraction>(kernel_.structure);
        affine.self(x, out);
        std::array<double, 16> small{};
        std::vector<double> large;
        std::span<double> cy(small.data(), d);
        if (d > small.size()) {
            large.resize(d);
            cy = large;
        }
        affine.coupling.apply(mean->mean, cy);
        for (std::size_t c = 0; c < d; ++c) out[c] += cy[c];
        return;
    }
    if (const auto* m = std::get_if<Moments>(&prepared_)) {
        const auto& power = std::get<PowerInteraction1d>(kernel_.structure);
        const auto k = static_cast<std::size_t>(power.exponent);
        const auto lo = static_cast<std::size_t>(std::lower_bound(m->sorted.begin(), m->sorted.end(), x[0]) -
                                                 m->sorted.begin());
        const auto hi = static_cast<std::size_t>(std::upper_bound(m->sorted.begin(), m->sorted.end(), x[0]) -
                                                 m->sorted.begin());
        const double u = x[0] - m->centre;
        // Atoms below x contribute (u - y)^k, atoms above contribute -(y - u)^k; ties contribute 0.
        double below = 0.0;
        double above = 0.0;
        for (std::size_t j = 0; j <= k; ++j) {
            const double c = kBinomial[k][j];
            const double sign = (j % 2 == 0) ? 1.0 : -1.0;
            below += c * ipow(u, static_cast<int>(k - j)) * sign * m->prefix[lo * (k + 1) + j];
            above += c * ipow(-u, static_cast<int>(k - j)) * m->suffix[hi * (k + 1) + j];
        }
        power.self(x, out);
        out[0] += power.coefficient * (below - above);
        return;
    }
    const auto& direct = std::get<Direct>(prepared_);
    std::vector<double> term(d);
    std::vector<double> acc(d, 0.0);
    for (std::size_t j = 0; j < direct.canonical.size(); ++j) {
        kernel_.eval(x, direct.canonical.point(j), term);
        const double w = direct.canonical.weight(j);
        for (std::size_t c = 0; c < d; ++c) acc[c] += w * term[c];
    }
    std::copy(acc.begin(), acc.end(), out.begin());
}

} // namespace chaoslab
