#pragma once

#include <span>
#include <variant>
#include <vector>

#include "chaoslab/measure.hpp"
#include "chaoslab/model.hpp"

namespace chaoslab {

/// Mean-field drift X -> b[X, p] for one fixed measure p, prepared once and
/// queried many times.
///
/// The result equals mean_field_drift(kernel, X, p) up to rounding. Sums run in
/// canonical atom order, so relabelling the atoms of p never changes a bit of
/// the output.
class FieldEvaluator {
public:
    /// Law-independent kernels only; no measure is needed.
    explicit FieldEvaluator(const DriftKernel& kernel);
    FieldEvaluator(const DriftKernel& kernel, const EmpiricalMeasure& measure);

    void drift(std::span<const double> x, std::span<double> out) const;
    std::size_t dim() const noexcept { return kernel_.dim; }

private:
    struct Direct {
        EmpiricalMeasure canonical;
    };
    struct Free {};
    struct Mean {
        std::vector<double> mean;
    };
    // Sorted atoms with centred prefix/suffix moments sum w (y - centre)^j.
    struct Moments {
        std::vector<double> sorted;
        std::vector<double> prefix; // (n + 1) x (k + 1)
        std::vector<double> suffix; // (n + 1) x (k + 1)
        double centre = 0.0;
    };

    DriftKernel kernel_;
    std::variant<Direct, Free, Mean, Moments> prepared_;
};

} // namespace chaoslab
