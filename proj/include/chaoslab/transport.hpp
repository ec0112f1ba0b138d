#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "chaoslab/measure.hpp"
#include "chaoslab/model.hpp"

namespace chaoslab {

struct PlanEntry {
    std::size_t i = 0; // atom of mu
    std::size_t j = 0; // atom of nu
    double mass = 0.0;
};

struct TransportResult {
    double cost = 0.0; // W_p
    std::vector<PlanEntry> plan;
    int order = 2;
};

/// Largest support accepted by the assignment solver.
inline constexpr std::size_t kMaxAssignmentSize = 4096;

/// |x - y|^p for p in {1, 2}; the ground cost used by every solver here.
double ground_cost(int p, std::span<const double> x, std::span<const double> y);

/// (sum_k mass_k |x_i - y_j|^p)^{1/p} of an arbitrary plan.
double plan_cost(int p, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, std::span<const PlanEntry> plan);

/// Exact W_p on the line through the monotone (quantile) coupling, splitting
/// atoms when weights differ.
TransportResult wasserstein_1d(int p, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

/// Exact W_p between two uniform clouds of the same size n <= 4096 in any
/// dimension, via an optimal linear assignment.
TransportResult wasserstein_assignment(int p, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

/// Optimal assignment for an n x n row-major cost matrix (Hungarian method with
/// potentials). Returns column[row].
std::vector<std::size_t> solve_assignment(std::span<const double> cost, std::size_t n);

/// W_p between sample clouds: the quantile coupling in d = 1 (which is an
/// optimal assignment there), the assignment solver otherwise.
double sample_wasserstein(int p, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

/// Test function for the Kantorovich-Rubinstein dual.
struct LipschitzFunction {
    std::string name;
    std::size_t dim = 0;
    PointFunction eval;
    double lipschitz_constant = 1.0;
};

/// Coordinate projections and their negations, plus for every coordinate and
/// every anchor a at `anchors` quantiles of the pooled supports:
/// +-|x_c - a|, +-max(x_c - a, 0), +-min(x_c - a, 0). All 1-Lipschitz.
std::vector<LipschitzFunction> default_dual_family(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                                                   std::size_t anchors = 33);

/// max over the family of int phi d mu - int phi d nu (and 0 for phi = 0).
/// This never exceeds W_1(mu, nu). Throws ValidationError if a member claims a
/// constant above 1 or a sampled difference quotient exceeds its constant.
double kr_dual_lower_bound(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                           std::span<const LipschitzFunction> family);

} // namespace chaoslab
