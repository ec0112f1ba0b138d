#include "chaoslab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "chaoslab/errors.hpp"

namespace chaoslab {
namespace {

void check_order(int p) {
    if (p != 1 && p != 2) throw ValidationError(fmt::format("Wasserstein order must be 1 or 2, got {}", p));
}

void check_pair(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    if (mu.empty() || nu.empty()) throw ValidationError("Wasserstein distance of an empty measure");
    if (mu.dim() != nu.dim()) throw SpecificationError("Wasserstein distance: dimension mismatch");
}

double root(int p, double value) { return p == 1 ? value : std::sqrt(value); }

std::vector<std::size_t> sorted_1d(const EmpiricalMeasure& m) {
    std::vector<std::size_t> order(m.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return m.point(a)[0] < m.point(b)[0]; });
    return order;
}

} // namespace

double ground_cost(int p, std::span<const double> x, std::span<const double> y) {
    const double sq = squared_distance(x, y);
    return p == 2 ? sq : std::sqrt(sq);
}

double plan_cost(int p, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, std::span<const PlanEntry> plan) {
    double total = 0.0;
    for (const auto& e : plan) total += e.mass * ground_cost(p, mu.point(e.i), nu.point(e.j));
    return root(p, total);
}

TransportResult wasserstein_1d(int p, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    check_order(p);
    check_pair(mu, nu);
    if (mu.dim() != 1) throw ValidationError("wasserstein_1d: measures must be one-dimensional");

    TransportResult result;
    result.order = p;
    const auto a_order = sorted_1d(mu);
    const auto b_order = sorted_1d(nu);
    const bool equal_uniform = mu.is_uniform() && nu.is_uniform() && mu.size() == nu.size();

    double total = 0.0;
    if (equal_uniform) {
        const double w = mu.weight(0);
        result.plan.reserve(mu.size());
        for (std::size_t k = 0; k < mu.size(); ++k) {
            const std::size_t i = a_order[k];
            const std::size_t j = b_order[k];
            result.plan.push_back({i, j, w});
            total += ground_cost(p, mu.point(i), nu.point(j));
        }
        result.cost = root(p, total * w);
        return result;
    }

    std::size_t ia = 0;
    std::size_t ib = 0;
    double left_a = mu.weight(a_order[0]);
    double left_b = nu.weight(b_order[0]);
    while (ia < a_order.size() && ib < b_order.size()) {
        const std::size_t i = a_order[ia];
        const std::size_t j = b_order[ib];
        const double mass = std::min(left_a, left_b);
        if (mass > 0.0) {
            result.plan.push_back({i, j, mass});
            total += mass * ground_cost(p, mu.point(i), nu.point(j));
        }
        left_a -= mass;
        left_b -= mass;
        if (left_a <= 0.0) {
            if (++ia < a_order.size()) left_a = mu.weight(a_order[ia]);
        }
        if (left_b <= 0.0) {
            if (++ib < b_order.size()) left_b = nu.weight(b_order[ib]);
        }
    }
    result.cost = root(p, total);
    return result;
}

std::vector<std::size_t> solve_assignment(std::span<const double> cost, std::size_t n) {
    if (cost.size() != n * n) throw SpecificationError("solve_assignment: cost matrix must be n x n");
    if (n == 0) return {};
    constexpr double inf = std::numeric_limits<double>::infinity();
    // 1-based potentials; column 0 is the virtual source.
    std::vector<double> u(n + 1, 0.0);
    std::vector<double> v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0); // match[col] = row
    std::vector<std::size_t> way(n + 1, 0);
    std::vector<double> min_slack(n + 1);
    std::vector<char> used(n + 1);
    for (std::size_t row = 1; row <= n; ++row) {
        match[0] = row;
        std::size_t col0 = 0;
        std::fill(min_slack.begin(), min_slack.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[col0] = 1;
            const std::size_t r = match[col0];
            double delta = inf;
            std::size_t col1 = 0;
            for (std::size_t col = 1; col <= n; ++col) {
                if (used[col]) continue;
                const double slack = cost[(r - 1) * n + (col - 1)] - u[r] - v[col];
                if (slack < min_slack[col]) {
                    min_slack[col] = slack;
                    way[col] = col0;
                }
                if (min_slack[col] < delta) {
                    delta = min_slack[col];
                    col1 = col;
                }
            }
            for (std::size_t col = 0; col <= n; ++col) {
                if (used[col]) {
                    u[match[col]] += delta;
                    v[col] -= delta;
                } else {
                    min_slack[col] -= delta;
                }
            }
            col0 = col1;
        } while (match[col0] != 0);
        do {
            const std::size_t col1 = way[col0];
            match[col0] = match[col1];
            col0 = col1;
        } while (col0 != 0);
    }
    std::vector<std::size_t> assignment(n);
    for (std::size_t col = 1; col <= n; ++col) assignment[match[col] - 1] = col - 1;
    return assignment;
}

TransportResult wasserstein_assignment(int p, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    check_order(p);
    check_pair(mu, nu);
    if (mu.size() != nu.size())
        throw ValidationError(fmt::format(
            "wasserstein_assignment: supports differ in size ({} vs {}); use wasserstein_1d or resample to equal size",
            mu.size(), nu.size()));
    if (!mu.is_uniform() || !nu.is_uniform())
        throw ValidationError(
            "wasserstein_assignment: weights must be uniform; use wasserstein_1d or resample to a uniform cloud");
    const std::size_t n = mu.size();
    if (n > kMaxAssignmentSize)
        throw ValidationError(fmt::format("wasserstein_assignment: n = {} exceeds {}", n, kMaxAssignmentSize));

    std::vector<double> cost(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = ground_cost(p, mu.point(i), nu.point(j));
    const auto assignment = solve_assignment(cost, n);

    TransportResult result;
    result.order = p;
    result.plan.reserve(n);
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        value += cost[i * n + assignment[i]];
        result.plan.push_back({i, assignment[i], mu.weight(i)});
    }
    result.cost = root(p, value / static_cast<double>(n));
    return result;
}

double sample_wasserstein(int p, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    if (mu.dim() == 1) return wasserstein_1d(p, mu, nu).cost;
    return wasserstein_assignment(p, mu, nu).cost;
}

std::vector<LipschitzFunction> default_dual_family(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                                                   std::size_t anchors) {
    check_pair(mu, nu);
    const std::size_t d = mu.dim();
    std::vector<LipschitzFunction> family;
    for (std::size_t c = 0; c < d; ++c) {
        family.push_back({fmt::format("x[{}]", c), d, [c](std::span<const double> x) { return x[c]; }, 1.0});
        family.push_back({fmt::format("-x[{}]", c), d, [c](std::span<const double> x) { return -x[c]; }, 1.0});

        std::vector<double> pooled;
        pooled.reserve(mu.size() + nu.size());
        for (std::size_t i = 0; i < mu.size(); ++i) pooled.push_back(mu.point(i)[c]);
        for (std::size_t i = 0; i < nu.size(); ++i) pooled.push_back(nu.point(i)[c]);
        std::sort(pooled.begin(), pooled.end());
        for (std::size_t q = 0; q < anchors; ++q) {
            const double level = anchors == 1 ? 0.5 : static_cast<double>(q) / static_cast<double>(anchors - 1);
            const auto idx = static_cast<std::size_t>(std::lround(level * static_cast<double>(pooled.size() - 1)));
            const double a = pooled[idx];
            for (double s : {1.0, -1.0}) {
                family.push_back({fmt::format("{}|x[{}]-{}|", s, c, a), d,
                                  [c, a, s](std::span<const double> x) { return s * std::abs(x[c] - a); }, 1.0});
                family.push_back({fmt::format("{}max(x[{}]-{},0)", s, c, a), d,
                                  [c, a, s](std::span<const double> x) { return s * std::max(x[c] - a, 0.0); }, 1.0});
                family.push_back({fmt::format("{}min(x[{}]-{},0)", s, c, a), d,
                                  [c, a, s](std::span<const double> x) { return s * std::min(x[c] - a, 0.0); }, 1.0});
            }
        }
    }
    return family;
}

double kr_dual_lower_bound(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                           std::span<const LipschitzFunction> family) {
    check_pair(mu, nu);
    std::mt19937_64 rng(0x4b52'6475'616cULL);
    double best = 0.0;
    for (const auto& phi : family) {
        if (phi.dim != mu.dim()) throw SpecificationError("kr_dual_lower_bound: test function dimension mismatch");
        if (!(phi.lipschitz_constant <= 1.0))
            throw ValidationError(fmt::format("kr_dual_lower_bound: {} is not certified 1-Lipschitz", phi.name));
        // Sample check on pairs of support points.
        std::uniform_int_distribution<std::size_t> pick_a(0, mu.size() - 1);
        std::uniform_int_distribution<std::size_t> pick_b(0, nu.size() - 1);
        for (int s = 0; s < 32; ++s) {
            const auto x = mu.point(pick_a(rng));
            const auto y = nu.point(pick_b(rng));
            const double dist = distance(x, y);
            if (std::abs(phi.eval(x) - phi.eval(y)) > phi.lipschitz_constant * dist + 1e-12 * (1.0 + dist))
                throw ValidationError(fmt::format("kr_dual_lower_bound: {} violates its Lipschitz constant", phi.name));
        }
        double integral = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i) integral += mu.weight(i) * phi.eval(mu.point(i));
        for (std::size_t j = 0; j < nu.size(); ++j) integral -= nu.weight(j) * phi.eval(nu.point(j));
        best = std::max(best, integral);
    }
    return best;
}

} // namespace chaoslab
