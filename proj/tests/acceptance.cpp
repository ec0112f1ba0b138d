// Acceptance checks: one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "chaoslab/config.hpp"
#include "chaoslab/csv.hpp"
#include "chaoslab/errors.hpp"
#include "chaoslab/experiments.hpp"
#include "chaoslab/run.hpp"
#include "chaoslab/sde.hpp"
#include "chaoslab/stats.hpp"
#include "chaoslab/transport.hpp"
#include "support.hpp"

using namespace chaoslab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

SimConfig sim(double dt, double t_final, std::uint64_t seed) {
    SimConfig c;
    c.dt = dt;
    c.t_final = t_final;
    c.seed = seed;
    return c;
}

ModelSpec quadratic_granular(std::optional<InitialLaw> initial = std::nullopt) {
    return granular_media_model(Potential::quadratic(1), Potential::quadratic(1), 1, std::move(initial));
}

std::string join(const std::vector<double>& v, const char* spec = "{:.4g}") {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + fmt::format(fmt::runtime(spec), v[i]);
    return out;
}

// 1. Chaos rate of the quadratic granular model; 4. sample W2^2 below the coupling gap.
RateFit criterion_one_fit() {
    const std::vector<std::size_t> grid{16, 32, 64, 128, 256, 512};
    return chaos_rate_experiment(quadratic_granular(), grid, sim(0.01, 1.0, 1), 200, ReferenceSettings{8192, 1});
}

Outcome chaos_rate(const RateFit& fit) {
    const bool pass = fit.slope >= -1.3 && fit.slope <= -0.7 && fit.r_squared >= 0.9;
    return {pass, fmt::format("slope {:.3f} in [-1.3, -0.7], r^2 {:.3f} >= 0.9; gaps {}", fit.slope, fit.r_squared,
                              join(fit.mean_sq_gaps))};
}

Outcome coupled_w2(const RateFit& fit) {
    bool pass = true;
    double worst = -INFINITY;
    for (std::size_t g = 0; g < fit.n_grid.size(); ++g) {
        const double se = std::hypot(fit.std_errors[g], fit.first_particle_std_errors[g]);
        const double margin = fit.w2sq_coupled[g] - (fit.mean_sq_gaps[g] + 3.0 * se);
        worst = std::max(worst, margin);
        pass = pass && margin <= 0.0;
    }
    return {pass, fmt::format("max of W2^2 - (gap + 3 SE) over N = {:.3g}; W2^2 coupled {}; independent {}", worst,
                              join(fit.w2sq_coupled), join(fit.w2sq_independent))};
}

// 2. Coupling gap is exactly zero when the drift ignores the law.
Outcome null_tests() {
    std::size_t nonzero = 0, checked = 0;
    for (const auto& model : {zero_drift_model(1, 1.3), linear_test_model(1.0, 2), zero_drift_model(3, 0.7)}) {
        for (std::size_t n : {1, 7, 64}) {
            auto config = sim(0.01, 1.0, 3);
            config.n_particles = n;
            const NoiseGrid noise(config.seed, config.dt);
            const auto flow = build_reference_flow(model, 256, config, 1, noise);
            const auto coupled = simulate_coupled(model, config, flow, noise);
            for (double g : coupled.mean_square_gap) {
                ++checked;
                if (g != 0.0) ++nonzero;
            }
            for (std::size_t r = 0; r < coupled.particle.states.size(); ++r)
                if (coupled.particle.states[r] != coupled.nonlinear.states[r]) ++nonzero;
        }
    }
    return {nonzero == 0, fmt::format("{} nonzero of {} per-step gaps and state records", nonzero, checked)};
}

// 3. Ornstein-Uhlenbeck moments against the closed form.
Outcome ou_oracle() {
    const double m0 = 1.0, v0 = 2.0, dt = 0.01, t = 1.0;
    const std::size_t n = 512, replicas = 100;
    const auto model = linear_test_model(1.0, 1, InitialLaw::isotropic_gaussian(1, m0, v0));
    std::vector<double> means(replicas), vars(replicas);
    for (std::size_t r = 0; r < replicas; ++r) {
        auto config = sim(dt, t, 17);
        config.n_particles = n;
        config.replica_id = static_cast<std::uint32_t>(r);
        config.snapshot_stride = config.steps();
        const auto ens = simulate_particle_system(model, config, NoiseGrid(config.seed, dt));
        const auto& x = ens.final_state();
        const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
        double ss = 0.0;
        for (double v : x) ss += (v - mean) * (v - mean);
        means[r] = mean;
        vars[r] = ss / static_cast<double>(n - 1);
    }
    const auto mean = estimate_mean(means);
    const auto var = estimate_mean(vars);
    const double exact_mean = linear_model_mean(1.0, m0, t);
    const double exact_var = linear_model_variance(1.0, v0, t);
    const auto steps = static_cast<int>(std::lround(t / dt));
    const double euler_mean = m0 * std::pow(1.0 - dt, steps);
    double euler_var = v0;
    for (int k = 0; k < steps; ++k) euler_var = (1.0 - dt) * (1.0 - dt) * euler_var + 2.0 * dt;
    const double mean_tol = 3.0 * mean.std_error + std::abs(euler_mean - exact_mean);
    const double var_tol = 3.0 * var.std_error + std::abs(euler_var - exact_var);
    const bool pass = std::abs(mean.mean - exact_mean) <= mean_tol && std::abs(var.mean - exact_var) <= var_tol;
    return {pass, fmt::format("mean {:.5f} vs {:.5f} (tol {:.2g}), variance {:.5f} vs {:.5f} (tol {:.2g})", mean.mean,
                              exact_mean, mean_tol, var.mean, exact_var, var_tol)};
}

// 5. Metric properties on random clouds.
double assignment_sum(const std::vector<double>& cost, std::size_t n, const std::vector<std::size_t>& column) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += cost[i * n + column[i]];
    return s;
}

Outcome metric_suite() {
    testing::Gen gen(2024);
    std::size_t failures = 0;
    std::size_t inexact = 0;
    double worst_brute = 0.0;
    std::string first;
    const auto fail = [&](const std::string& what) {
        if (failures++ == 0) first = what;
    };
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = gen.integer(1, 64);
        const std::size_t d = gen.integer(1, 3);
        const auto mu = gen.uniform_measure(n, d);
        const auto nu = gen.uniform_measure(n, d);
        const auto rho = gen.uniform_measure(n, d);
        for (int p : {1, 2}) {
            const double ab = wasserstein_assignment(p, mu, nu).cost;
            const double ba = wasserstein_assignment(p, nu, mu).cost;
            const double ac = wasserstein_assignment(p, mu, rho).cost;
            const double cb = wasserstein_assignment(p, rho, nu).cost;
            if (std::abs(ab - ba) > 1e-9) fail(fmt::format("symmetry, trial {}", trial));
            if (ab > ac + cb + 1e-9) fail(fmt::format("triangle, trial {}", trial));
            if (d == 1 && std::abs(ab - wasserstein_1d(p, mu, nu).cost) > 1e-9)
                fail(fmt::format("1D quantile formula, trial {}", trial));
        }
        const double w1 = wasserstein_assignment(1, mu, nu).cost;
        const double w2 = wasserstein_assignment(2, mu, nu).cost;
        if (w1 > w2 * (1.0 + 1e-12)) fail(fmt::format("W1 <= W2, trial {}", trial));
        const auto family = default_dual_family(mu, nu);
        if (kr_dual_lower_bound(mu, nu, family) > w1 + 1e-12) fail(fmt::format("KR dual <= W1, trial {}", trial));

        // Brute force over permutations, summed in row order on both sides.
        const std::size_t m = gen.integer(1, 6);
        const auto a = gen.uniform_measure(m, d);
        const auto b = gen.uniform_measure(m, d);
        for (int p : {1, 2}) {
            std::vector<double> cost(m * m);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j) cost[i * m + j] = ground_cost(p, a.point(i), b.point(j));
            std::vector<std::size_t> perm(m);
            std::iota(perm.begin(), perm.end(), 0);
            double best = INFINITY;
            do best = std::min(best, assignment_sum(cost, m, perm));
            while (std::next_permutation(perm.begin(), perm.end()));
            const double found = assignment_sum(cost, m, solve_assignment(cost, m));
            if (found != best) ++inexact;
            worst_brute = std::max(worst_brute, (found - best) / std::max(best, 1e-300));
            if (found > best * (1.0 + 1e-12) + 1e-300)
                fail(fmt::format("assignment vs brute force, trial {}", trial));
        }
    }
    const auto brute = fmt::format("assignment vs brute force: {} of 2000 differ in the last bits, worst relative {:.2g}",
                                   inexact, worst_brute);
    return {failures == 0, failures == 0 ? fmt::format("1000 trials, all properties hold; {}", brute)
                                         : fmt::format("{} failures, first: {}; {}", failures, first, brute)};
}

// 6. Tail of a Lipschitz observable.
Outcome observable_tails() {
    std::vector<double> r;
    for (int k = 0; k <= 15; ++k) r.push_back(0.02 * k);
    const auto dev = observable_deviation_experiment(quadratic_granular(), Observable::clipped_coordinate(1, 0, 10.0),
                                                     128, r, 5000, sim(0.01, 1.0, 6));
    const auto& t = dev.table;
    if (!t.fit_available() || !std::isfinite(t.fitted_c_ci.lo))
        return {false, fmt::format("no tail fit ({} window points)", t.fit_window.size())};
    const double c = t.fitted_c;
    std::size_t dominated = 0, point_violations = 0;
    for (std::size_t k = 0; k < r.size(); ++k) {
        const double bound = 2.0 * std::exp(-0.5 * c * 128.0 * r[k] * r[k]);
        if (t.confidence[k].lo <= bound) ++dominated;
        if (t.empirical_probs[k] > bound) ++point_violations;
    }
    const bool pass = c > 0.0 && t.fitted_c_ci.lo > 0.0 && dominated == r.size();
    return {pass, fmt::format("c = {:.3f}, 95% CI [{:.3f}, {:.3f}] over {} points; dominated at {}/{} r (point "
                              "estimates above the bound: {}); C_fit = {:.3f}",
                              c, t.fitted_c_ci.lo, t.fitted_c_ci.hi, t.fit_window.size(), dominated, r.size(),
                              point_violations, dev.c_fit)};
}

// 7. W1 deviation probabilities do not grow with N.
Outcome measure_tails() {
    const auto model = quadratic_granular();
    auto config = sim(0.01, 1.0, 7);
    const NoiseGrid noise(config.seed, config.dt);
    const auto flow = build_reference_flow(model, 16 * 512, config, 1, noise);
    std::vector<double> r;
    for (int k = 0; k <= 15; ++k) r.push_back(0.02 * k);
    const std::vector<std::size_t> ns{128, 256, 512};
    std::vector<DeviationTable> tables;
    for (std::size_t n : ns) tables.push_back(empirical_measure_deviation(model, n, r, 1000, config, false, flow).table);
    const auto& window = tables.front().fit_window;
    std::size_t violations = 0, increases = 0;
    for (std::size_t k : window) {
        for (std::size_t i = 0; i + 1 < ns.size(); ++i) {
            const auto& a = tables[i];
            const auto& b = tables[i + 1];
            if (b.empirical_probs[k] > a.empirical_probs[k]) {
                ++increases;
                if (!b.confidence[k].overlaps(a.confidence[k])) ++violations;
            }
        }
    }
    std::string probs;
    for (std::size_t k : window)
        probs += fmt::format(" r={:.2f}: {:.3f}/{:.3f}/{:.3f}", r[k], tables[0].empirical_probs[k],
                             tables[1].empirical_probs[k], tables[2].empirical_probs[k]);
    return {!window.empty() && violations == 0,
            fmt::format("{} window r values, {} increases, {} outside overlapping intervals;{}", window.size(),
                        increases, violations, probs)};
}

// 8. Exponential equilibration.
Outcome equilibration() {
    EquilibriumSettings ou_settings;
    ou_settings.replicas = 16;
    ou_settings.record_every = 10;
    const auto ou_model =
        granular_media_model(Potential::quadratic(1), Potential::zero(1), 1, InitialLaw::isotropic_gaussian(1, 5.0, 1.0));
    const auto ou = equilibrium_convergence(ou_model, 1024, sim(0.01, 5.0, 8),
                                            law_target(InitialLaw::isotropic_gaussian(1, 0.0, 1.0)), ou_settings);

    EquilibriumSettings gm_settings;
    gm_settings.replicas = 16;
    gm_settings.record_every = 10;
    gm_settings.gap_times = {1.0, 2.0, 4.0, 8.0};
    gm_settings.gap_replicas = 64;
    const auto gm = equilibrium_convergence(quadratic_granular(InitialLaw::isotropic_gaussian(1, 3.0, 1.0)), 512,
                                            sim(0.01, 8.0, 9),
                                            law_target(InitialLaw::isotropic_gaussian(1, 0.0, 0.5)), gm_settings);
    const double level = estimate_mean(gm.gap_means).mean;
    bool flat = false;
    double slope = NAN, slope_se = NAN;
    if (gm.gap_trend) {
        slope = gm.gap_trend->slope;
        slope_se = gm.gap_trend->slope_se;
        flat = (slope - 2.0 * slope_se) * 7.0 <= 0.1 * level;
    }
    const bool ou_ok = std::abs(ou.fitted_decay_rate - 1.0) <= 0.3;
    const bool gm_ok = gm.fitted_decay_rate > 0.0;
    return {ou_ok && gm_ok && flat,
            fmt::format("OU rate {:.3f} ({} points, 1 +- 30%); granular rate {:.3f} ({} points) > 0; gap at t=1,2,4,8 "
                        "{} with slope {:.3g} +- {:.2g} (growth bound 0.1 x {:.3g} over the window)",
                        ou.fitted_decay_rate, ou.fit_points, gm.fitted_decay_rate, gm.fit_points, join(gm.gap_means),
                        slope, slope_se, level)};
}

// 9. Tamed non-Lipschitz interaction.
Outcome cubic_tamed() {
    const auto model = granular_media_model(Potential::quadratic(1), Potential::abs_cubic(1), 1);
    auto config = sim(0.005, 1.0, 10);
    config.taming = true;
    const std::vector<std::size_t> grid{32, 64, 128, 256};
    try {
        const auto fit = chaos_rate_experiment(model, grid, config, 200);
        return {fit.slope <= -0.5, fmt::format("no divergence; slope {:.3f} <= -0.5, r^2 {:.3f}; gaps {}", fit.slope,
                                              fit.r_squared, join(fit.mean_sq_gaps))};
    } catch (const DivergenceError& e) {
        return {false, fmt::format("diverged: {}", e.what())};
    }
}

// 10. Reruns from the manifest reproduce every table, at any thread count.
Outcome reproducibility() {
    const auto root = fs::temp_directory_path() / "chaoslab_acceptance";
    fs::remove_all(root);
    const std::vector<std::string> kinds{"chaos_rate", "observable_deviation", "measure_deviation", "equilibrium",
                                         "trajectory"};
    std::size_t compared = 0, mismatched = 0;
    std::string first;
    for (const auto& kind : kinds) {
        const auto a = root / (kind + "_a");
        const auto b = root / (kind + "_b");
        const auto config = parse_config(fmt::format(
            "[sim]\nt_final = 0.5\nn_particles = 32\nn_grid = [8, 16, 32]\nreplicas = 24\n[experiment]\nkind = {}\n"
            "gap_times = [0.25, 0.5]\ngap_replicas = 6\n[output]\ndirectory = \"{}\"\n",
            kind, a.string()));
        const auto original = run(config, RunOptions{std::nullopt, std::nullopt, 1});
        const auto rerun = run(load_run_input(a / kManifestName), RunOptions{std::nullopt, b.string(), 3});
        if (!original.complete || !rerun.complete) return {false, fmt::format("{} run incomplete", kind)};
        for (const auto& f : original.files) {
            if (fs::path(f.path).extension() != ".csv") continue;
            ++compared;
            if (read_text(a / f.path) != read_text(b / f.path)) {
                if (mismatched++ == 0) first = kind + "/" + f.path;
            }
        }
    }
    fs::remove_all(root);
    return {compared > 0 && mismatched == 0,
            mismatched == 0 ? fmt::format("{} CSV files across {} experiment kinds byte-identical (threads 1 vs 3)",
                                          compared, kinds.size())
                            : fmt::format("{} of {} CSVs differ, first {}", mismatched, compared, first)};
}

} // namespace

int main() {
    using Clock = std::chrono::steady_clock;
    int failed = 0;
    const auto report = [&](int id, const std::function<Outcome()>& check) {
        const auto start = Clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, fmt::format("error: {}", e.what())};
        }
        const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
        if (!o.pass) ++failed;
        fmt::print("{} criterion {}: {} [{:.1f}s]\n", o.pass ? "PASS" : "FAIL", id, o.detail, seconds);
        std::fflush(stdout);
    };

    std::optional<RateFit> fit;
    const auto shared_fit = [&]() -> const RateFit& {
        if (!fit) fit = criterion_one_fit();
        return *fit;
    };
    report(1, [&] { return chaos_rate(shared_fit()); });
    report(2, null_tests);
    report(3, ou_oracle);
    report(4, [&] { return coupled_w2(shared_fit()); });
    report(5, metric_suite);
    report(6, observable_tails);
    report(7, measure_tails);
    report(8, equilibration);
    report(9, cubic_tamed);
    report(10, reproducibility);
    fmt::print("{} of 10 criteria passed\n", 10 - failed);
    return failed == 0 ? 0 : 1;
}
