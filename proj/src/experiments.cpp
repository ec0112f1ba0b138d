#include "chaoslab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "chaoslab/errors.hpp"
#include "chaoslab/parallel.hpp"
#include "chaoslab/transport.hpp"

namespace chaoslab {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Only the initial and terminal states are kept for replicas.
SimConfig replica_config(const SimConfig& base, std::size_t n, std::uint32_t replica_id) {
    SimConfig c = base;
    c.n_particles = n;
    c.replica_id = replica_id;
    c.snapshot_stride = std::max<std::size_t>(1, base.steps());
    c.workers = 1;
    return c;
}

std::uint32_t replica_key(const SimConfig& base, std::size_t offset) {
    const std::size_t id = static_cast<std::size_t>(base.replica_id) + offset;
    if (id > std::numeric_limits<std::uint32_t>::max()) throw ValidationError("replica id space exhausted");
    return static_cast<std::uint32_t>(id);
}

template <class F>
auto with_label(const std::string& label, F&& f) {
    try {
        return f();
    } catch (const DivergenceError& e) {
        throw e.with_context(label);
    }
}

void check_replicas(std::size_t replicas) {
    if (replicas == 0) throw ValidationError("replicas must be at least 1");
}

ReferenceFlow make_flow(const ModelSpec& model, const SimConfig& config, std::size_t largest_n,
                        const ReferenceSettings& reference) {
    SimConfig c = config;
    c.replica_id = 0;
    return with_label("reference flow", [&] {
        return build_reference_flow(model, reference.resolve_m(largest_n), c, reference.picard_iters,
                                    NoiseGrid(config.seed, config.dt));
    });
}

EmpiricalMeasure cloud(std::size_t dim, const std::vector<double>& points) { return EmpiricalMeasure::uniform(dim, points); }

} // namespace

std::vector<std::size_t> keyed_subsample(std::size_t population, std::size_t count, const NoiseGrid& noise,
                                         std::uint32_t replica) {
    std::vector<std::size_t> idx(population);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (count >= population) return idx;
    for (std::size_t k = 0; k < count; ++k) {
        const double u = noise.uniform(Stream::subsample, replica, static_cast<std::uint32_t>(k), 0, 0);
        const std::size_t span = population - k;
        const std::size_t pick = k + std::min(span - 1, static_cast<std::size_t>(u * static_cast<double>(span)));
        std::swap(idx[k], idx[pick]);
    }
    idx.resize(count);
    return idx;
}

// ---------------------------------------------------------------------------
// Chaos rate

RateFit chaos_rate_experiment(const ModelSpec& model, std::span<const std::size_t> n_grid, const SimConfig& config,
                              std::size_t replicas, const ReferenceSettings& reference) {
    if (n_grid.empty()) throw ValidationError("chaos rate: n_grid is empty");
    check_replicas(replicas);
    config.validate();
    const std::size_t largest = *std::max_element(n_grid.begin(), n_grid.end());
    return chaos_rate_experiment(model, n_grid, config, replicas, make_flow(model, config, largest, reference));
}

RateFit chaos_rate_experiment(const ModelSpec& model, std::span<const std::size_t> n_grid, const SimConfig& config,
                              std::size_t replicas, const ReferenceFlow& flow) {
    if (n_grid.empty()) throw ValidationError("chaos rate: n_grid is empty");
    check_replicas(replicas);
    config.validate();
    for (std::size_t n : n_grid)
        if (n == 0) throw ValidationError("chaos rate: every N must be positive");

    const std::size_t d = model.dim();
    const std::size_t cells = n_grid.size() * replicas;
    const NoiseGrid noise(config.seed, config.dt);

    std::vector<double> terminal_gap(cells);
    std::vector<double> first_particle(cells * d);
    std::vector<double> first_nonlinear(cells * d);

    parallel_indices(cells, config.workers, [&](std::size_t cell) {
        const std::size_t g = cell / replicas;
        const std::size_t r = cell % replicas;
        const SimConfig c = replica_config(config, n_grid[g], replica_key(config, cell));
        const auto run = with_label(fmt::format("N={} replica={}", n_grid[g], r),
                                    [&] { return simulate_coupled(model, c, flow, noise); });
        terminal_gap[cell] = run.mean_square_gap.back();
        std::copy_n(run.particle.final_state().begin(), d, first_particle.begin() + static_cast<std::ptrdiff_t>(cell * d));
        std::copy_n(run.nonlinear.final_state().begin(), d,
                    first_nonlinear.begin() + static_cast<std::ptrdiff_t>(cell * d));
    });

    RateFit fit;
    fit.n_grid.assign(n_grid.begin(), n_grid.end());
    fit.replicas = replicas;
    fit.reference_m = flow.m;
    fit.t_final = config.t_final;
    const auto& terminal = flow.snapshot(config.steps());

    for (std::size_t g = 0; g < n_grid.size(); ++g) {
        const std::span<const double> gaps(terminal_gap.data() + g * replicas, replicas);
        const auto est = estimate_mean(gaps);
        fit.mean_sq_gaps.push_back(est.mean);
        fit.std_errors.push_back(est.std_error);

        const std::vector<double> xs(first_particle.begin() + static_cast<std::ptrdiff_t>(g * replicas * d),
                                     first_particle.begin() + static_cast<std::ptrdiff_t>((g + 1) * replicas * d));
        const std::vector<double> ys(first_nonlinear.begin() + static_cast<std::ptrdiff_t>(g * replicas * d),
                                     first_nonlinear.begin() + static_cast<std::ptrdiff_t>((g + 1) * replicas * d));
        std::vector<double> pair(replicas);
        for (std::size_t r = 0; r < replicas; ++r)
            pair[r] = squared_distance(std::span<const double>(xs.data() + r * d, d),
                                       std::span<const double>(ys.data() + r * d, d));
        const auto pair_est = estimate_mean(pair);
        fit.first_particle_gaps.push_back(pair_est.mean);
        fit.first_particle_std_errors.push_back(pair_est.std_error);

        const auto particle_cloud = cloud(d, xs);
        const double w2c = sample_wasserstein(2, particle_cloud, cloud(d, ys));
        fit.w2sq_coupled.push_back(w2c * w2c);

        const auto idx = keyed_subsample(terminal.size(), replicas, noise, static_cast<std::uint32_t>(g));
        const auto ref = terminal.subset(idx);
        double w2i = kNaN;
        if (ref.size() == particle_cloud.size()) w2i = sample_wasserstein(2, particle_cloud, ref);
        else if (d == 1) w2i = wasserstein_1d(2, particle_cloud, ref).cost;
        fit.w2sq_independent.push_back(w2i * w2i);
    }

    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t g = 0; g < n_grid.size(); ++g) {
        if (fit.mean_sq_gaps[g] > 0.0) {
            lx.push_back(std::log(static_cast<double>(n_grid[g])));
            ly.push_back(std::log(fit.mean_sq_gaps[g]));
        }
    }
    if (lx.empty()) {
        fit.degenerate = true;
        fit.slope = fit.intercept = fit.slope_se = kNaN;
        fit.r_squared = kNaN;
    } else if (lx.size() == 1) {
        fit.slope = fit.intercept = fit.slope_se = fit.r_squared = kNaN;
    } else {
        const auto ls = least_squares(lx, ly);
        fit.slope = ls.slope;
        fit.intercept = ls.intercept;
        fit.r_squared = ls.r_squared;
        fit.slope_se = ls.slope_se;
    }
    return fit;
}

// ---------------------------------------------------------------------------
// Deviation tails

DeviationTable tabulate_deviations(std::size_t n_particles, std::span<const double> r_grid,
                                   std::span<const double> thresholds, std::span<const double> deviations) {
    if (r_grid.size() != thresholds.size()) throw SpecificationError("tabulate_deviations: grid sizes differ");
    if (deviations.empty()) throw ValidationError("tabulate_deviations: no replicas");
    DeviationTable t;
    t.n_particles = n_particles;
    t.n_replicas = deviations.size();
    t.r_grid.assign(r_grid.begin(), r_grid.end());
    t.thresholds.assign(thresholds.begin(), thresholds.end());
    const double n_rep = static_cast<double>(deviations.size());
    for (double threshold : thresholds) {
        const auto count = static_cast<std::size_t>(
            std::count_if(deviations.begin(), deviations.end(), [threshold](double v) { return v > threshold; }));
        t.exceedances.push_back(count);
        t.empirical_probs.push_back(static_cast<double>(count) / n_rep);
        t.confidence.push_back(wilson_interval(count, deviations.size()));
    }
    t.monotonicity_flags = monotone_violations(t.empirical_probs);

    const double floor = 10.0 / n_rep;
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t k = 0; k < r_grid.size(); ++k) {
        const double p = t.empirical_probs[k];
        if (p >= floor && p <= 0.5 && p > 0.0) {
            t.fit_window.push_back(k);
            x.push_back(static_cast<double>(n_particles) * r_grid[k] * r_grid[k]);
            y.push_back(-std::log(p));
        }
    }
    t.fitted_c = kNaN;
    t.fitted_c_ci = {kNaN, kNaN};
    if (x.size() >= 2 && std::any_of(x.begin(), x.end(), [&](double v) { return v != x.front(); })) {
        t.tail_fit = least_squares(x, y);
        t.fitted_c = t.tail_fit->slope;
        t.fitted_c_ci = t.tail_fit->slope_interval();
    }
    return t;
}

ObservableDeviation observable_deviation_experiment(const ModelSpec& model, const Observable& observable,
                                                    std::size_t n_particles, std::span<const double> r_grid,
                                                    std::size_t replicas, const SimConfig& config,
                                                    const ReferenceSettings& reference) {
    check_replicas(replicas);
    config.validate();
    return observable_deviation_experiment(model, observable, n_particles, r_grid, replicas, config,
                                           make_flow(model, config, n_particles, reference));
}

ObservableDeviation observable_deviation_experiment(const ModelSpec& model, const Observable& observable,
                                                    std::size_t n_particles, std::span<const double> r_grid,
                                                    std::size_t replicas, const SimConfig& config,
                                                    const ReferenceFlow& flow) {
    check_replicas(replicas);
    config.validate();
    if (n_particles == 0) throw ValidationError("observable deviation: N must be positive");
    if (observable.dim != model.dim()) throw SpecificationError("observable deviation: observable dimension mismatch");
    const Observable phi = observable.rescaled_to_unit();
    const std::size_t d = model.dim();
    const NoiseGrid noise(config.seed, config.dt);

    const auto& terminal = flow.snapshot(config.steps());
    double reference_value = 0.0;
    for (std::size_t j = 0; j < terminal.size(); ++j) reference_value += terminal.weight(j) * phi.eval(terminal.point(j));

    std::vector<double> errors(replicas);
    parallel_indices(replicas, config.workers, [&](std::size_t r) {
        const SimConfig c = replica_config(config, n_particles, replica_key(config, r));
        const auto run = with_label(fmt::format("N={} replica={}", n_particles, r),
                                    [&] { return simulate_particle_system(model, c, noise); });
        const auto& state = run.final_state();
        double avg = 0.0;
        for (std::size_t i = 0; i < n_particles; ++i) avg += phi.eval(std::span<const double>(state.data() + i * d, d));
        errors[r] = avg / static_cast<double>(n_particles) - reference_value;
    });

    ObservableDeviation out;
    out.observable = phi.name;
    out.reference_value = reference_value;
    std::vector<double> squared(replicas);
    std::vector<double> absolute(replicas);
    for (std::size_t r = 0; r < replicas; ++r) {
        squared[r] = errors[r] * errors[r];
        absolute[r] = std::abs(errors[r]);
    }
    out.mean_square_error = estimate_mean(squared);
    out.c_fit = static_cast<double>(n_particles) * out.mean_square_error.mean;
    const double shift = std::sqrt(out.c_fit / static_cast<double>(n_particles));
    std::vector<double> thresholds;
    for (double r : r_grid) thresholds.push_back(shift + r);
    out.table = tabulate_deviations(n_particles, r_grid, thresholds, absolute);
    out.errors = std::move(errors);
    return out;
}

MeasureDeviation empirical_measure_deviation(const ModelSpec& model, std::size_t n_particles,
                                             std::span<const double> r_grid, std::size_t replicas,
                                             const SimConfig& config, bool sup_over_time,
                                             const ReferenceSettings& reference) {
    check_replicas(replicas);
    config.validate();
    return empirical_measure_deviation(model, n_particles, r_grid, replicas, config, sup_over_time,
                                       make_flow(model, config, n_particles, reference));
}

MeasureDeviation empirical_measure_deviation(const ModelSpec& model, std::size_t n_particles,
                                             std::span<const double> r_grid, std::size_t replicas,
                                             const SimConfig& config, bool sup_over_time, const ReferenceFlow& flow) {
    check_replicas(replicas);
    config.validate();
    if (n_particles == 0) throw ValidationError("measure deviation: N must be positive");
    if (flow.m < n_particles) throw ValidationError("measure deviation: reference flow smaller than N");
    if (flow.dt != config.dt || flow.steps < config.steps())
        throw ValidationError("measure deviation: reference flow does not cover the run");
    const std::size_t d = model.dim();
    const std::size_t steps = config.steps();
    const NoiseGrid noise(config.seed, config.dt);

    std::vector<double> statistic(replicas);
    parallel_indices(replicas, config.workers, [&](std::size_t r) {
        const std::uint32_t key = replica_key(config, r);
        const SimConfig c = replica_config(config, n_particles, key);
        const auto idx = keyed_subsample(flow.m, n_particles, noise, key);
        double worst = 0.0;
        const auto observer = [&](std::size_t step, std::span<const double> states) {
            if (!sup_over_time && step != steps) return;
            const auto empirical = EmpiricalMeasure::uniform(d, states);
            const auto ref = flow.snapshot(step).subset(idx);
            worst = std::max(worst, sample_wasserstein(1, empirical, ref));
        };
        with_label(fmt::format("N={} replica={}", n_particles, r),
                   [&] { return simulate_particle_system(model, c, noise, observer); });
        statistic[r] = worst;
    });

    MeasureDeviation out;
    out.sup_over_time = sup_over_time;
    out.w1 = estimate_mean(statistic);
    out.table = tabulate_deviations(n_particles, r_grid, r_grid, statistic);
    out.statistics = std::move(statistic);
    return out;
}

// ---------------------------------------------------------------------------
// Long-time behaviour

TargetSampler law_target(InitialLaw law) {
    return [law = std::move(law)](std::size_t n, const NoiseGrid& noise, std::uint32_t replica) {
        const std::size_t d = law.dim();
        std::vector<double> pts(n * d);
        for (std::size_t i = 0; i < n; ++i)
            law.sample(noise, Stream::target, replica, static_cast<std::uint32_t>(i),
                       std::span<double>(pts.data() + i * d, d));
        return EmpiricalMeasure::uniform(d, std::move(pts));
    };
}

TargetSampler burn_in_target(const ModelSpec& model, std::size_t particles, double burn_in_time, SimConfig base) {
    base.n_particles = particles;
    base.t_final = burn_in_time;
    base.snapshot_stride = std::max<std::size_t>(1, base.steps());
    base.validate();
    return [model, base](std::size_t n, const NoiseGrid& noise, std::uint32_t replica) {
        if (n > base.n_particles) throw ValidationError("burn-in target: requested sample larger than the ensemble");
        // A dedicated replica namespace keeps burn-in runs apart from measured runs.
        SimConfig c = base;
        c.replica_id = 0x8000'0000u | replica;
        const auto run = simulate_particle_system(model, c, NoiseGrid(noise.seed() ^ 0x7461'7267'6574ULL, c.dt));
        const auto idx = keyed_subsample(base.n_particles, n, noise, c.replica_id);
        return run.measure(run.states.size() - 1).subset(idx);
    };
}

EquilibriumCurve equilibrium_convergence(const ModelSpec& model, std::size_t n_particles, const SimConfig& config,
                                         const TargetSampler& target, const EquilibriumSettings& settings) {
    if (!model.traits.granular || !model.traits.convex)
        throw ValidationError("equilibrium convergence needs a granular model with convex V and W");
    config.validate();
    check_replicas(settings.replicas);
    if (n_particles == 0) throw ValidationError("equilibrium convergence: N must be positive");
    if (settings.record_every == 0) throw ValidationError("equilibrium convergence: record_every must be positive");
    const std::size_t d = model.dim();
    const std::size_t steps = config.steps();
    const NoiseGrid noise(config.seed, config.dt);

    std::vector<std::size_t> record_steps;
    for (std::size_t k = 0; k <= steps; k += settings.record_every) record_steps.push_back(k);

    const std::size_t reps = settings.replicas;
    std::vector<double> w2(reps * record_steps.size());
    std::vector<double> floor_samples(reps);
    parallel_indices(reps, config.workers, [&](std::size_t r) {
        const std::uint32_t key = replica_key(config, r);
        const auto sample = target(n_particles, noise, 2 * key);
        floor_samples[r] = sample_wasserstein(2, sample, target(n_particles, noise, 2 * key + 1));
        const SimConfig c = replica_config(config, n_particles, key);
        std::size_t next = 0;
        const auto observer = [&](std::size_t step, std::span<const double> states) {
            if (next < record_steps.size() && record_steps[next] == step) {
                w2[r * record_steps.size() + next] = sample_wasserstein(2, EmpiricalMeasure::uniform(d, states), sample);
                ++next;
            }
        };
        with_label(fmt::format("N={} replica={}", n_particles, r),
                   [&] { return simulate_particle_system(model, c, noise, observer); });
    });

    EquilibriumCurve curve;
    curve.noise_floor = estimate_mean(floor_samples).mean;
    std::vector<double> column(reps);
    for (std::size_t s = 0; s < record_steps.size(); ++s) {
        for (std::size_t r = 0; r < reps; ++r) column[r] = w2[r * record_steps.size() + s];
        const auto est = estimate_mean(column);
        curve.times.push_back(static_cast<double>(record_steps[s]) * config.dt);
        curve.w2_to_target.push_back(est.mean);
        curve.w2_std_errors.push_back(est.std_error);
    }

    // Leading run of points above twice the floor.
    std::vector<double> ft;
    std::vector<double> fl;
    for (std::size_t s = 0; s < curve.times.size(); ++s) {
        if (!(curve.w2_to_target[s] > 2.0 * curve.noise_floor)) break;
        ft.push_back(curve.times[s]);
        fl.push_back(std::log(curve.w2_to_target[s]));
    }
    curve.fit_points = ft.size();
    curve.fitted_decay_rate = kNaN;
    if (ft.size() >= 3) {
        curve.fit = least_squares(ft, fl);
        curve.fitted_decay_rate = -curve.fit->slope;
    }

    if (!settings.gap_times.empty()) {
        check_replicas(settings.gap_replicas);
        std::vector<std::size_t> gap_steps;
        for (double t : settings.gap_times) {
            const double ratio = t / config.dt;
            const auto k = static_cast<std::size_t>(std::llround(ratio));
            if (t < 0.0 || k > steps || std::abs(ratio - static_cast<double>(k)) > 1e-9 * std::max(1.0, ratio))
                throw ValidationError(fmt::format("equilibrium convergence: gap time {} is not a step time in [0, {}]",
                                                  t, config.t_final));
            gap_steps.push_back(k);
        }
        const auto flow = make_flow(model, config, n_particles, settings.reference);
        const std::size_t gr = settings.gap_replicas;
        std::vector<double> gaps(gr * gap_steps.size());
        parallel_indices(gr, config.workers, [&](std::size_t r) {
            const SimConfig c = replica_config(config, n_particles, replica_key(config, reps + r));
            const auto run = with_label(fmt::format("N={} gap replica={}", n_particles, r),
                                        [&] { return simulate_coupled(model, c, flow, noise); });
            for (std::size_t s = 0; s < gap_steps.size(); ++s)
                gaps[r * gap_steps.size() + s] = run.mean_square_gap[gap_steps[s]];
        });
        std::vector<double> col(gr);
        for (std::size_t s = 0; s < gap_steps.size(); ++s) {
            for (std::size_t r = 0; r < gr; ++r) col[r] = gaps[r * gap_steps.size() + s];
            const auto est = estimate_mean(col);
            curve.gap_times.push_back(settings.gap_times[s]);
            curve.gap_means.push_back(est.mean);
            curve.gap_std_errors.push_back(est.std_error);
        }
        const bool distinct = std::any_of(curve.gap_times.begin(), curve.gap_times.end(),
                                          [&](double t) { return t != curve.gap_times.front(); });
        if (curve.gap_times.size() >= 2 && distinct) curve.gap_trend = least_squares(curve.gap_times, curve.gap_means);
    }
    return curve;
}

} // namespace chaoslab
