#include "chaoslab/sde.hpp"

#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "chaoslab/errors.hpp"
#include "chaoslab/linalg.hpp"
#include "chaoslab/parallel.hpp"
#include "chaoslab/transport.hpp"

namespace chaoslab {
namespace {

// Above this size the iterate distance for d > 1 uses the index coupling
// (an upper bound on W2) instead of the assignment solver.
constexpr std::size_t kExactIterateDistanceLimit = 1024;

std::vector<std::size_t> recorded_steps(std::size_t steps, std::size_t stride) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k <= steps; k += stride) out.push_back(k);
    if (out.back() != steps) out.push_back(steps);
    return out;
}

TrajectoryEnsemble empty_ensemble(std::size_t dim, std::size_t n, const SimConfig& config) {
    TrajectoryEnsemble e;
    e.dim = dim;
    e.n_particles = n;
    e.dt = config.dt;
    e.recorded_steps = recorded_steps(config.steps(), config.snapshot_stride);
    e.states.reserve(e.recorded_steps.size());
    return e;
}

void record_if_due(TrajectoryEnsemble& e, std::size_t step, const std::vector<double>& state) {
    const std::size_t next = e.states.size();
    if (next < e.recorded_steps.size() && e.recorded_steps[next] == step) e.states.push_back(state);
}

void sample_initial(const ModelSpec& model, const NoiseGrid& noise, Stream stream, std::uint32_t replica,
                    std::size_t n, std::vector<double>& states) {
    const std::size_t d = model.dim();
    states.resize(n * d);
    for (std::size_t i = 0; i < n; ++i)
        model.initial_law.sample(noise, stream, replica, static_cast<std::uint32_t>(i),
                                 std::span<double>(states.data() + i * d, d));
}

// Advances particles [begin, end) of `current` into `next` using `field`.
void advance_range(const ModelSpec& model, const FieldEvaluator& field, const NoiseGrid& noise, Stream stream,
                   std::uint32_t replica, std::size_t step, double dt, double taming,
                   const std::vector<double>& current, std::vector<double>& next, std::size_t begin,
                   std::size_t end) {
    const std::size_t d = model.dim();
    Scratch drift(d);
    Scratch dw(d);
    for (std::size_t i = begin; i < end; ++i) {
        const std::span<const double> x(current.data() + i * d, d);
        field.drift(x, drift.span());
        noise.increments(stream, replica, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(step), dw.span());
        try {
            euler_step(x, drift.span(), model.diffusion, dw.span(), dt, taming,
                       std::span<double>(next.data() + i * d, d));
        } catch (const DivergenceError&) {
            throw DivergenceError(step, i);
        }
    }
}

double iterate_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b, std::string& method) {
    if (a.dim() == 1) {
        method = "exact W2 (quantile coupling)";
        return wasserstein_1d(2, a, b).cost;
    }
    if (a.size() <= kExactIterateDistanceLimit) {
        method = "exact W2 (assignment)";
        return wasserstein_assignment(2, a, b).cost;
    }
    // Same noise keys pair path i with path i; that coupling bounds W2 from above.
    method = "index-coupling upper bound on W2";
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += squared_distance(a.point(i), b.point(i));
    return std::sqrt(s / static_cast<double>(a.size()));
}

} // namespace

std::size_t SimConfig::steps() const {
    const double ratio = t_final / dt;
    return static_cast<std::size_t>(std::llround(ratio));
}

void SimConfig::validate() const {
    std::vector<std::string> problems;
    if (!(dt > 0.0) || !std::isfinite(dt)) problems.push_back("dt must be positive");
    if (!(t_final > 0.0) || !std::isfinite(t_final)) problems.push_back("t_final must be positive");
    if (problems.empty()) {
        const double ratio = t_final / dt;
        const double rounded = std::round(ratio);
        if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
            problems.push_back(fmt::format("t_final / dt = {} / {} is not a positive integer step count", t_final, dt));
        if (dt > 0.1 && !allow_large_dt)
            problems.push_back(fmt::format("dt = {} exceeds 0.1 (set allow_large_dt to override)", dt));
    }
    if (n_particles == 0) problems.push_back("n_particles must be at least 1");
    if (snapshot_stride == 0) problems.push_back("snapshot_stride must be at least 1");
    if (!problems.empty()) throw ValidationError(fmt::format("invalid simulation config: {}", fmt::join(problems, "; ")));
}

void euler_step(std::span<const double> x, std::span<const double> drift, const DiffusionSpec& diffusion,
                std::span<const double> dw, double dt, double taming_exponent, std::span<double> out) {
    const std::size_t d = x.size();
    if (drift.size() != d || dw.size() != d || out.size() != d || diffusion.dim() != d)
        throw SpecificationError("euler_step: dimension mismatch");
    Scratch noise(d);
    diffusion.sigma().apply(dw, noise.span());
    double scale = 1.0;
    if (taming_exponent > 0.0) {
        const double h = taming_exponent == 1.0 ? dt : std::pow(dt, taming_exponent);
        scale = 1.0 / (1.0 + h * norm(drift));
    }
    bool finite = true;
    for (std::size_t c = 0; c < d; ++c) {
        const double b = taming_exponent > 0.0 ? drift[c] * scale : drift[c];
        out[c] = x[c] + noise[c] - b * dt;
        finite = finite && std::isfinite(out[c]);
    }
    if (!finite) throw DivergenceError(DivergenceError::unknown, DivergenceError::unknown);
}

double effective_taming(const DriftKernel& kernel, const SimConfig& config) {
    return config.taming ? kernel.taming_exponent : 0.0;
}

TrajectoryEnsemble simulate_particle_system(const ModelSpec& model, const SimConfig& config, const NoiseGrid& noise,
                                            const StepObserver& observer) {
    config.validate();
    const std::size_t n = config.n_particles;
    const std::size_t d = model.dim();
    const std::size_t steps = config.steps();
    const double taming = effective_taming(model.drift, config);

    TrajectoryEnsemble out = empty_ensemble(d, n, config);
    std::vector<double> current;
    sample_initial(model, noise, Stream::initial, config.replica_id, n, current);
    std::vector<double> next(current.size());
    record_if_due(out, 0, current);
    if (observer) observer(0, current);

    for (std::size_t k = 0; k < steps; ++k) {
        const FieldEvaluator field = model.drift.law_independent()
                                         ? FieldEvaluator(model.drift)
                                         : FieldEvaluator(model.drift, EmpiricalMeasure::uniform(d, current));
        parallel_chunks(n, config.workers, [&](std::size_t begin, std::size_t end) {
            advance_range(model, field, noise, Stream::brownian, config.replica_id, k, config.dt, taming, current,
                          next, begin, end);
        });
        current.swap(next);
        record_if_due(out, k + 1, current);
        if (observer) observer(k + 1, current);
    }
    return out;
}

void particle_system_step(const ModelSpec& model, std::span<const double> states, std::span<const double> increments,
                          double dt, double taming_exponent, std::span<double> out) {
    const std::size_t d = model.dim();
    if (states.empty() || states.size() % d != 0 || increments.size() != states.size() || out.size() != states.size())
        throw SpecificationError("particle_system_step: size mismatch");
    const std::size_t n = states.size() / d;
    const FieldEvaluator field = model.drift.law_independent() ? FieldEvaluator(model.drift)
                                                               : FieldEvaluator(model.drift, EmpiricalMeasure::uniform(d, states));
    Scratch drift(d);
    for (std::size_t i = 0; i < n; ++i) {
        const std::span<const double> x(states.data() + i * d, d);
        field.drift(x, drift.span());
        try {
            euler_step(x, drift.span(), model.diffusion, increments.subspan(i * d, d), dt, taming_exponent,
                       out.subspan(i * d, d));
        } catch (const DivergenceError&) {
            throw DivergenceError(DivergenceError::unknown, i);
        }
    }
}

ReferenceFlow build_reference_flow(const ModelSpec& model, std::size_t m, const SimConfig& config,
                                   std::size_t picard_iters, const NoiseGrid& noise) {
    SimConfig cfg = config;
    cfg.n_particles = m;
    cfg.validate();
    if (m == 0) throw ValidationError("reference flow: M must be at least 1");
    if (picard_iters == 0) throw ValidationError("reference flow: picard_iters must be at least 1");

    const std::size_t d = model.dim();
    const std::size_t steps = cfg.steps();
    const double taming = effective_taming(model.drift, cfg);
    const bool free = model.drift.law_independent();

    std::vector<double> initial;
    sample_initial(model, noise, Stream::reference_initial, cfg.replica_id, m, initial);

    ReferenceFlow flow;
    flow.dim = d;
    flow.m = m;
    flow.steps = steps;
    flow.dt = cfg.dt;
    flow.picard_iterations = picard_iters;

    auto make_field = [&](const EmpiricalMeasure& snapshot) {
        return free ? FieldEvaluator(model.drift) : FieldEvaluator(model.drift, snapshot);
    };

    // Iterate 0: the M-particle system, which builds its own fields as it goes.
    std::vector<EmpiricalMeasure> snapshots;
    std::vector<FieldEvaluator> fields;
    snapshots.reserve(steps + 1);
    fields.reserve(steps + 1);
    {
        std::vector<double> current = initial;
        std::vector<double> next(current.size());
        for (std::size_t k = 0; k <= steps; ++k) {
            snapshots.push_back(EmpiricalMeasure::uniform(d, current));
            fields.push_back(make_field(snapshots.back()));
            if (k == steps) break;
            parallel_chunks(m, cfg.workers, [&](std::size_t begin, std::size_t end) {
                advance_range(model, fields.back(), noise, Stream::reference_brownian, cfg.replica_id, k, cfg.dt,
                              taming, current, next, begin, end);
            });
            current.swap(next);
        }
    }

    for (std::size_t iter = 1; iter <= picard_iters; ++iter) {
        std::vector<EmpiricalMeasure> new_snapshots;
        new_snapshots.reserve(steps + 1);
        std::vector<double> current = initial;
        std::vector<double> next(current.size());
        for (std::size_t k = 0; k <= steps; ++k) {
            new_snapshots.push_back(EmpiricalMeasure::uniform(d, current));
            if (k == steps) break;
            parallel_chunks(m, cfg.workers, [&](std::size_t begin, std::size_t end) {
                advance_range(model, fields[k], noise, Stream::reference_brownian, cfg.replica_id, k, cfg.dt, taming,
                              current, next, begin, end);
            });
            current.swap(next);
        }
        const double dist = iterate_distance(snapshots.back(), new_snapshots.back(), flow.distance_method);
        if (!flow.iterate_distances.empty() && dist > flow.iterate_distances.back()) {
            flow.warnings.push_back(fmt::format("Picard iterate {}: W2 to previous iterate grew from {} to {}", iter,
                                                flow.iterate_distances.back(), dist));
        }
        flow.iterate_distances.push_back(dist);
        snapshots = std::move(new_snapshots);
        fields.clear();
        for (const auto& s : snapshots) fields.push_back(make_field(s));
    }

    flow.snapshots = std::move(snapshots);
    flow.fields = std::move(fields);
    return flow;
}

CoupledEnsemble simulate_coupled(const ModelSpec& model, const SimConfig& config, const ReferenceFlow& flow,
                                 const NoiseGrid& noise, const CoupledObserver& observer) {
    config.validate();
    const std::size_t n = config.n_particles;
    const std::size_t d = model.dim();
    const std::size_t steps = config.steps();
    if (flow.dim != d) throw SpecificationError("simulate_coupled: flow dimension differs from model");
    if (flow.dt != config.dt || flow.steps < steps)
        throw ValidationError(fmt::format("simulate_coupled: reference flow (dt={}, steps={}) does not cover the run "
                                          "(dt={}, steps={})",
                                          flow.dt, flow.steps, config.dt, steps));
    const double taming = effective_taming(model.drift, config);

    CoupledEnsemble out;
    out.particle = empty_ensemble(d, n, config);
    out.nonlinear = empty_ensemble(d, n, config);
    out.mean_square_gap.reserve(steps + 1);

    std::vector<double> x;
    sample_initial(model, noise, Stream::initial, config.replica_id, n, x);
    std::vector<double> xbar = x;
    std::vector<double> x_next(x.size());
    std::vector<double> xbar_next(x.size());

    auto gap = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += squared_distance(std::span<const double>(x.data() + i * d, d),
                                  std::span<const double>(xbar.data() + i * d, d));
        return s / static_cast<double>(n);
    };

    out.mean_square_gap.push_back(gap());
    record_if_due(out.particle, 0, x);
    record_if_due(out.nonlinear, 0, xbar);
    if (observer) observer(0, x, xbar);

    for (std::size_t k = 0; k < steps; ++k) {
        const FieldEvaluator field = model.drift.law_independent()
                                         ? FieldEvaluator(model.drift)
                                         : FieldEvaluator(model.drift, EmpiricalMeasure::uniform(d, x));
        const FieldEvaluator& reference = flow.field(k);
        parallel_chunks(n, config.workers, [&](std::size_t begin, std::size_t end) {
            Scratch drift(d);
            Scratch dw(d);
            for (std::size_t i = begin; i < end; ++i) {
                noise.increments(Stream::brownian, config.replica_id, static_cast<std::uint32_t>(i),
                                 static_cast<std::uint32_t>(k), dw.span());
                const std::span<const double> xi(x.data() + i * d, d);
                const std::span<const double> xbari(xbar.data() + i * d, d);
                try {
                    field.drift(xi, drift.span());
                    euler_step(xi, drift.span(), model.diffusion, dw.span(), config.dt, taming,
                               std::span<double>(x_next.data() + i * d, d));
                    reference.drift(xbari, drift.span());
                    euler_step(xbari, drift.span(), model.diffusion, dw.span(), config.dt, taming,
                               std::span<double>(xbar_next.data() + i * d, d));
                } catch (const DivergenceError&) {
                    throw DivergenceError(k, i);
                }
            }
        });
        x.swap(x_next);
        xbar.swap(xbar_next);
        out.mean_square_gap.push_back(gap());
        record_if_due(out.particle, k + 1, x);
        record_if_due(out.nonlinear, k + 1, xbar);
        if (observer) observer(k + 1, x, xbar);
    }
    return out;
}

} // namespace chaoslab
