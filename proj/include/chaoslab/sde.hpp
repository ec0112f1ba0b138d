#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "chaoslab/field.hpp"
#include "chaoslab/measure.hpp"
#include "chaoslab/model.hpp"
#include "chaoslab/noise.hpp"

namespace chaoslab {

struct SimConfig {
    double dt = 0.01;
    double t_final = 1.0;
    std::size_t n_particles = 1;
    std::uint64_t seed = 1;
    std::uint32_t replica_id = 0;
    bool taming = false;
    bool allow_large_dt = false;      // lifts the dt <= 0.1 guard
    std::size_t snapshot_stride = 1;  // trajectory storage only; gaps are always full rate
    std::size_t workers = 1;          // never affects results

    /// t_final / dt, validated to be an integer.
    std::size_t steps() const;
    /// Throws ValidationError listing every violated constraint.
    void validate() const;
};

/// One explicit Euler-Maruyama step: out = X + sigma dW - drift dt.
/// With taming_exponent > 0 the drift is replaced by
/// drift / (1 + dt^taming_exponent |drift|). Throws DivergenceError (step and
/// particle unknown) if the result is not finite.
void euler_step(std::span<const double> x, std::span<const double> drift, const DiffusionSpec& diffusion,
                std::span<const double> dw, double dt, double taming_exponent, std::span<double> out);

/// Taming exponent actually applied for a model under a config.
double effective_taming(const DriftKernel& kernel, const SimConfig& config);

/// Particle states at recorded steps (every snapshot_stride steps plus the last).
struct TrajectoryEnsemble {
    std::size_t dim = 0;
    std::size_t n_particles = 0;
    double dt = 0.0;
    std::vector<std::size_t> recorded_steps;
    std::vector<std::vector<double>> states; // per record: n_particles x dim, row-major

    std::span<const double> particle(std::size_t record, std::size_t i) const {
        return {states[record].data() + i * dim, dim};
    }
    const std::vector<double>& final_state() const { return states.back(); }
    double time(std::size_t record) const { return static_cast<double>(recorded_steps[record]) * dt; }
    EmpiricalMeasure measure(std::size_t record) const { return EmpiricalMeasure::uniform(dim, states[record]); }
};

/// Called after initialisation (step 0) and after every step with the full state.
using StepObserver = std::function<void(std::size_t step, std::span<const double> states)>;

/// N-particle system: every particle feels the exact empirical mean-field
/// drift (self term included) and all particles advance together from the
/// step-start state. Noise and initial draws come from the brownian/initial
/// streams under config.replica_id.
TrajectoryEnsemble simulate_particle_system(const ModelSpec& model, const SimConfig& config, const NoiseGrid& noise,
                                            const StepObserver& observer = {});

/// One Jacobi step of the N-particle system from `states` (n x d) with the
/// given Brownian increments (n x d). Particle order never changes a result bit.
void particle_system_step(const ModelSpec& model, std::span<const double> states, std::span<const double> increments,
                          double dt, double taming_exponent, std::span<double> out);

/// Approximation of the flow t -> f_t by an M-path ensemble.
struct ReferenceFlow {
    std::size_t dim = 0;
    std::size_t m = 0;
    std::size_t steps = 0;
    double dt = 0.0;
    std::size_t picard_iterations = 0;
    std::vector<EmpiricalMeasure> snapshots; // steps + 1, uniform weights 1/M
    std::vector<FieldEvaluator> fields;      // mean-field drift against each snapshot
    /// W2 at t_final between iterates k-1 and k, k = 1..picard_iterations.
    std::vector<double> iterate_distances;
    std::string distance_method;
    std::vector<std::string> warnings;

    const EmpiricalMeasure& snapshot(std::size_t step) const { return snapshots.at(step); }
    const FieldEvaluator& field(std::size_t step) const { return fields.at(step); }
    double t_final() const { return static_cast<double>(steps) * dt; }
};

/// Iterate 0 is an M-particle system. Iterate k >= 1 re-runs the same M paths
/// (same noise keys) with drift taken from the frozen snapshots of iterate
/// k - 1, piecewise constant over each step. Uses the reference streams, so it
/// never shares keys with a coupled run. config.n_particles is ignored.
ReferenceFlow build_reference_flow(const ModelSpec& model, std::size_t m, const SimConfig& config,
                                   std::size_t picard_iters, const NoiseGrid& noise);

struct CoupledEnsemble {
    TrajectoryEnsemble particle;  // X^{i,N}
    TrajectoryEnsemble nonlinear; // X-bar^i, same initial points and increments
    std::vector<double> mean_square_gap; // (1/N) sum_i |X^{i,N}_t - Xbar^i_t|^2, every step
};

using CoupledObserver =
    std::function<void(std::size_t step, std::span<const double> particle, std::span<const double> nonlinear)>;

/// Synchronous coupling of the particle system with N nonlinear processes
/// driven by `flow`.
CoupledEnsemble simulate_coupled(const ModelSpec& model, const SimConfig& config, const ReferenceFlow& flow,
                                 const NoiseGrid& noise, const CoupledObserver& observer = {});

} // namespace chaoslab
