#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chaoslab/measure.hpp"
#include "chaoslab/model.hpp"
#include "chaoslab/noise.hpp"
#include "chaoslab/sde.hpp"
#include "chaoslab/stats.hpp"

namespace chaoslab {

/// Size of the reference ensemble. m = 0 means 16 x the largest N of the experiment.
struct ReferenceSettings {
    std::size_t m = 0;
    std::size_t picard_iters = 1;

    std::size_t resolve_m(std::size_t largest_n) const { return m == 0 ? 16 * largest_n : m; }
};

/// `count` distinct indices of [0, population), a keyed partial Fisher-Yates
/// shuffle on the subsample stream. Falls back to all indices when count >= population.
std::vector<std::size_t> keyed_subsample(std::size_t population, std::size_t count, const NoiseGrid& noise,
                                         std::uint32_t replica);

// ---------------------------------------------------------------------------
// Chaos rate

struct RateFit {
    std::vector<std::size_t> n_grid;
    std::vector<double> mean_sq_gaps; // terminal (1/N) sum_i |X^{i,N} - Xbar^i|^2, replica mean
    std::vector<double> std_errors;
    /// Particle 1 only: replica mean of |X^{1,N}_t - Xbar^1_t|^2 and its standard error.
    std::vector<double> first_particle_gaps;
    std::vector<double> first_particle_std_errors;
    /// Sample W2^2 between the replicated X^{1,N}_t draws and the coupled Xbar^1_t draws
    /// (samples of f_t through the reference flow). Never exceeds first_particle_gaps.
    std::vector<double> w2sq_coupled;
    /// Sample W2^2 between the X^{1,N}_t draws and an independent subsample of the
    /// reference snapshot. Biased upwards by the finite sample size.
    std::vector<double> w2sq_independent;

    double slope = 0.0; // least squares of log gap on log N
    double intercept = 0.0;
    double r_squared = 0.0;
    double slope_se = 0.0;
    bool degenerate = false; // every gap is exactly zero; no fit

    std::size_t replicas = 0;
    std::size_t reference_m = 0;
    double t_final = 0.0;
};

RateFit chaos_rate_experiment(const ModelSpec& model, std::span<const std::size_t> n_grid, const SimConfig& config,
                              std::size_t replicas, const ReferenceSettings& reference = {});
RateFit chaos_rate_experiment(const ModelSpec& model, std::span<const std::size_t> n_grid, const SimConfig& config,
                              std::size_t replicas, const ReferenceFlow& flow);

// ---------------------------------------------------------------------------
// Deviation tails

struct DeviationTable {
    std::size_t n_particles = 0;
    std::size_t n_replicas = 0;
    std::vector<double> r_grid;
    std::vector<double> thresholds; // event is {deviation > threshold}
    std::vector<std::size_t> exceedances;
    std::vector<double> empirical_probs;
    std::vector<Interval> confidence; // Wilson 95%
    std::vector<std::size_t> monotonicity_flags; // r indices where p rose (Monte Carlo noise)

    /// -log p against N r^2 over the window p in [10/replicas, 0.5].
    std::vector<std::size_t> fit_window;
    std::optional<LinearFit> tail_fit;
    double fitted_c = 0.0; // NaN when unavailable
    Interval fitted_c_ci;  // NaN when fewer than three points

    bool fit_available() const { return tail_fit.has_value(); }
};

/// Fills thresholds, exceedances, probabilities, intervals, flags and the tail fit
/// from per-replica deviations.
DeviationTable tabulate_deviations(std::size_t n_particles, std::span<const double> r_grid,
                                   std::span<const double> thresholds, std::span<const double> deviations);

struct ObservableDeviation {
    DeviationTable table;
    std::string observable;
    double reference_value = 0.0;      // int phi df_t over the reference snapshot
    MeanEstimate mean_square_error;    // E |(1/N) sum phi(X^i) - int phi df_t|^2
    double c_fit = 0.0;                // N * mean square error
    std::vector<double> errors;        // per replica signed error
};

/// Event: |(1/N) sum phi(X^{i,N}_t) - int phi df_t| > sqrt(C_fit / N) + r.
ObservableDeviation observable_deviation_experiment(const ModelSpec& model, const Observable& observable,
                                                    std::size_t n_particles, std::span<const double> r_grid,
                                                    std::size_t replicas, const SimConfig& config,
                                                    const ReferenceSettings& reference = {});
ObservableDeviation observable_deviation_experiment(const ModelSpec& model, const Observable& observable,
                                                    std::size_t n_particles, std::span<const double> r_grid,
                                                    std::size_t replicas, const SimConfig& config,
                                                    const ReferenceFlow& flow);

struct MeasureDeviation {
    DeviationTable table;
    bool sup_over_time = false;
    MeanEstimate w1; // per-replica statistic (terminal or running max)
    std::vector<double> statistics;
};

/// Event: W1(mu^N_t, f_t) > r, with f_t represented by an N-point subsample of the
/// reference snapshot. With sup_over_time the statistic is the maximum over
/// all step times.
MeasureDeviation empirical_measure_deviation(const ModelSpec& model, std::size_t n_particles,
                                             std::span<const double> r_grid, std::size_t replicas,
                                             const SimConfig& config, bool sup_over_time,
                                             const ReferenceSettings& reference = {});
MeasureDeviation empirical_measure_deviation(const ModelSpec& model, std::size_t n_particles,
                                             std::span<const double> r_grid, std::size_t replicas,
                                             const SimConfig& config, bool sup_over_time, const ReferenceFlow& flow);

// ---------------------------------------------------------------------------
// Long-time behaviour

/// Draws an n-point sample of the steady state; `replica` selects independent draws.
using TargetSampler = std::function<EmpiricalMeasure(std::size_t n, const NoiseGrid& noise, std::uint32_t replica)>;

/// Closed-form target, e.g. N(0, 1) for the Ornstein-Uhlenbeck model.
TargetSampler law_target(InitialLaw law);

/// Runs a particles-sized system for burn_in_time under a seed derived from the
/// noise seed, so it never shares draws with measured runs, and subsamples it. Requested sizes must not exceed `particles`.
TargetSampler burn_in_target(const ModelSpec& model, std::size_t particles, double burn_in_time, SimConfig base);

struct EquilibriumSettings {
    std::size_t replicas = 16;
    std::size_t record_every = 10; // steps between W2 measurements
    std::vector<double> gap_times; // coupling-gap probe times, each <= t_final
    std::size_t gap_replicas = 16;
    ReferenceSettings reference;
};

struct EquilibriumCurve {
    std::vector<double> times;
    std::vector<double> w2_to_target; // replica mean of W2(mu^N_t, target sample)
    std::vector<double> w2_std_errors;
    double noise_floor = 0.0; // replica mean of W2 between two independent target samples
    std::size_t fit_points = 0;
    double fitted_decay_rate = 0.0; // NaN when fewer than three points above 2 x floor
    std::optional<LinearFit> fit;   // log W2 against t

    std::vector<double> gap_times;
    std::vector<double> gap_means;
    std::vector<double> gap_std_errors;
    std::optional<LinearFit> gap_trend; // gap against t
};

/// Requires a granular model with convex V and W.
EquilibriumCurve equilibrium_convergence(const ModelSpec& model, std::size_t n_particles, const SimConfig& config,
                                         const TargetSampler& target, const EquilibriumSettings& settings = {});

} // namespace chaoslab
