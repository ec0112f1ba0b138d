#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "chaoslab/errors.hpp"
#include "chaoslab/model.hpp"
#include "chaoslab/sde.hpp"

namespace chaoslab {

struct ModelBlock {
    std::string family = "granular"; // granular | vlasov_fokker_planck | linear | zero
    std::size_t dim = 1;             // position dimension for vlasov_fokker_planck
    std::string confinement = "quadratic"; // none | quadratic | cubic
    double confinement_strength = 1.0;
    std::string interaction = "quadratic"; // none | quadratic | cubic
    double interaction_strength = 1.0;
    double rate = 1.0;                 // linear
    double noise_scale = 1.0;          // zero
    double friction = 1.0;             // vlasov_fokker_planck, A(v) = friction v
    double position_confinement = 1.0; // vlasov_fokker_planck, B(x) = k x
    std::string initial = "gaussian";  // point | gaussian | uniform
    double initial_mean = 0.0;
    double initial_variance = 1.0;
    double initial_low = -1.0;
    double initial_high = 1.0;

    bool operator==(const ModelBlock&) const = default;
};

struct SimBlock {
    double dt = 0.01;
    double t_final = 1.0;
    std::size_t n_particles = 64;
    std::vector<std::size_t> n_grid; // chaos_rate; defaults to N/8, N/4, N/2, N
    std::uint64_t seed = 1;
    std::size_t replicas = 100;
    bool taming = false;
    bool allow_large_dt = false;

    bool operator==(const SimBlock&) const = default;
};

struct ReferenceBlock {
    std::size_t m = 0; // 0 resolves to 16 x the largest N
    std::size_t picard_iters = 1;

    bool operator==(const ReferenceBlock&) const = default;
};

struct ExperimentBlock {
    std::string kind = "chaos_rate"; // chaos_rate | observable_deviation | measure_deviation | equilibrium | trajectory
    std::vector<double> r_grid;      // defaults to 0, 0.05, ..., 0.5
    std::string observable = "coordinate"; // coordinate | clipped
    std::size_t observable_index = 0;
    double observable_bound = 10.0;
    bool sup_over_time = false;
    std::string target = "auto";     // auto | closed_form | burn_in
    double burn_in_time = 10.0;
    std::size_t burn_in_particles = 0; // 0 resolves to 4N
    std::size_t record_every = 10;
    std::vector<double> gap_times;
    std::size_t gap_replicas = 16;

    bool operator==(const ExperimentBlock&) const = default;
};

struct OutputBlock {
    std::string directory = "out";
    std::size_t snapshot_stride = 1;
    bool plot = true;

    bool operator==(const OutputBlock&) const = default;
};

struct RunConfig {
    ModelBlock model;
    SimBlock sim;
    ReferenceBlock reference;
    ExperimentBlock experiment;
    OutputBlock output;

    bool operator==(const RunConfig&) const = default;
};

/// Parse or validation failure. `problems` holds every message; what() joins them.
class ConfigError : public ValidationError {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// Sectioned key = value text. Throws ConfigError with line/column-tagged
/// messages on syntax errors and with every semantic violation otherwise.
/// Defaults are resolved and stored explicitly.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Canonical text listing every key; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

/// Fills defaults that depend on other keys (n_grid, r_grid, m, burn-in size, target).
void resolve_defaults(RunConfig& config);
/// Every semantic violation, empty if the config is usable.
std::vector<std::string> validation_problems(const RunConfig& config);

/// The canonical [model] section, the input of the model fingerprint.
std::string serialize_model(const ModelBlock& model);

ModelSpec build_model(const ModelBlock& model);
/// Simulation settings for an N-particle run.
SimConfig build_sim_config(const RunConfig& config, std::size_t n_particles, std::size_t workers = 1);

/// Closest known key within edit distance 2, or empty.
std::string suggest_key(std::string_view key, const std::vector<std::string>& known);

} // namespace chaoslab
