#include "chaoslab/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "chaoslab/csv.hpp"
#include "chaoslab/errors.hpp"
#include "chaoslab/experiments.hpp"
#include "chaoslab/plot.hpp"

#ifndef CHAOSLAB_VERSION
#define CHAOSLAB_VERSION "0.0.0"
#endif

namespace chaoslab {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string digest_hex(const EVP_MD* md, std::string_view data) {
    unsigned char out[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out, &len, md, nullptr) != 1)
        throw IoError("message digest failed");
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", out[i]);
    return hex;
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string flag(bool b) { return b ? "1" : "0"; }
std::string count(std::size_t n) { return fmt::format("{}", n); }

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// Writes the table and, when plotting is on, its SVG next to it.
class Writer {
public:
    Writer(fs::path dir, bool plot) : dir_(std::move(dir)), plot_(plot) {}

    void table(const std::string& stem, const CsvTable& t, std::optional<PlotKind> kind, const std::string& title) {
        write_csv(dir_ / (stem + ".csv"), t);
        if (plot_ && kind) write_text(dir_ / (stem + ".svg"), emit_plot(plot_from_table(t, *kind, title), *kind));
    }

private:
    fs::path dir_;
    bool plot_;
};

CsvTable deviation_csv(const DeviationTable& t) {
    CsvTable csv;
    csv.header = {"r", "threshold", "n_r2", "exceedances", "prob", "wilson_lo", "wilson_hi", "in_fit_window",
                  "monotone_flag"};
    for (std::size_t k = 0; k < t.r_grid.size(); ++k) {
        const bool in_window =
            t.tail_fit && std::find(t.fit_window.begin(), t.fit_window.end(), k) != t.fit_window.end();
        const bool flagged = std::find(t.monotonicity_flags.begin(), t.monotonicity_flags.end(), k) !=
                             t.monotonicity_flags.end();
        const double r = t.r_grid[k];
        csv.add_row({format_real(r), format_real(t.thresholds[k]),
                     format_real(static_cast<double>(t.n_particles) * r * r), count(t.exceedances[k]),
                     format_real(t.empirical_probs[k]), format_real(t.confidence[k].lo),
                     format_real(t.confidence[k].hi), flag(in_window), flag(flagged)});
    }
    return csv;
}

json deviation_results(const DeviationTable& t) {
    json j;
    j["n_particles"] = t.n_particles;
    j["replicas"] = t.n_replicas;
    j["fit_available"] = t.fit_available();
    j["fit_points"] = t.fit_window.size();
    j["fitted_c"] = number(t.fitted_c);
    j["fitted_c_ci"] = {number(t.fitted_c_ci.lo), number(t.fitted_c_ci.hi)};
    j["r_squared"] = t.tail_fit ? number(t.tail_fit->r_squared) : json(nullptr);
    j["monotonicity_flags"] = t.monotonicity_flags;
    return j;
}

void note_flow(const ReferenceFlow& flow, RunManifest& m) {
    m.results["reference"] = {{"m", flow.m},
                              {"picard_iterations", flow.picard_iterations},
                              {"iterate_distances", flow.iterate_distances},
                              {"distance_method", flow.distance_method}};
    for (const auto& w : flow.warnings) m.notes.push_back(w);
}

ReferenceFlow reference_for(const ModelSpec& model, const RunConfig& c, const SimConfig& sim) {
    SimConfig s = sim;
    s.replica_id = 0;
    try {
        return build_reference_flow(model, c.reference.m, s, c.reference.picard_iters, NoiseGrid(sim.seed, sim.dt));
    } catch (const DivergenceError& e) {
        throw e.with_context("reference flow");
    }
}

void run_chaos_rate(const RunConfig& c, std::size_t threads, Writer& out, RunManifest& m) {
    const auto model = build_model(c.model);
    const std::size_t largest = *std::max_element(c.sim.n_grid.begin(), c.sim.n_grid.end());
    const auto sim = build_sim_config(c, largest, threads);
    const auto flow = reference_for(model, c, sim);
    note_flow(flow, m);
    const auto fit = chaos_rate_experiment(model, c.sim.n_grid, sim, c.sim.replicas, flow);

    CsvTable csv;
    csv.header = {"n", "mean_sq_gap", "std_error", "first_particle_gap", "first_particle_std_error", "w2sq_coupled",
                  "w2sq_independent"};
    for (std::size_t g = 0; g < fit.n_grid.size(); ++g)
        csv.add_row({count(fit.n_grid[g]), format_real(fit.mean_sq_gaps[g]), format_real(fit.std_errors[g]),
                     format_real(fit.first_particle_gaps[g]), format_real(fit.first_particle_std_errors[g]),
                     format_real(fit.w2sq_coupled[g]), format_real(fit.w2sq_independent[g])});
    out.table("rate_fit", csv, PlotKind::loglog, fmt::format("coupling gap at t = {}", c.sim.t_final));

    m.results["rate_fit"] = {{"slope", number(fit.slope)},         {"intercept", number(fit.intercept)},
                             {"r_squared", number(fit.r_squared)}, {"slope_se", number(fit.slope_se)},
                             {"degenerate", fit.degenerate},       {"replicas", fit.replicas}};
    if (fit.degenerate) m.notes.push_back("every coupling gap is exactly zero; no rate fit");
    m.notes.push_back("w2sq_independent is biased upwards by the finite reference subsample");
}

Observable make_observable(const RunConfig& c, std::size_t dim) {
    if (c.experiment.observable == "clipped")
        return Observable::clipped_coordinate(dim, c.experiment.observable_index, c.experiment.observable_bound);
    return Observable::coordinate(dim, c.experiment.observable_index);
}

void run_observable_deviation(const RunConfig& c, std::size_t threads, Writer& out, RunManifest& m) {
    const auto model = build_model(c.model);
    const auto sim = build_sim_config(c, c.sim.n_particles, threads);
    const auto flow = reference_for(model, c, sim);
    note_flow(flow, m);
    const auto dev = observable_deviation_experiment(model, make_observable(c, model.dim()), c.sim.n_particles,
                                                     c.experiment.r_grid, c.sim.replicas, sim, flow);
    out.table("deviation", deviation_csv(dev.table), PlotKind::loglinear,
              fmt::format("deviation of the mean of {}, N = {}", dev.observable, c.sim.n_particles));

    CsvTable errors;
    errors.header = {"replica", "error"};
    for (std::size_t r = 0; r < dev.errors.size(); ++r) errors.add_row({count(r), format_real(dev.errors[r])});
    out.table("observable_errors", errors, std::nullopt, "");

    auto j = deviation_results(dev.table);
    j["observable"] = dev.observable;
    j["reference_value"] = number(dev.reference_value);
    j["mean_square_error"] = number(dev.mean_square_error.mean);
    j["mean_square_error_se"] = number(dev.mean_square_error.std_error);
    j["c_fit"] = number(dev.c_fit);
    m.results["deviation"] = j;
}

void run_measure_deviation(const RunConfig& c, std::size_t threads, Writer& out, RunManifest& m) {
    const auto model = build_model(c.model);
    const auto sim = build_sim_config(c, c.sim.n_particles, threads);
    const auto flow = reference_for(model, c, sim);
    note_flow(flow, m);
    const auto dev = empirical_measure_deviation(model, c.sim.n_particles, c.experiment.r_grid, c.sim.replicas, sim,
                                                 c.experiment.sup_over_time, flow);
    out.table("measure_deviation", deviation_csv(dev.table), PlotKind::loglinear,
              fmt::format("W1 deviation of the empirical measure, N = {}", c.sim.n_particles));
    auto j = deviation_results(dev.table);
    j["sup_over_time"] = dev.sup_over_time;
    j["w1_mean"] = number(dev.w1.mean);
    j["w1_se"] = number(dev.w1.std_error);
    m.results["measure_deviation"] = j;
    if (dev.sup_over_time) m.notes.push_back("supremum over time taken over the step grid only");
}

void run_equilibrium(const RunConfig& c, std::size_t threads, Writer& out, RunManifest& m) {
    const auto model = build_model(c.model);
    const auto sim = build_sim_config(c, c.sim.n_particles, threads);
    const auto& ex = c.experiment;
    TargetSampler target;
    if (ex.target == "closed_form") {
        const double kappa = c.model.interaction == "quadratic" ? c.model.interaction_strength : 0.0;
        const double variance = 1.0 / (c.model.confinement_strength + kappa);
        target = law_target(InitialLaw::isotropic_gaussian(model.dim(), 0.0, variance));
        m.notes.push_back(fmt::format("target: closed-form steady state N(0, {} I)", variance));
    } else {
        SimConfig base = sim;
        base.workers = 1;
        target = burn_in_target(model, ex.burn_in_particles, ex.burn_in_time, base);
        m.notes.push_back(fmt::format("target: {} particles run for t = {}", ex.burn_in_particles, ex.burn_in_time));
    }
    EquilibriumSettings settings;
    settings.replicas = c.sim.replicas;
    settings.record_every = ex.record_every;
    settings.gap_times = ex.gap_times;
    settings.gap_replicas = ex.gap_replicas;
    settings.reference = ReferenceSettings{c.reference.m, c.reference.picard_iters};
    const auto curve = equilibrium_convergence(model, c.sim.n_particles, sim, target, settings);

    CsvTable csv;
    csv.header = {"t", "w2", "std_error", "in_fit"};
    for (std::size_t k = 0; k < curve.times.size(); ++k)
        csv.add_row({format_real(curve.times[k]), format_real(curve.w2_to_target[k]),
                     format_real(curve.w2_std_errors[k]), flag(curve.fit.has_value() && k < curve.fit_points)});
    out.table("equilibrium", csv, PlotKind::loglinear,
              fmt::format("W2 to the steady state, N = {}", c.sim.n_particles));

    json j;
    j["noise_floor"] = number(curve.noise_floor);
    j["fit_points"] = curve.fit_points;
    j["decay_rate"] = number(curve.fitted_decay_rate);
    j["r_squared"] = curve.fit ? number(curve.fit->r_squared) : json(nullptr);
    if (!curve.gap_times.empty()) {
        CsvTable gaps;
        gaps.header = {"t", "gap", "std_error"};
        for (std::size_t k = 0; k < curve.gap_times.size(); ++k)
            gaps.add_row({format_real(curve.gap_times[k]), format_real(curve.gap_means[k]),
                          format_real(curve.gap_std_errors[k])});
        out.table("gap", gaps, PlotKind::timeseries, fmt::format("coupling gap over time, N = {}", c.sim.n_particles));
        if (curve.gap_trend) {
            j["gap_slope"] = number(curve.gap_trend->slope);
            j["gap_slope_se"] = number(curve.gap_trend->slope_se);
        }
    }
    m.results["equilibrium"] = j;
}

void run_trajectory(const RunConfig& c, std::size_t threads, Writer& out, RunManifest& m) {
    const auto model = build_model(c.model);
    const auto sim = build_sim_config(c, c.sim.n_particles, threads);
    const auto ens = simulate_particle_system(model, sim, NoiseGrid(sim.seed, sim.dt));
    const std::size_t d = model.dim();
    const std::size_t coord = c.experiment.observable_index;

    CsvTable paths;
    paths.header = {"step", "t", "particle"};
    for (std::size_t k = 0; k < d; ++k) paths.header.push_back(fmt::format("x{}", k));
    CsvTable mean;
    mean.header = {"t", "mean", "std_error"};
    for (std::size_t rec = 0; rec < ens.recorded_steps.size(); ++rec) {
        std::vector<double> values(ens.n_particles);
        for (std::size_t i = 0; i < ens.n_particles; ++i) {
            const auto x = ens.particle(rec, i);
            std::vector<std::string> row{count(ens.recorded_steps[rec]), format_real(ens.time(rec)), count(i)};
            for (double v : x) row.push_back(format_real(v));
            paths.add_row(std::move(row));
            values[i] = x[coord];
        }
        const auto est = estimate_mean(values);
        mean.add_row({format_real(ens.time(rec)), format_real(est.mean), format_real(est.std_error)});
    }
    out.table("trajectories", paths, std::nullopt, "");
    out.table("trajectory_mean", mean, PlotKind::timeseries, fmt::format("ensemble mean of x{}", coord));
    m.results["trajectory"] = {{"records", ens.recorded_steps.size()}, {"particles", ens.n_particles}};
}

std::vector<FileRecord> inventory(const fs::path& dir) {
    std::vector<FileRecord> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto rel = fs::relative(entry.path(), dir).generic_string();
        if (rel == kManifestName) continue;
        const auto data = read_text(entry.path());
        files.push_back(FileRecord{rel, data.size(), sha256_hex(data)});
    }
    std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
    files.push_back(FileRecord{std::string(kManifestName), 0, ""});
    return files;
}

std::string manifest_text(const RunManifest& m) {
    std::string out;
    const auto line = [&](const json& j) { out += j.dump() + "\n"; };
    line({{"record", "run"},
          {"tool", "chaoslab"},
          {"version", m.version},
          {"status", m.complete ? "complete" : "incomplete"},
          {"exit_code", m.exit_code},
          {"seed", m.seed},
          {"started", m.started},
          {"finished", m.finished},
          {"error", m.error.empty() ? json(nullptr) : json(m.error)}});
    line({{"record", "config"}, {"hash", m.config_hash}, {"text", serialize_config(m.config)}});
    line({{"record", "model"}, {"family", m.config.model.family}, {"fingerprint", m.model_fingerprint}});
    line({{"record", "results"}, {"results", m.results}});
    for (const auto& n : m.notes) line({{"record", "note"}, {"text", n}});
    for (const auto& f : m.files) {
        if (f.sha256.empty()) line({{"record", "file"}, {"path", f.path}, {"sha256", nullptr}});
        else line({{"record", "file"}, {"path", f.path}, {"bytes", f.bytes}, {"sha256", f.sha256}});
    }
    return out;
}

} // namespace

std::string_view tool_version() { return CHAOSLAB_VERSION; }

std::string sha256_hex(std::string_view data) { return digest_hex(EVP_sha256(), data); }

std::string git_blob_sha1(std::string_view data) {
    std::string blob = fmt::format("blob {}", data.size());
    blob.push_back('\0');
    blob.append(data);
    return digest_hex(EVP_sha1(), blob);
}

RunManifest run(RunConfig config, const RunOptions& options) {
    if (options.seed) config.sim.seed = *options.seed;
    if (options.output_dir) config.output.directory = *options.output_dir;
    if (auto problems = validation_problems(config); !problems.empty()) throw ConfigError(std::move(problems));

    RunManifest m;
    m.config = config;
    m.seed = config.sim.seed;
    m.version = std::string(tool_version());
    m.directory = config.output.directory;
    const auto text = serialize_config(config);
    m.config_hash = sha256_hex(text);
    m.model_fingerprint = git_blob_sha1(serialize_model(config.model));

    std::error_code ec;
    fs::create_directories(m.directory, ec);
    if (ec) throw IoError(fmt::format("cannot create output directory {}: {}", m.directory.string(), ec.message()));

    m.started = utc_now();
    const std::size_t threads = std::max<std::size_t>(1, options.threads);
    Writer out(m.directory, config.output.plot);
    try {
        const auto& kind = config.experiment.kind;
        if (kind == "chaos_rate") run_chaos_rate(config, threads, out, m);
        else if (kind == "observable_deviation") run_observable_deviation(config, threads, out, m);
        else if (kind == "measure_deviation") run_measure_deviation(config, threads, out, m);
        else if (kind == "equilibrium") run_equilibrium(config, threads, out, m);
        else run_trajectory(config, threads, out, m);
        m.complete = true;
    } catch (const DivergenceError& e) {
        m.exit_code = 2;
        m.error = e.what();
    } catch (const IoError& e) {
        m.exit_code = 3;
        m.error = e.what();
    } catch (const ValidationError& e) {
        m.exit_code = 1;
        m.error = e.what();
    }
    m.finished = utc_now();
    m.files = inventory(m.directory);
    write_text(m.directory / kManifestName, manifest_text(m));
    return m;
}

RunManifest read_manifest(const fs::path& path) {
    const auto text = read_text(path);
    RunManifest m;
    m.directory = path.parent_path();
    bool have_config = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        const auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ValidationError(fmt::format("{} line {}: {}", path.string(), line_no, e.what()));
        }
        const auto record = j.value("record", std::string{});
        if (record == "run") {
            m.version = j.value("version", std::string{});
            m.complete = j.value("status", std::string{}) == "complete";
            m.exit_code = j.value("exit_code", 0);
            m.seed = j.value("seed", std::uint64_t{0});
            m.started = j.value("started", std::string{});
            m.finished = j.value("finished", std::string{});
            if (j.contains("error") && j["error"].is_string()) m.error = j["error"].get<std::string>();
        } else if (record == "config") {
            m.config = parse_config(j.at("text").get<std::string>());
            m.config_hash = j.value("hash", std::string{});
            have_config = true;
        } else if (record == "model") {
            m.model_fingerprint = j.value("fingerprint", std::string{});
        } else if (record == "results") {
            m.results = j.at("results");
        } else if (record == "note") {
            m.notes.push_back(j.value("text", std::string{}));
        } else if (record == "file") {
            FileRecord f;
            f.path = j.at("path").get<std::string>();
            f.bytes = j.value("bytes", std::uintmax_t{0});
            if (j["sha256"].is_string()) f.sha256 = j["sha256"].get<std::string>();
            m.files.push_back(std::move(f));
        }
    }
    if (!have_config) throw ValidationError(fmt::format("{} has no config record", path.string()));
    return m;
}

RunConfig load_run_input(const fs::path& path) {
    const auto text = read_text(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return read_manifest(path).config;
    return parse_config(text);
}

} // namespace chaoslab
