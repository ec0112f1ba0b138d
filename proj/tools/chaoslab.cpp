// chaoslab: run, validate and replot mean-field particle experiments.
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "chaoslab/config.hpp"
#include "chaoslab/csv.hpp"
#include "chaoslab/errors.hpp"
#include "chaoslab/plot.hpp"
#include "chaoslab/run.hpp"

namespace fs = std::filesystem;
using namespace chaoslab;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kDivergence = 2;
constexpr int kIo = 3;

int do_run(const std::string& input, const RunOptions& options) {
    const auto config = load_run_input(input);
    const auto manifest = run(config, options);
    if (!manifest.complete) {
        fmt::print(stderr, "run incomplete: {}\n", manifest.error);
        return manifest.exit_code;
    }
    fmt::print("wrote {} files to {}\n", manifest.files.size(), manifest.directory.string());
    for (const auto& [name, value] : manifest.results.items()) fmt::print("{}: {}\n", name, value.dump());
    return kOk;
}

int do_validate(const std::string& path) {
    const auto config = load_config(path);
    fmt::print("{}", serialize_config(config));
    return kOk;
}

int do_replot(const std::string& table_path, const std::string& kind_name, const std::optional<std::string>& out,
              const std::optional<std::string>& title) {
    const auto kind = plot_kind_from_name(kind_name);
    if (!kind) throw ValidationError(fmt::format("unknown plot kind '{}' (loglog, loglinear, timeseries)", kind_name));
    const fs::path path(table_path);
    const auto table = read_csv(path);
    const auto svg = emit_plot(plot_from_table(table, *kind, title ? *title : path.stem().string()), *kind);
    fs::path target = out ? fs::path(*out) : fs::path(path).replace_extension(".svg");
    write_text(target, svg);
    fmt::print("wrote {}\n", target.string());
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mean-field particle experiments: propagation of chaos, deviation tails, equilibration"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tool_version()));

    std::string run_input;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
    std::size_t threads = 1;
    auto* run_cmd = app.add_subcommand("run", "run the experiment described by a config file or a manifest.jsonl");
    run_cmd->add_option("input", run_input, "config file or manifest.jsonl")->required();
    run_cmd->add_option("--seed", seed, "override sim.seed");
    run_cmd->add_option("--output-dir", output_dir, "override output.directory");
    run_cmd->add_option("--threads", threads, "worker threads (never changes results)")->check(CLI::PositiveNumber);

    std::string validate_input;
    auto* validate_cmd = app.add_subcommand("validate", "check a config and print it with defaults resolved");
    validate_cmd->add_option("config", validate_input, "config file")->required();

    std::string table;
    std::string kind;
    std::optional<std::string> svg_out;
    std::optional<std::string> title;
    auto* replot_cmd = app.add_subcommand("replot", "redraw the SVG for a result table");
    replot_cmd->add_option("table", table, "CSV table written by a run")->required();
    replot_cmd->add_option("kind", kind, "loglog, loglinear or timeseries")->required();
    replot_cmd->add_option("-o,--output", svg_out, "SVG path (default: next to the table)");
    replot_cmd->add_option("--title", title, "plot title (default: the table's file name)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (*run_cmd) return do_run(run_input, RunOptions{seed, output_dir, threads});
        if (*validate_cmd) return do_validate(validate_input);
        if (*replot_cmd) return do_replot(table, kind, svg_out, title);
    } catch (const ConfigError& e) {
        for (const auto& p : e.problems()) fmt::print(stderr, "error: {}\n", p);
        return kValidation;
    } catch (const DivergenceError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kDivergence;
    } catch (const IoError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kIo;
    } catch (const ValidationError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kValidation;
    }
    return kOk;
}
