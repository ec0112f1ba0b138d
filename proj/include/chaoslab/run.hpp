#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "chaoslab/config.hpp"

namespace chaoslab {

struct RunOptions {
    std::optional<std::uint64_t> seed;       // replaces sim.seed
    std::optional<std::string> output_dir;   // replaces output.directory
    std::size_t threads = 1;                 // speed only, never results
};

struct FileRecord {
    std::string path; // relative to the output directory
    std::uintmax_t bytes = 0;
    std::string sha256; // empty for the manifest itself
};

struct RunManifest {
    RunConfig config; // as run, seed and directory overrides applied
    std::uint64_t seed = 0;
    std::string version;
    std::string started;
    std::string finished;
    std::string config_hash;       // SHA-256 of the serialized config
    std::string model_fingerprint; // git blob SHA-1 of the serialized [model] section
    bool complete = false;
    int exit_code = 0; // 0 success, 1 validation, 2 divergence, 3 I/O
    std::string error;
    std::vector<std::string> notes;
    nlohmann::json results = nlohmann::json::object();
    std::vector<FileRecord> files;
    std::filesystem::path directory;
};

inline constexpr std::string_view kManifestName = "manifest.jsonl";

std::string_view tool_version();

/// Runs the configured experiment and writes its tables, plots and
/// manifest.jsonl. Throws ConfigError before any compute if the config is
/// invalid and IoError if the manifest cannot be written; divergence and
/// other failures during compute produce a manifest marked incomplete with a
/// nonzero exit_code.
RunManifest run(RunConfig config, const RunOptions& options = {});

/// Reads a config file, or the config recorded in a manifest.jsonl.
RunConfig load_run_input(const std::filesystem::path& path);
RunManifest read_manifest(const std::filesystem::path& path);

std::string sha256_hex(std::string_view data);
/// SHA-1 of "blob <size>\0" + data, as git hashes file contents.
std::string git_blob_sha1(std::string_view data);

} // namespace chaoslab
