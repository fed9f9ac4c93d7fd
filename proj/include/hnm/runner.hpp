#pragma once

// Subcommand orchestration and serialization for the CLI and the C API.

#include <string>
#include <vector>

#include "hnm/config.hpp"

namespace hnm {

inline constexpr int kSchemaVersion = 1;

struct RunResult {
    int status = 0;        ///< 0 ok, 1 validation error, 2 numerical failure
    std::string envelope;  ///< envelope JSON on success, error JSON otherwise
    std::string csv;
    std::string svg;
    double seconds = 0.0;
};

/// Runs one subcommand without touching the filesystem.
RunResult run_subcommand(const std::string& subcommand, RunConfig cfg, int threads = 1);

/// Runs and writes <sub>.json/.csv/.svg (or error.json) plus timing.json into
/// `out_dir`; an empty `out_dir` falls back to [output] dir, then "out".
RunResult run_to_directory(const std::string& subcommand, RunConfig cfg, const std::string& out_dir, int threads = 1);

/// Parses INI text, applies key=value overrides, then runs as above. Parse
/// errors also produce error.json.
RunResult run_from_text(const std::string& subcommand, const std::string& ini_text,
                        const std::vector<std::string>& overrides, const std::string& out_dir, int threads = 1);

}  // namespace hnm
