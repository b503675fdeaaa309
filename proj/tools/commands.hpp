// Subcommand implementations, kept out of main() so tests can drive them
// in-process.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "config.hpp"
#include "dtcsim/timing.hpp"

namespace dtcsim::cli {

struct SynthSummary {
    std::uint64_t pulses = 0;
    std::uint64_t bits = 0;
    double duration_s = 0.0;
    std::filesystem::path output_path;
    std::filesystem::path manifest_path;
};

/// Produces the parameter stream for a config, resolving derived fields in
/// place (LUT codes read from file, accumulator control word and start
/// phase, default register bank).
std::vector<TimingParameter> generate_parameters(RunConfig& cfg);

/// Validates, synthesizes, and writes the bitstream file plus its manifest.
/// Output files appear only on success (written to a temp name, then
/// renamed). Throws std::invalid_argument for config errors and
/// std::runtime_error for I/O failures.
SynthSummary run_synth(RunConfig cfg, std::ostream& log);

struct AnalyzeOptions {
    std::filesystem::path input_path;
    std::filesystem::path intervals_csv;   // per-pulse widths, when set
    std::filesystem::path linearity_csv;   // per-step DNL/INL, when set
    std::filesystem::path summary_json;    // machine-readable summary, when set
    bool linearity = false;
    bool uniformity = false;
    unsigned bins = 64;
    std::uint32_t code_range = 4096;
    double significance = 0.01;
    CodeMapping mapping{10, 20};           // width -> code recovery
    double jitter_sigma_s = 0.0;
    std::uint64_t jitter_seed = 1;
    std::vector<std::uint64_t> expected_cycle;  // widths in bits, empty = off
};

/// Decodes a bitstream file and reports. Returns kExitOk, or kExitCheckFailed
/// when an enabled pass/fail check (uniformity, expected cycle) fails.
int run_analyze(const AnalyzeOptions& opt, std::ostream& log);

/// Property suite comparing the frame encoder against an independent
/// run-length reference, exercising chunked encoding and the full
/// serialize/decode round trip on randomized parameter lists.
int run_selftest(std::uint64_t trials, std::uint64_t seed, std::ostream& log);

}  // namespace dtcsim::cli
