// Run configuration for the command-line front end: exact time-to-bits
// parsing, the resolved synthesis config, and its JSON manifest form.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dtcsim/lfsr.hpp"
#include "dtcsim/sequence.hpp"
#include "dtcsim/serdes.hpp"

namespace dtcsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitCheckFailed = 3;

/// Converts a time literal ("100ps", "1.5us", "2e-6s", bare value = seconds)
/// into a whole number of bit periods at the given line rate. Exact decimal
/// arithmetic; a value that is not an integer multiple of the bit period is
/// rejected rather than rounded. Throws std::invalid_argument.
std::uint64_t parse_time_to_bits(const std::string& text, std::uint64_t rate_bps);

/// Same literal syntax, approximate value in seconds (for quantities that
/// need no bit alignment, e.g. jitter sigma).
double parse_time_seconds(const std::string& text);

/// Validates that a rate given as a double is a whole number of hertz in
/// [1, 1e15] and returns it as an integer.
std::uint64_t integral_rate(double rate_bps, const std::string& field);

enum class Mode { Single, FixedSequence, LutSequence, Random };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& name);

struct AccumulatorSettings {
    unsigned depth_bits = 12;
    /// 0 means "derive": sweep the table one entry per step.
    std::uint64_t control_word = 0;
    double sample_rate_hz = 156.25e6;
    /// Unset means "derive": start so the first step lands on entry 0.
    std::optional<std::uint64_t> initial_phase;
};

/// Everything a synthesis run depends on. A fully resolved config (codes and
/// register specs inline, accumulator fields concrete) regenerates the exact
/// same bitstream; that resolved form is what the manifest stores.
struct RunConfig {
    Mode mode = Mode::Single;
    std::uint64_t line_rate_bps = 10'000'000'000ull;
    unsigned frame_width = kDefaultFrameWidth;

    // single / fixed-sequence interval
    std::uint64_t high_bits = 0;
    std::uint64_t total_bits = 0;

    // pulse count for fixed-sequence / lut-sequence / random
    std::uint64_t count = 1;

    // lut-sequence
    std::string lut_path;                  // read when lut_codes is empty
    std::vector<std::uint32_t> lut_codes;  // resolved table contents
    AccumulatorSettings accumulator;

    // random source; empty = shipped default bank
    std::vector<LfsrSpec> bank;

    // interval-code mapping for lut-sequence / random
    CodeMapping mapping{10, 20};

    // guardrail on every synthesized parameter, in bits at line_rate_bps
    std::uint64_t range_min_bits = 10;
    std::uint64_t range_max_bits = 400'000;

    std::filesystem::path output_path;
    std::filesystem::path manifest_path;  // empty = <output>.manifest.json
};

/// Full validation of field ranges and mode-specific requirements. Error
/// messages name the offending field. Throws std::invalid_argument.
void validate(const RunConfig& cfg);

// Manifest JSON round trip. The manifest echoes the resolved configuration;
// loading one yields a config that replays to a byte-identical bitstream.
void write_manifest(const std::filesystem::path& path, const RunConfig& cfg);
RunConfig read_manifest(const std::filesystem::path& path);

}  // namespace dtcsim::cli
