// Deterministic timing-parameter streams: fixed repetitions and lookup-table
// sequences swept by a phase accumulator.
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dtcsim/timing.hpp"

namespace dtcsim {

inline constexpr std::size_t kDefaultLutCapacity = 4096;  // 4k x 12-bit table
inline constexpr std::size_t kDefaultMaxFixedCount = 1000;

/// D-bit phase accumulator stepped by the frequency control word K once per
/// emitted parameter. The table index is taken from the post-step phase.
class PhaseAccumulator {
public:
    PhaseAccumulator(unsigned depth_bits, std::uint64_t control_word,
                     double sample_rate_hz, std::uint64_t initial_phase = 0);

    unsigned depth_bits() const noexcept { return depth_bits_; }
    std::uint64_t control_word() const noexcept { return control_word_; }
    std::uint64_t phase() const noexcept { return phase_; }
    double sample_rate_hz() const noexcept { return sample_rate_hz_; }
    std::uint64_t modulus() const noexcept { return std::uint64_t{1} << depth_bits_; }

    /// phase <- (phase + K) mod 2^D; returns the new phase.
    std::uint64_t step() noexcept;

    /// Steps once and maps the new phase onto [0, table_size). For a
    /// power-of-two table this is exactly the top log2(table_size) phase bits.
    std::size_t step_index(std::size_t table_size);

    /// Steps until the phase first returns to its current value (the table
    /// traversal period). Equals 2^D / K whenever K divides 2^D.
    std::uint64_t traversal_steps() const noexcept;

    /// Traversal period in seconds: 2^D / (K * f_s).
    double sequence_length_s() const;

private:
    unsigned depth_bits_;
    std::uint64_t control_word_;
    std::uint64_t phase_;
    double sample_rate_hz_;
};

/// Control word that sweeps an N-entry table one entry per step (ceil(2^D/N)).
std::uint64_t control_word_for_sweep(unsigned depth_bits, std::size_t table_size);

/// Initial phase 2^D - K: the first step then lands on phase 0 (table entry 0).
std::uint64_t sweep_start_phase(unsigned depth_bits, std::uint64_t control_word);

/// Ordered table of timing parameters addressed by the phase accumulator.
struct ParameterLut {
    std::vector<TimingParameter> entries;

    static ParameterLut from_codes(std::span<const std::uint32_t> codes,
                                   const CodeMapping& mapping);
};

/// Parses a text/CSV file of interval codes, one per line ('#' comments and
/// blank lines ignored), and maps them through `mapping`. Codes are limited
/// to 12 bits and the table to `capacity` entries.
ParameterLut load_lut_file(const std::filesystem::path& path,
                           const CodeMapping& mapping,
                           std::size_t capacity = kDefaultLutCapacity);
std::vector<std::uint32_t> load_lut_codes(const std::filesystem::path& path,
                                          std::size_t capacity = kDefaultLutCapacity);

/// count copies of one interval; count is bounded by max_count.
std::vector<TimingParameter> generate_fixed(const TimingParameter& interval,
                                            std::size_t count,
                                            std::size_t max_count = kDefaultMaxFixedCount);

/// Steps the accumulator count times, emitting the LUT entry addressed by
/// each phase value.
std::vector<TimingParameter> generate_sequence(const ParameterLut& lut,
                                               PhaseAccumulator& acc,
                                               std::size_t count);

}  // namespace dtcsim
