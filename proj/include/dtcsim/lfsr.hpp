// Pseudo-random interval source: a bank of twelve maximal-length LFSRs,
// one output bit each, combined into a 12-bit uniform word per step.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dtcsim/timing.hpp"

namespace dtcsim {

/// Fibonacci (external-XOR) shift register. Register A_1 (the one that
/// receives the feedback) sits at the state word's MSB, A_n at bit 0; a tap
/// at position i selects A_i for the feedback XOR. Each step outputs the MSB
/// of the current state, then shifts right by one and inserts the feedback
/// at the MSB.
class Lfsr {
public:
    Lfsr(unsigned degree, std::span<const unsigned> taps, std::uint32_t seed);

    unsigned degree() const noexcept { return degree_; }
    std::uint32_t state() const noexcept { return state_; }
    const std::vector<unsigned>& taps() const noexcept { return taps_; }

    unsigned step() noexcept;

    /// Steps until the state first returns to its current value (brute-force
    /// enumeration). Maximal registers return 2^degree - 1. Intended for
    /// degree <= 24 or so; the cost is one full cycle.
    std::uint64_t period() const;

    bool is_maximal() const { return period() == (std::uint64_t{1} << degree_) - 1; }

private:
    unsigned degree_;
    std::vector<unsigned> taps_;
    std::uint32_t tap_mask_;
    std::uint32_t state_;
};

/// Tap set and seed for one register of a bank.
struct LfsrSpec {
    unsigned degree = 0;
    std::vector<unsigned> taps;
    std::uint32_t seed = 0;  // 0 means all-ones default
};

inline constexpr unsigned kBankWidth = 12;

/// Twelve LFSRs with pairwise distinct degrees; word bit j comes from
/// register j (LSB first, so the highest shipped degree feeds the MSB).
class LfsrBank {
public:
    explicit LfsrBank(std::span<const LfsrSpec> specs);

    const std::vector<Lfsr>& registers() const noexcept { return lfsrs_; }

    /// Steps every register once and packs the twelve output bits.
    std::uint32_t sample() noexcept;

private:
    std::vector<Lfsr> lfsrs_;
};

/// Shipped degree/tap table (degrees 9..20, all enumeration-verified maximal)
/// with all-ones seeds.
std::vector<LfsrSpec> default_bank_specs();
LfsrBank default_bank();

/// Primitive tap set for a degree in the shipped table (degrees 2..20).
/// Throws std::out_of_range for degrees the table does not cover.
std::vector<unsigned> primitive_taps(unsigned degree);

/// Product of (2^n_i - 1) over the degree set, i.e. the combined period of
/// independent maximal registers with pairwise coprime periods.
/// The u64 variant throws std::overflow_error when the product exceeds 64
/// bits; the decimal variant is exact for any degree set.
std::uint64_t combined_period_u64(std::span<const unsigned> degrees);
std::string combined_period_dec(std::span<const unsigned> degrees);

/// Steps all registers in lockstep until every state simultaneously returns
/// to its start; brute-force check of the combined period on small banks.
std::uint64_t joint_period(std::span<const Lfsr> lfsrs, std::uint64_t limit = 1u << 30);

/// count parameters whose interval codes are the bank's successive words.
std::vector<TimingParameter> random_parameters(LfsrBank& bank, std::size_t count,
                                               const CodeMapping& mapping);

}  // namespace dtcsim
