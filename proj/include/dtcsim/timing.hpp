// Core timing-parameter types shared by the generator, encoder and analyzer.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dtcsim {

/// One timing signal, expressed in bit units (1 bit = one line-clock period).
/// The signal is emitted as high_bits ones followed by (total_bits - high_bits)
/// zeros; the pulse width therefore equals high_bits line-bit periods.
struct TimingParameter {
    std::uint64_t high_bits = 0;   // pulse width in bits
    std::uint64_t total_bits = 1;  // high + low duration in bits, >= 1

    constexpr bool valid() const noexcept {
        return total_bits >= 1 && high_bits <= total_bits;
    }

    friend constexpr bool operator==(const TimingParameter&,
                                     const TimingParameter&) = default;
};

/// Throws std::invalid_argument when p violates the type invariants.
/// `context` names the offending parameter in the message (e.g. an index).
void check_parameter(const TimingParameter& p, const std::string& context = {});

/// Affine rule turning an interval code (12-bit by default) into a timing
/// parameter:  high_bits = code + high_offset, total_bits = high_bits + low_bits.
/// The same rule is shared by the lookup-table generator and the random source.
struct CodeMapping {
    std::uint64_t high_offset = 0;
    std::uint64_t low_bits = 20;

    constexpr TimingParameter map(std::uint32_t code) const noexcept {
        const std::uint64_t high = code + high_offset;
        return {high, high + low_bits};
    }

    /// Inverse of map() on the high_bits component.
    constexpr std::int64_t code_for_high(std::uint64_t high) const noexcept {
        return static_cast<std::int64_t>(high) -
               static_cast<std::int64_t>(high_offset);
    }

    // Every code in [0, 2^code_bits) must map to a valid parameter.
    void validate(unsigned code_bits = 12) const;
};

}  // namespace dtcsim
