// Naive run-length reference model. Kept deliberately independent of the
// frame encoder and serializer so it can stand as a cross-check: it expands
// every signal bit by bit and never touches EncoderState.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dtcsim/frame_encoder.hpp"
#include "dtcsim/timing.hpp"

namespace dtcsim::reference {

/// high_bits 1s then (total_bits - high_bits) 0s per parameter, concatenated.
std::vector<std::uint8_t> run_length_bits(std::span<const TimingParameter> params);

/// Chunks a bit string MSB-first into W-bit words, zero-padding the tail.
std::vector<DataFrame> chunk_frames(std::span<const std::uint8_t> bits,
                                    unsigned frame_width);

}  // namespace dtcsim::reference
