#include "dtcsim/reference.hpp"

namespace dtcsim::reference {

std::vector<std::uint8_t> run_length_bits(std::span<const TimingParameter> params) {
    std::vector<std::uint8_t> bits;
    std::uint64_t total = 0;
    for (const auto& p : params) total += p.total_bits;
    bits.reserve(total);
    for (const auto& p : params) {
        for (std::uint64_t i = 0; i < p.high_bits; ++i) bits.push_back(1);
        for (std::uint64_t i = p.high_bits; i < p.total_bits; ++i) bits.push_back(0);
    }
    return bits;
}

std::vector<DataFrame> chunk_frames(std::span<const std::uint8_t> bits,
                                    unsigned frame_width) {
    std::vector<DataFrame> frames;
    frames.reserve((bits.size() + frame_width - 1) / frame_width);
    std::uint64_t word = 0;
    unsigned used = 0;
    for (std::uint8_t b : bits) {
        word = (word << 1) | (b & 1u);
        if (++used == frame_width) {
            frames.push_back(DataFrame{word});
            word = 0;
            used = 0;
        }
    }
    if (used > 0)
        frames.push_back(DataFrame{word << (frame_width - used)});
    return frames;
}

}  // namespace dtcsim::reference
