// Transceiver TX path model: W-bit frames serialized MSB-first into a timed
// bitstream at the configured line rate. No 8B/10B, no channel bonding; the
// raw frame bits go out unchanged.
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dtcsim/frame_encoder.hpp"

namespace dtcsim {

struct LineConfig {
    double line_rate_bps = 10e9;  // 100 ps per bit
    unsigned frame_width = kDefaultFrameWidth;

    double bit_period_s() const noexcept { return 1.0 / line_rate_bps; }
};

/// Serialized output bits in transmission order, packed MSB-first per byte,
/// with the physical bit period attached.
class Bitstream {
public:
    Bitstream() = default;
    explicit Bitstream(double bit_period_s) : bit_period_s_(bit_period_s) {}

    std::uint64_t size() const noexcept { return bit_count_; }
    double bit_period_s() const noexcept { return bit_period_s_; }
    double duration_s() const noexcept {
        return static_cast<double>(bit_count_) * bit_period_s_;
    }
    const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }

    bool bit(std::uint64_t i) const noexcept {
        return (bytes_[i >> 3] >> (7 - (i & 7))) & 1u;
    }

    void reserve_bits(std::uint64_t n) { bytes_.reserve((n + 7) / 8); }

    void push_bit(bool b) {
        if ((bit_count_ & 7) == 0) bytes_.push_back(0);
        if (b) bytes_.back() |= static_cast<std::uint8_t>(1u << (7 - (bit_count_ & 7)));
        ++bit_count_;
    }

    /// Appends the low `count` bits of `word`, most significant first.
    void push_bits(std::uint64_t word, unsigned count);

    void set_bit_period(double s) { bit_period_s_ = s; }

    friend bool operator==(const Bitstream& a, const Bitstream& b) {
        return a.bit_count_ == b.bit_count_ && a.bytes_ == b.bytes_;
    }

private:
    std::vector<std::uint8_t> bytes_;
    std::uint64_t bit_count_ = 0;
    double bit_period_s_ = 100e-12;
};

/// Serializer: bit k*W + j of the stream is bit (W-1-j) of frame k.
/// Frames must fit the configured width.
Bitstream serialize(std::span<const DataFrame> frames, const LineConfig& cfg);

/// Chunks a bitstream back into W-bit frames (inverse of serialize; a
/// trailing partial word is zero-padded).
std::vector<DataFrame> deserialize(const Bitstream& stream, unsigned frame_width);

struct Edge {
    double time_s = 0;
    std::uint64_t bit_index = 0;
    bool rising = false;
};

/// Every 0->1 and 1->0 transition, timestamped at bit boundaries. The line
/// idles low before the first bit; no edge is emitted for the stream end.
std::vector<Edge> edge_times(const Bitstream& stream);

// --- bitstream file format ---------------------------------------------
// Little-endian header, 24 bytes:
//   offset 0  magic "DTCB"
//   offset 4  u16 version (currently 1)
//   offset 6  u16 frame width
//   offset 8  f64 line rate [bps]
//   offset 16 u64 bit count
// followed by ceil(bit_count/8) payload bytes, bits MSB-first per byte,
// zero-padded to the byte boundary.

inline constexpr std::uint16_t kBitstreamFileVersion = 1;

struct BitstreamFile {
    Bitstream stream;
    std::uint16_t frame_width = kDefaultFrameWidth;
    double line_rate_bps = 10e9;
};

void write_bitstream_file(const std::filesystem::path& path, const Bitstream& stream,
                          const LineConfig& cfg);

/// Throws std::runtime_error on bad magic, unsupported version, or truncation.
BitstreamFile read_bitstream_file(const std::filesystem::path& path);

}  // namespace dtcsim
