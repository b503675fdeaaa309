#include "dtcsim/serdes.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace dtcsim {

void Bitstream::push_bits(std::uint64_t word, unsigned count) {
    for (unsigned j = 0; j < count; ++j)
        push_bit((word >> (count - 1 - j)) & 1u);
}

Bitstream serialize(std::span<const DataFrame> frames, const LineConfig& cfg) {
    const unsigned w = cfg.frame_width;
    if (w < kMinFrameWidth || w > kMaxFrameWidth)
        throw std::invalid_argument("frame width must be 2..64");
    if (!(cfg.line_rate_bps > 0.0))
        throw std::invalid_argument("line rate must be positive");
    Bitstream stream(cfg.bit_period_s());
    stream.reserve_bits(frames.size() * w);
    for (const auto& f : frames) {
        if (w < 64 && (f.bits >> w) != 0)
            throw std::invalid_argument("frame wider than configured width");
        stream.push_bits(f.bits, w);
    }
    return stream;
}

std::vector<DataFrame> deserialize(const Bitstream& stream, unsigned frame_width) {
    if (frame_width < kMinFrameWidth || frame_width > kMaxFrameWidth)
        throw std::invalid_argument("frame width must be 2..64");
    std::vector<DataFrame> frames;
    frames.reserve((stream.size() + frame_width - 1) / frame_width);
    std::uint64_t word = 0;
    unsigned used = 0;
    for (std::uint64_t i = 0; i < stream.size(); ++i) {
        word = (word << 1) | (stream.bit(i) ? 1u : 0u);
        if (++used == frame_width) {
            frames.push_back(DataFrame{word});
            word = 0;
            used = 0;
        }
    }
    if (used > 0) frames.push_back(DataFrame{word << (frame_width - used)});
    return frames;
}

std::vector<Edge> edge_times(const Bitstream& stream) {
    std::vector<Edge> edges;
    bool level = false;  // idle low before the first bit
    for (std::uint64_t i = 0; i < stream.size(); ++i) {
        const bool b = stream.bit(i);
        if (b != level) {
            edges.push_back({static_cast<double>(i) * stream.bit_period_s(), i, b});
            level = b;
        }
    }
    return edges;
}

namespace {

template <typename T>
void put_le(std::string& out, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(const std::uint8_t* p) {
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        v |= static_cast<T>(p[i]) << (8 * i);
    return v;
}

}  // namespace

void write_bitstream_file(const std::filesystem::path& path, const Bitstream& stream,
                          const LineConfig& cfg) {
    std::string header = "DTCB";
    put_le<std::uint16_t>(header, kBitstreamFileVersion);
    put_le<std::uint16_t>(header, static_cast<std::uint16_t>(cfg.frame_width));
    std::uint64_t rate_bits;
    const double rate = cfg.line_rate_bps;
    std::memcpy(&rate_bits, &rate, sizeof rate_bits);
    put_le<std::uint64_t>(header, rate_bits);
    put_le<std::uint64_t>(header, stream.size());

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open for write: " + path.string());
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(reinterpret_cast<const char*>(stream.bytes().data()),
              static_cast<std::streamsize>(stream.bytes().size()));
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

BitstreamFile read_bitstream_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open: " + path.string());
    std::uint8_t header[24];
    in.read(reinterpret_cast<char*>(header), sizeof header);
    if (in.gcount() != sizeof header)
        throw std::runtime_error(path.string() + ": truncated header");
    if (std::memcmp(header, "DTCB", 4) != 0)
        throw std::runtime_error(path.string() + ": not a DTCB bitstream file");
    const auto version = get_le<std::uint16_t>(header + 4);
    if (version != kBitstreamFileVersion)
        throw std::runtime_error(path.string() + ": unsupported version " +
                                 std::to_string(version));
    BitstreamFile file;
    file.frame_width = get_le<std::uint16_t>(header + 6);
    const auto rate_bits = get_le<std::uint64_t>(header + 8);
    std::memcpy(&file.line_rate_bps, &rate_bits, sizeof rate_bits);
    const auto bit_count = get_le<std::uint64_t>(header + 16);
    if (!(file.line_rate_bps > 0.0))
        throw std::runtime_error(path.string() + ": invalid line rate");

    const std::uint64_t payload = (bit_count + 7) / 8;
    std::vector<std::uint8_t> bytes(payload);
    in.read(reinterpret_cast<char*>(bytes.data()),
            static_cast<std::streamsize>(payload));
    if (static_cast<std::uint64_t>(in.gcount()) != payload)
        throw std::runtime_error(path.string() + ": truncated payload");

    file.stream.set_bit_period(1.0 / file.line_rate_bps);
    file.stream.reserve_bits(bit_count);
    for (std::uint64_t i = 0; i < bit_count; ++i)
        file.stream.push_bit((bytes[i >> 3] >> (7 - (i & 7))) & 1u);
    return file;
}

}  // namespace dtcsim
