#include "dtcsim/frame_encoder.hpp"

#include <stdexcept>
#include <string>

namespace dtcsim {

void check_parameter(const TimingParameter& p, const std::string& context) {
    if (p.total_bits < 1)
        throw std::invalid_argument("timing parameter" + context +
                                    ": total_bits must be >= 1");
    if (p.high_bits > p.total_bits)
        throw std::invalid_argument("timing parameter" + context +
                                    ": high_bits exceeds total_bits");
}

void CodeMapping::validate(unsigned code_bits) const {
    if (code_bits == 0 || code_bits > 32)
        throw std::invalid_argument("mapping: code width must be 1..32 bits");
    // Affine and monotone, so the endpoints bound the whole code range.
    const std::uint32_t max_code = (code_bits >= 32)
                                       ? 0xFFFFFFFFu
                                       : ((1u << code_bits) - 1);
    check_parameter(map(0), " for code 0");
    check_parameter(map(max_code), " for code " + std::to_string(max_code));
}

FrameEncoder::FrameEncoder(unsigned frame_width) : width_(frame_width) {
    if (frame_width < kMinFrameWidth)
        throw std::invalid_argument("frame width must be >= 2");
    if (frame_width > kMaxFrameWidth)
        throw std::invalid_argument("frame width above 64 is not supported");
}

bool FrameEncoder::fill_pending(std::span<const TimingParameter> params,
                                std::uint64_t& pos) {
    while (pending_count_ < width_) {
        if (state_.signal_bits_left == 0) {
            if (pos >= params.size())
                return false;  // queue exhausted at a signal boundary
            const TimingParameter& p = params[pos];
            check_parameter(p, " #" + std::to_string(pos));
            state_.signal_bits_left = p.total_bits;
            state_.high_bits_left = p.high_bits;
            ++pos;
            ++state_.queue_position;
        }
        // Take as much of the current signal as still fits in this frame:
        // its leading high bits become 1s, the rest stay 0.
        const std::uint64_t room = width_ - pending_count_;
        const std::uint64_t take =
            state_.signal_bits_left < room ? state_.signal_bits_left : room;
        const std::uint64_t ones =
            state_.high_bits_left < take ? state_.high_bits_left : take;
        if (ones > 0) {
            const std::uint64_t run = (ones >= 64) ? ~0ull : ((1ull << ones) - 1);
            pending_word_ |= run << (width_ - pending_count_ - ones);
        }
        state_.high_bits_left -= ones;
        state_.signal_bits_left -= take;
        pending_count_ += static_cast<unsigned>(take);
    }
    return true;
}

FrameResult FrameEncoder::next_frame(std::span<const TimingParameter> params) {
    std::uint64_t pos = state_.queue_position;
    const bool complete = fill_pending(params, pos);
    if (!complete)
        return {DataFrame{pending_word_}, pending_count_, FrameStatus::Underrun};
    FrameResult r{DataFrame{pending_word_}, width_, FrameStatus::Complete};
    pending_word_ = 0;
    pending_count_ = 0;
    return r;
}

void FrameEncoder::encode(std::span<const TimingParameter> chunk,
                          std::vector<DataFrame>& out) {
    // queue_position counts parameters consumed across all chunks; within one
    // chunk we index from its start.
    std::uint64_t pos = 0;
    while (fill_pending(chunk, pos)) {
        out.push_back(DataFrame{pending_word_});
        pending_word_ = 0;
        pending_count_ = 0;
    }
}

std::optional<DataFrame> FrameEncoder::flush() {
    if (state_.signal_bits_left != 0)
        throw std::logic_error("flush mid-signal would corrupt the stream");
    if (pending_count_ == 0)
        return std::nullopt;
    DataFrame f{pending_word_};  // unfilled low bits already 0 (line idle)
    pending_word_ = 0;
    pending_count_ = 0;
    return f;
}

std::vector<DataFrame> encode_stream(std::span<const TimingParameter> params,
                                     unsigned frame_width) {
    FrameEncoder enc(frame_width);
    std::vector<DataFrame> out;
    std::uint64_t total = 0;
    for (const auto& p : params) total += p.total_bits;
    out.reserve((total + frame_width - 1) / frame_width);
    enc.encode(params, out);
    if (auto tail = enc.flush()) out.push_back(*tail);
    return out;
}

}  // namespace dtcsim
