// Real-time splicing encoder: timing parameters in, W-bit data frames out.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dtcsim/timing.hpp"

namespace dtcsim {

inline constexpr unsigned kDefaultFrameWidth = 32;
inline constexpr unsigned kMinFrameWidth = 2;
inline constexpr unsigned kMaxFrameWidth = 64;  // frames are held in one 64-bit word

/// One W-bit parallel word handed to the serializer. Stored right-aligned;
/// bit (W-1) is transmitted first.
struct DataFrame {
    std::uint64_t bits = 0;

    friend constexpr bool operator==(const DataFrame&, const DataFrame&) = default;
};

/// Residual counters carried across frame boundaries.
struct EncoderState {
    std::uint64_t signal_bits_left = 0;  // bits of the current signal not yet framed
    std::uint64_t high_bits_left = 0;    // bits of its high interval not yet framed
    std::uint64_t queue_position = 0;    // parameters consumed so far (monotone)
};

enum class FrameStatus {
    Complete,  // a full W-bit frame was produced
    Underrun,  // the parameter queue ran out mid-frame; partial bits kept pending
};

struct FrameResult {
    DataFrame frame{};          // zero-padded below valid_bits on underrun
    unsigned valid_bits = 0;    // == frame width when Complete
    FrameStatus status = FrameStatus::Underrun;
};

/// Composes timing signals into W-bit frames by splicing at signal boundaries.
/// A frame is filled MSB-first: for each signal, the remaining high bits are
/// written as 1s, then the remaining low bits as 0s; when a signal ends inside
/// a frame the next parameter is loaded and splicing continues until the frame
/// is full. The concatenated frames, read MSB-first, equal the run-length
/// bitstream of the parameter list.
///
/// The encoder is strictly sequential and single-owner. Two usage styles:
///   - next_frame(all_params): produce one frame at a time; queue_position
///     indexes into the (append-only) list passed by the caller.
///   - encode(chunk, out): consume a whole chunk, appending every completed
///     frame; chunks concatenate, so splitting a list across calls yields the
///     same frames as a single call.
/// flush() zero-pads and emits the pending partial frame (line idle low). It is
/// only legal at a signal boundary.
class FrameEncoder {
public:
    explicit FrameEncoder(unsigned frame_width = kDefaultFrameWidth);

    unsigned frame_width() const noexcept { return width_; }
    const EncoderState& state() const noexcept { return state_; }

    /// Bits already composed into the pending (not yet emitted) frame.
    unsigned pending_bits() const noexcept { return pending_count_; }

    FrameResult next_frame(std::span<const TimingParameter> params);

    void encode(std::span<const TimingParameter> chunk, std::vector<DataFrame>& out);

    std::optional<DataFrame> flush();

private:
    // Fills the pending frame from params[pos...]; advances pos past every
    // parameter it loads. Returns false when params ran out first.
    bool fill_pending(std::span<const TimingParameter> params, std::uint64_t& pos);

    unsigned width_;
    EncoderState state_{};
    std::uint64_t pending_word_ = 0;
    unsigned pending_count_ = 0;
};

/// Whole-list driver: every parameter encoded, final partial frame zero-padded.
/// Returns ceil(sum(total_bits) / W) frames; an empty list yields no frames.
std::vector<DataFrame> encode_stream(std::span<const TimingParameter> params,
                                     unsigned frame_width = kDefaultFrameWidth);

}  // namespace dtcsim
