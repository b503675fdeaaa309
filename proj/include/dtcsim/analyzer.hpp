// Measurement side of the simulator: recovers intervals from a serialized
// bitstream and computes linearity, jitter statistics, uniformity, and
// sequence-periodicity checks on them.
#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dtcsim/serdes.hpp"

namespace dtcsim {

/// One decoded pulse. In the noiseless model width_s is exactly
/// width_bits * bit_period.
struct IntervalMeasurement {
    std::uint64_t pulse_index = 0;
    std::uint64_t width_bits = 0;
    double width_s = 0.0;
};

struct DecodeResult {
    std::vector<IntervalMeasurement> intervals;
    /// True when the stream ended while the line was still high; the final
    /// entry of `intervals` is then measured up to the stream end instead of
    /// up to a falling edge.
    bool unterminated_final = false;
};

/// Run-length decode: pairs each rising edge with the next falling edge.
/// Low gaps (including trailing frame padding) produce no measurement.
DecodeResult decode_intervals(const Bitstream& stream);

/// Recovers the full parameter list from a stream. Each signal must satisfy
/// 0 < high_bits (the stream must open with a pulse); the last signal's
/// recovered total_bits absorbs any trailing frame padding.
/// Throws std::invalid_argument when the stream starts low.
std::vector<TimingParameter> decode_parameters(const Bitstream& stream);

/// Differential / integral nonlinearity over an adjacent-code sweep.
/// dnl_lsb[k] = (width[k+1] - width[k]) / lsb - 1; inl_lsb is its prefix sum.
/// Both vectors are one shorter than the number of codes swept; a single-code
/// sweep leaves them empty and sets `note`.
struct LinearityReport {
    std::vector<double> dnl_lsb;
    std::vector<double> inl_lsb;
    double lsb_s = 0.0;
    std::string note;
};

/// Gaussian edge-displacement model. Every perturbed edge receives an
/// independent N(0, sigma_s) offset; sigma_s = 0 leaves times unchanged.
/// Deterministic for a given seed and call sequence.
class JitterModel {
public:
    JitterModel(double sigma_s, std::uint64_t seed);

    double sigma_s() const noexcept { return sigma_s_; }
    std::uint64_t seed() const noexcept { return seed_; }

    /// time_s plus one fresh Gaussian draw.
    double perturb(double time_s);

    /// Independently perturbed copy of an edge list. Order is preserved,
    /// not re-sorted; displacements large enough to reorder edges are far
    /// outside this model's intended sigma << bit period regime.
    std::vector<Edge> apply(std::span<const Edge> edges);

private:
    double sigma_s_;
    std::uint64_t seed_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> dist_;
};

/// Pulse widths from an alternating edge list (rising first, as produced by
/// edge_times). A trailing rising edge without a matching fall yields no
/// width and sets unterminated_final.
struct WidthSeries {
    std::vector<double> widths_s;
    bool unterminated_final = false;
};
WidthSeries pulse_widths(std::span<const Edge> edges);

/// DNL/INL of an already-measured width sequence (successive pulses read as
/// successive codes). The bit-domain overload differences integers, so an
/// ideal adjacent-code sweep reports exactly zero.
LinearityReport linearity_from_widths(std::span<const std::uint64_t> widths_bits,
                                      double lsb_s);
LinearityReport linearity_from_widths(std::span<const double> widths_s, double lsb_s);

/// Synthesizes one pulse per code in [first_code, last_code] (affine mapping,
/// shared line config), runs it through the encoder and serializer, decodes
/// the widths back and reports DNL/INL. The noiseless overload works in
/// integer bit units end to end, so an ideal pipeline reports exactly zero.
LinearityReport sweep_linearity(std::uint32_t first_code, std::uint32_t last_code,
                                const CodeMapping& mapping, const LineConfig& cfg);

/// Monte-Carlo variant: each edge is jittered, widths are averaged over
/// `repeats` passes before the DNL/INL computation.
LinearityReport sweep_linearity(std::uint32_t first_code, std::uint32_t last_code,
                                const CodeMapping& mapping, const LineConfig& cfg,
                                JitterModel& jitter, std::uint32_t repeats);

/// Sample mean / standard deviation (n-1 form, Welford) of repeated width
/// measurements. Requires at least two samples.
struct IntervalStats {
    std::uint64_t count = 0;
    double mean_s = 0.0;
    double stddev_s = 0.0;
    double min_s = 0.0;
    double max_s = 0.0;
};
IntervalStats interval_statistics(std::span<const double> widths_s);

/// Measures the same synthesized pulse `repeats` times under the jitter
/// model. The parameter needs a falling edge inside the stream, i.e.
/// 0 < high_bits < total_bits.
std::vector<double> repeated_width_samples(const TimingParameter& p,
                                           const LineConfig& cfg, JitterModel& jitter,
                                           std::uint64_t repeats);

/// Pearson chi-square of observed codes against the uniform distribution on
/// [0, range). Needs at least 10 samples per bin.
struct UniformityResult {
    double chi_square = 0.0;
    unsigned dof = 0;
    double critical_value = 0.0;
    bool pass = false;
    std::uint64_t samples = 0;
    unsigned bins = 0;
};
UniformityResult uniformity_test(std::span<const std::uint32_t> codes, unsigned bins,
                                 std::uint32_t range = 4096,
                                 double significance = 0.01);

/// Upper-tail chi-square quantile via the Wilson-Hilferty cube approximation.
/// Supported significance levels: 0.001, 0.01, 0.05, 0.1.
double chi_square_critical(unsigned dof, double significance);

/// True iff the width sequence is the expected cycle repeated end to end
/// (a trailing partial cycle must match the cycle's prefix). Needs at least
/// two full cycles to certify; shorter inputs return false.
bool sequence_period_check(std::span<const std::uint64_t> widths_bits,
                           std::span<const std::uint64_t> expected_cycle);

// CSV report writers. Both throw std::runtime_error on I/O failure.
void write_linearity_csv(const std::filesystem::path& path,
                         const LinearityReport& report);
void write_intervals_csv(const std::filesystem::path& path,
                         std::span<const IntervalMeasurement> intervals);

}  // namespace dtcsim
