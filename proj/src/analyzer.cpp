#include "dtcsim/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace dtcsim {

DecodeResult decode_intervals(const Bitstream& stream) {
    DecodeResult result;
    const double period = stream.bit_period_s();
    const std::uint64_t n = stream.size();
    std::uint64_t i = 0;
    while (i < n) {
        if (!stream.bit(i)) {
            ++i;
            continue;
        }
        const std::uint64_t start = i;
        while (i < n && stream.bit(i)) ++i;
        const std::uint64_t width = i - start;
        result.intervals.push_back({result.intervals.size(), width,
                                    static_cast<double>(width) * period});
        if (i == n) result.unterminated_final = true;
    }
    return result;
}

std::vector<TimingParameter> decode_parameters(const Bitstream& stream) {
    std::vector<TimingParameter> params;
    const std::uint64_t n = stream.size();
    if (n == 0) return params;
    if (!stream.bit(0))
        throw std::invalid_argument(
            "stream starts low; parameter recovery needs every signal to open "
            "with its pulse (0 < high_bits)");
    std::uint64_t i = 0;
    while (i < n) {
        std::uint64_t run = i;
        while (i < n && stream.bit(i)) ++i;
        const std::uint64_t high = i - run;
        run = i;
        while (i < n && !stream.bit(i)) ++i;
        const std::uint64_t low = i - run;
        params.push_back({high, high + low});
    }
    return params;
}

JitterModel::JitterModel(double sigma_s, std::uint64_t seed)
    : sigma_s_(sigma_s),
      seed_(seed),
      rng_(seed),
      // normal_distribution requires a positive sigma; the dummy value is
      // never drawn from when sigma_s_ == 0.
      dist_(0.0, sigma_s > 0.0 ? sigma_s : 1.0) {
    if (!(sigma_s >= 0.0))
        throw std::invalid_argument("jitter sigma must be >= 0");
}

double JitterModel::perturb(double time_s) {
    if (sigma_s_ == 0.0) return time_s;
    return time_s + dist_(rng_);
}

std::vector<Edge> JitterModel::apply(std::span<const Edge> edges) {
    std::vector<Edge> out(edges.begin(), edges.end());
    for (auto& e : out) e.time_s = perturb(e.time_s);
    return out;
}

WidthSeries pulse_widths(std::span<const Edge> edges) {
    WidthSeries series;
    series.widths_s.reserve(edges.size() / 2);
    double rise_time = 0.0;
    bool high = false;
    for (const auto& e : edges) {
        if (e.rising == high)
            throw std::invalid_argument(
                "edge list must alternate rising/falling starting with rising");
        if (e.rising)
            rise_time = e.time_s;
        else
            series.widths_s.push_back(e.time_s - rise_time);
        high = e.rising;
    }
    series.unterminated_final = high;
    return series;
}

namespace {

// Synthesizes one pulse per code and decodes the widths back through the
// full encoder/serializer path.
std::vector<IntervalMeasurement> sweep_widths(std::uint32_t first_code,
                                              std::uint32_t last_code,
                                              const CodeMapping& mapping,
                                              const LineConfig& cfg) {
    if (last_code < first_code)
        throw std::invalid_argument("empty code range");
    std::vector<TimingParameter> params;
    params.reserve(static_cast<std::size_t>(last_code) - first_code + 1);
    for (std::uint64_t c = first_code; c <= last_code; ++c) {
        const TimingParameter p = mapping.map(static_cast<std::uint32_t>(c));
        if (p.high_bits == 0 || p.high_bits >= p.total_bits)
            throw std::invalid_argument(
                "code " + std::to_string(c) +
                " does not map to 0 < high < total; widths would not decode");
        params.push_back(p);
    }
    const Bitstream stream = serialize(encode_stream(params, cfg.frame_width), cfg);
    DecodeResult decoded = decode_intervals(stream);
    if (decoded.intervals.size() != params.size())
        throw std::logic_error("decoded pulse count does not match swept codes");
    return std::move(decoded.intervals);
}

}  // namespace

LinearityReport linearity_from_widths(std::span<const std::uint64_t> widths_bits,
                                      double lsb_s) {
    LinearityReport report;
    report.lsb_s = lsb_s;
    if (widths_bits.size() < 2) {
        report.note = "single code swept; DNL/INL need at least two codes";
        return report;
    }
    report.dnl_lsb.reserve(widths_bits.size() - 1);
    report.inl_lsb.reserve(widths_bits.size() - 1);
    // Integer bit-domain differences: an ideal pipeline yields exact zeros
    // with no floating-point residue.
    double inl = 0.0;
    for (std::size_t k = 0; k + 1 < widths_bits.size(); ++k) {
        const std::int64_t step = static_cast<std::int64_t>(widths_bits[k + 1]) -
                                  static_cast<std::int64_t>(widths_bits[k]);
        const double dnl = static_cast<double>(step - 1);
        inl += dnl;
        report.dnl_lsb.push_back(dnl);
        report.inl_lsb.push_back(inl);
    }
    return report;
}

LinearityReport linearity_from_widths(std::span<const double> widths_s, double lsb_s) {
    LinearityReport report;
    report.lsb_s = lsb_s;
    if (widths_s.size() < 2) {
        report.note = "single code swept; DNL/INL need at least two codes";
        return report;
    }
    report.dnl_lsb.reserve(widths_s.size() - 1);
    report.inl_lsb.reserve(widths_s.size() - 1);
    double inl = 0.0;
    for (std::size_t k = 0; k + 1 < widths_s.size(); ++k) {
        const double dnl = (widths_s[k + 1] - widths_s[k]) / lsb_s - 1.0;
        inl += dnl;
        report.dnl_lsb.push_back(dnl);
        report.inl_lsb.push_back(inl);
    }
    return report;
}

LinearityReport sweep_linearity(std::uint32_t first_code, std::uint32_t last_code,
                                const CodeMapping& mapping, const LineConfig& cfg) {
    const auto intervals = sweep_widths(first_code, last_code, mapping, cfg);
    std::vector<std::uint64_t> widths_bits;
    widths_bits.reserve(intervals.size());
    for (const auto& m : intervals) widths_bits.push_back(m.width_bits);
    return linearity_from_widths(widths_bits, cfg.bit_period_s());
}

LinearityReport sweep_linearity(std::uint32_t first_code, std::uint32_t last_code,
                                const CodeMapping& mapping, const LineConfig& cfg,
                                JitterModel& jitter, std::uint32_t repeats) {
    if (repeats == 0)
        throw std::invalid_argument("repeats must be >= 1");
    const auto intervals = sweep_widths(first_code, last_code, mapping, cfg);
    std::vector<double> mean_widths(intervals.size(), 0.0);
    for (std::uint32_t r = 0; r < repeats; ++r) {
        for (std::size_t k = 0; k < intervals.size(); ++k) {
            // Independent displacement on each edge of the pulse.
            const double rise = jitter.perturb(0.0);
            const double fall = jitter.perturb(intervals[k].width_s);
            mean_widths[k] += (fall - rise - mean_widths[k]) / (r + 1);
        }
    }
    return linearity_from_widths(std::span<const double>(mean_widths),
                                 cfg.bit_period_s());
}

IntervalStats interval_statistics(std::span<const double> widths_s) {
    if (widths_s.size() < 2)
        throw std::invalid_argument("need at least 2 measurements for statistics");
    IntervalStats stats;
    stats.min_s = widths_s.front();
    stats.max_s = widths_s.front();
    double mean = 0.0;
    double m2 = 0.0;
    for (const double w : widths_s) {
        ++stats.count;
        const double delta = w - mean;
        mean += delta / static_cast<double>(stats.count);
        m2 += delta * (w - mean);
        stats.min_s = std::min(stats.min_s, w);
        stats.max_s = std::max(stats.max_s, w);
    }
    stats.mean_s = mean;
    stats.stddev_s = std::sqrt(m2 / static_cast<double>(stats.count - 1));
    return stats;
}

std::vector<double> repeated_width_samples(const TimingParameter& p,
                                           const LineConfig& cfg, JitterModel& jitter,
                                           std::uint64_t repeats) {
    check_parameter(p);
    if (p.high_bits == 0 || p.high_bits >= p.total_bits)
        throw std::invalid_argument(
            "repeated measurement needs both edges inside the stream "
            "(0 < high_bits < total_bits)");
    const TimingParameter one[] = {p};
    const Bitstream stream = serialize(encode_stream(one, cfg.frame_width), cfg);
    const std::vector<Edge> edges = edge_times(stream);
    if (edges.size() != 2)
        throw std::logic_error("single pulse should produce exactly two edges");
    std::vector<double> widths;
    widths.reserve(repeats);
    for (std::uint64_t r = 0; r < repeats; ++r) {
        const double rise = jitter.perturb(edges[0].time_s);
        const double fall = jitter.perturb(edges[1].time_s);
        widths.push_back(fall - rise);
    }
    return widths;
}

double chi_square_critical(unsigned dof, double significance) {
    if (dof == 0) throw std::invalid_argument("dof must be >= 1");
    // Upper-tail standard normal quantiles for the supported levels.
    double z;
    if (significance == 0.001)
        z = 3.090232306167813;
    else if (significance == 0.01)
        z = 2.3263478740408408;
    else if (significance == 0.05)
        z = 1.6448536269514722;
    else if (significance == 0.1)
        z = 1.2815515655446004;
    else
        throw std::invalid_argument(
            "unsupported significance level (use 0.001, 0.01, 0.05 or 0.1)");
    const double df = static_cast<double>(dof);
    const double t = 1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df));
    return df * t * t * t;
}

UniformityResult uniformity_test(std::span<const std::uint32_t> codes, unsigned bins,
                                 std::uint32_t range, double significance) {
    if (bins < 2) throw std::invalid_argument("bins must be >= 2");
    if (range < bins) throw std::invalid_argument("range must be >= bins");
    if (codes.size() < 10ull * bins)
        throw std::invalid_argument("insufficient samples: need at least 10 per bin (" +
                                    std::to_string(10ull * bins) + " total)");
    std::vector<std::uint64_t> observed(bins, 0);
    for (const std::uint32_t c : codes) {
        if (c >= range)
            throw std::invalid_argument("code " + std::to_string(c) +
                                        " outside range [0, " +
                                        std::to_string(range) + ")");
        ++observed[static_cast<std::uint64_t>(c) * bins / range];
    }
    UniformityResult result;
    result.bins = bins;
    result.samples = codes.size();
    result.dof = bins - 1;
    const double n = static_cast<double>(codes.size());
    double chi = 0.0;
    for (unsigned b = 0; b < bins; ++b) {
        // Codes mapping to bin b, i.e. c with floor(c*bins/range) == b; bin
        // sizes differ by at most one code when the range does not divide
        // evenly, and the boundaries are ceilings of b*range/bins.
        const auto lower = (static_cast<std::uint64_t>(b) * range + bins - 1) / bins;
        const auto upper =
            ((static_cast<std::uint64_t>(b) + 1) * range + bins - 1) / bins;
        const std::uint64_t bin_codes = upper - lower;
        const double expected = n * static_cast<double>(bin_codes) / range;
        const double diff = static_cast<double>(observed[b]) - expected;
        chi += diff * diff / expected;
    }
    result.chi_square = chi;
    result.critical_value = chi_square_critical(result.dof, significance);
    result.pass = chi < result.critical_value;
    return result;
}

bool sequence_period_check(std::span<const std::uint64_t> widths_bits,
                           std::span<const std::uint64_t> expected_cycle) {
    if (expected_cycle.empty())
        throw std::invalid_argument("expected cycle must not be empty");
    if (widths_bits.size() < 2 * expected_cycle.size()) return false;
    for (std::size_t i = 0; i < widths_bits.size(); ++i)
        if (widths_bits[i] != expected_cycle[i % expected_cycle.size()]) return false;
    return true;
}

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_linearity_csv(const std::filesystem::path& path,
                         const LinearityReport& report) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for write: " + path.string());
    out << "step,dnl_lsb,inl_lsb\n";
    for (std::size_t k = 0; k < report.dnl_lsb.size(); ++k)
        out << k << ',' << format_double(report.dnl_lsb[k]) << ','
            << format_double(report.inl_lsb[k]) << '\n';
    if (!out.flush()) throw std::runtime_error("write failed: " + path.string());
}

void write_intervals_csv(const std::filesystem::path& path,
                         std::span<const IntervalMeasurement> intervals) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for write: " + path.string());
    out << "pulse_index,width_bits,width_s\n";
    for (const auto& m : intervals)
        out << m.pulse_index << ',' << m.width_bits << ','
            << format_double(m.width_s) << '\n';
    if (!out.flush()) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace dtcsim
