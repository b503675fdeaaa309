#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

#include "dtcsim/analyzer.hpp"
#include "dtcsim/frame_encoder.hpp"
#include "dtcsim/lfsr.hpp"
#include "dtcsim/reference.hpp"
#include "dtcsim/sequence.hpp"
#include "dtcsim/serdes.hpp"
#include "json.hpp"

namespace dtcsim::cli {

std::vector<TimingParameter> generate_parameters(RunConfig& cfg) {
    switch (cfg.mode) {
        case Mode::Single: {
            const TimingParameter p{cfg.high_bits, cfg.total_bits};
            check_parameter(p, " (interval)");
            return {p};
        }
        case Mode::FixedSequence:
            return generate_fixed({cfg.high_bits, cfg.total_bits}, cfg.count);
        case Mode::LutSequence: {
            if (cfg.lut_codes.empty())
                cfg.lut_codes = load_lut_codes(cfg.lut_path);
            const ParameterLut lut =
                ParameterLut::from_codes(cfg.lut_codes, cfg.mapping);
            AccumulatorSettings& acc = cfg.accumulator;
            if (acc.control_word == 0)
                acc.control_word =
                    control_word_for_sweep(acc.depth_bits, lut.entries.size());
            if (!acc.initial_phase)
                acc.initial_phase =
                    sweep_start_phase(acc.depth_bits, acc.control_word);
            PhaseAccumulator stepper(acc.depth_bits, acc.control_word,
                                     acc.sample_rate_hz, *acc.initial_phase);
            return generate_sequence(lut, stepper, cfg.count);
        }
        case Mode::Random: {
            if (cfg.bank.empty()) cfg.bank = default_bank_specs();
            LfsrBank bank(cfg.bank);
            return random_parameters(bank, cfg.count, cfg.mapping);
        }
    }
    throw std::logic_error("unreachable mode");
}

namespace {

void check_dynamic_range(std::span<const TimingParameter> params,
                         const RunConfig& cfg) {
    for (std::size_t i = 0; i < params.size(); ++i) {
        const TimingParameter& p = params[i];
        if (p.high_bits < cfg.range_min_bits || p.high_bits > cfg.range_max_bits)
            throw std::invalid_argument(
                "high: parameter #" + std::to_string(i) + " interval of " +
                std::to_string(p.high_bits) + " bits is outside the dynamic range [" +
                std::to_string(cfg.range_min_bits) + ", " +
                std::to_string(cfg.range_max_bits) + "] bits");
        if (p.total_bits > cfg.range_max_bits)
            throw std::invalid_argument(
                "total: parameter #" + std::to_string(i) + " length of " +
                std::to_string(p.total_bits) + " bits exceeds the dynamic range "
                "maximum of " + std::to_string(cfg.range_max_bits) + " bits");
    }
}

}  // namespace

SynthSummary run_synth(RunConfig cfg, std::ostream& log) {
    validate(cfg);
    std::vector<TimingParameter> params = generate_parameters(cfg);
    check_dynamic_range(params, cfg);

    const LineConfig line{static_cast<double>(cfg.line_rate_bps), cfg.frame_width};
    const std::vector<DataFrame> frames = encode_stream(params, cfg.frame_width);
    const Bitstream stream = serialize(frames, line);

    if (cfg.manifest_path.empty())
        cfg.manifest_path = cfg.output_path.string() + ".manifest.json";

    const std::filesystem::path tmp = cfg.output_path.string() + ".tmp";
    write_bitstream_file(tmp, stream, line);
    std::filesystem::rename(tmp, cfg.output_path);
    write_manifest(cfg.manifest_path, cfg);

    SynthSummary summary;
    summary.pulses = params.size();
    summary.bits = stream.size();
    summary.duration_s = stream.duration_s();
    summary.output_path = cfg.output_path;
    summary.manifest_path = cfg.manifest_path;

    log << "wrote " << summary.output_path.string() << ": " << summary.bits
        << " bits (" << frames.size() << " frames of " << cfg.frame_width
        << "), " << summary.pulses << " pulses, " << summary.duration_s * 1e6
        << " us at " << cfg.line_rate_bps << " bps\n";
    log << "manifest: " << summary.manifest_path.string() << "\n";
    return summary;
}

namespace {

using nlohmann::json;

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for write: " + path.string());
    out << text;
    if (!out.flush()) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

int run_analyze(const AnalyzeOptions& opt, std::ostream& log) {
    if (opt.input_path.empty()) throw std::invalid_argument("input: required");

    const BitstreamFile file = read_bitstream_file(opt.input_path);
    const DecodeResult decoded = decode_intervals(file.stream);

    json summary;
    summary["input"] = opt.input_path.string();
    summary["line_rate_bps"] = file.line_rate_bps;
    summary["frame_width"] = file.frame_width;
    summary["bits"] = file.stream.size();
    summary["pulses"] = decoded.intervals.size();
    summary["unterminated_final"] = decoded.unterminated_final;

    log << "input: " << file.stream.size() << " bits at " << file.line_rate_bps
        << " bps (frame width " << file.frame_width << "), "
        << decoded.intervals.size() << " pulses";
    if (decoded.unterminated_final) log << " (final pulse unterminated)";
    log << "\n";

    std::vector<std::uint64_t> widths_bits;
    widths_bits.reserve(decoded.intervals.size());
    for (const auto& m : decoded.intervals) widths_bits.push_back(m.width_bits);

    // Measurement-side widths; optionally re-measured under edge jitter.
    std::vector<double> widths_s;
    if (opt.jitter_sigma_s > 0.0) {
        JitterModel model(opt.jitter_sigma_s, opt.jitter_seed);
        const std::vector<Edge> jittered = model.apply(edge_times(file.stream));
        widths_s = pulse_widths(jittered).widths_s;
        summary["jitter"] =
            json{{"sigma_s", opt.jitter_sigma_s}, {"seed", opt.jitter_seed}};
    } else {
        widths_s.reserve(decoded.intervals.size());
        for (const auto& m : decoded.intervals) widths_s.push_back(m.width_s);
    }

    if (widths_s.size() >= 2) {
        const IntervalStats stats = interval_statistics(widths_s);
        summary["width_s"] = json{{"min", stats.min_s},
                                  {"max", stats.max_s},
                                  {"mean", stats.mean_s},
                                  {"stddev", stats.stddev_s}};
        log << "width: min " << stats.min_s * 1e9 << " ns, max "
            << stats.max_s * 1e9 << " ns, mean " << stats.mean_s * 1e9
            << " ns, stddev " << stats.stddev_s * 1e12 << " ps\n";
    } else if (widths_s.size() == 1) {
        summary["width_s"] = json{{"min", widths_s[0]}, {"max", widths_s[0]}};
        log << "width: " << widths_s[0] * 1e9 << " ns (single pulse)\n";
    }

    if (!opt.intervals_csv.empty())
        write_intervals_csv(opt.intervals_csv, decoded.intervals);

    bool failed = false;

    if (opt.linearity) {
        const LinearityReport report =
            opt.jitter_sigma_s > 0.0
                ? linearity_from_widths(std::span<const double>(widths_s),
                                        file.stream.bit_period_s())
                : linearity_from_widths(std::span<const std::uint64_t>(widths_bits),
                                        file.stream.bit_period_s());
        double max_dnl = 0.0, max_inl = 0.0;
        for (const double d : report.dnl_lsb) max_dnl = std::max(max_dnl, std::abs(d));
        for (const double d : report.inl_lsb) max_inl = std::max(max_inl, std::abs(d));
        summary["linearity"] = json{{"steps", report.dnl_lsb.size()},
                                    {"max_abs_dnl_lsb", max_dnl},
                                    {"max_abs_inl_lsb", max_inl},
                                    {"lsb_s", report.lsb_s}};
        if (!report.note.empty()) summary["linearity"]["note"] = report.note;
        log << "linearity: max|DNL| " << max_dnl << " LSB, max|INL| " << max_inl
            << " LSB over " << report.dnl_lsb.size() << " steps\n";
        if (!opt.linearity_csv.empty()) write_linearity_csv(opt.linearity_csv, report);
    }

    if (opt.uniformity) {
        std::vector<std::uint32_t> codes;
        codes.reserve(widths_bits.size());
        for (std::size_t i = 0; i < widths_bits.size(); ++i) {
            const std::int64_t code = opt.mapping.code_for_high(widths_bits[i]);
            if (code < 0 || code >= static_cast<std::int64_t>(opt.code_range))
                throw std::invalid_argument(
                    "uniformity: pulse #" + std::to_string(i) + " width of " +
                    std::to_string(widths_bits[i]) +
                    " bits does not map to a code in [0, " +
                    std::to_string(opt.code_range) + ")");
            codes.push_back(static_cast<std::uint32_t>(code));
        }
        const UniformityResult result =
            uniformity_test(codes, opt.bins, opt.code_range, opt.significance);
        summary["uniformity"] = json{{"chi_square", result.chi_square},
                                     {"dof", result.dof},
                                     {"critical_value", result.critical_value},
                                     {"bins", result.bins},
                                     {"samples", result.samples},
                                     {"pass", result.pass}};
        log << "uniformity: chi-square " << result.chi_square << " vs critical "
            << result.critical_value << " (" << result.bins << " bins, "
            << result.samples << " samples) -> "
            << (result.pass ? "pass" : "FAIL") << "\n";
        if (!result.pass) failed = true;
    }

    if (!opt.expected_cycle.empty()) {
        const bool ok = sequence_period_check(widths_bits, opt.expected_cycle);
        summary["cycle"] = json{{"length", opt.expected_cycle.size()},
                                {"pass", ok}};
        log << "cycle: " << opt.expected_cycle.size() << "-pulse cycle "
            << (ok ? "confirmed" : "NOT confirmed") << " over "
            << widths_bits.size() << " pulses\n";
        if (!ok) failed = true;
    }

    if (!opt.summary_json.empty())
        write_text_file(opt.summary_json, summary.dump(2) + "\n");

    return failed ? kExitCheckFailed : kExitOk;
}

namespace {

std::vector<TimingParameter> random_list(std::mt19937_64& rng, bool nondegenerate) {
    std::uniform_int_distribution<std::size_t> len_dist(1, 40);
    std::uniform_int_distribution<std::uint64_t> total_dist(nondegenerate ? 2 : 1,
                                                            1000);
    std::vector<TimingParameter> params(len_dist(rng));
    for (auto& p : params) {
        p.total_bits = total_dist(rng);
        const std::uint64_t lo = nondegenerate ? 1 : 0;
        const std::uint64_t hi = nondegenerate ? p.total_bits - 1 : p.total_bits;
        p.high_bits = std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
    }
    return params;
}

unsigned random_width(std::mt19937_64& rng) {
    // favor the power-of-two widths, but exercise odd ones too
    static constexpr unsigned kCommon[] = {8, 16, 32, 64};
    if (std::uniform_int_distribution<int>(0, 3)(rng) != 0)
        return kCommon[std::uniform_int_distribution<std::size_t>(0, 3)(rng)];
    return std::uniform_int_distribution<unsigned>(kMinFrameWidth, kMaxFrameWidth)(rng);
}

}  // namespace

int run_selftest(std::uint64_t trials, std::uint64_t seed, std::ostream& log) {
    std::mt19937_64 rng(seed);

    // encoder output matches the independent run-length reference
    for (std::uint64_t t = 0; t < trials; ++t) {
        const auto params = random_list(rng, false);
        const unsigned width = random_width(rng);
        const auto frames = encode_stream(params, width);
        const auto expected =
            reference::chunk_frames(reference::run_length_bits(params), width);
        if (frames != expected) {
            log << "selftest FAILED: encoder diverges from run-length reference "
                   "(trial " << t << ", width " << width << ", "
                << params.size() << " parameters, seed " << seed << ")\n";
            return kExitCheckFailed;
        }
    }
    log << "selftest: encoder vs run-length reference, " << trials << " trials ok\n";

    // feeding the encoder in arbitrary chunks must not change the output
    for (std::uint64_t t = 0; t < trials; ++t) {
        const auto params = random_list(rng, false);
        const unsigned width = random_width(rng);
        FrameEncoder encoder(width);
        std::vector<DataFrame> frames;
        std::size_t pos = 0;
        while (pos < params.size()) {
            const std::size_t n = std::uniform_int_distribution<std::size_t>(
                1, params.size() - pos)(rng);
            encoder.encode(std::span(params).subspan(pos, n), frames);
            pos += n;
        }
        if (auto tail = encoder.flush()) frames.push_back(*tail);
        if (frames != encode_stream(params, width)) {
            log << "selftest FAILED: chunked encoding diverges (trial " << t
                << ", width " << width << ", seed " << seed << ")\n";
            return kExitCheckFailed;
        }
    }
    log << "selftest: chunked == one-shot encoding, " << trials << " trials ok\n";

    // serialize + decode recovers every parameter (trailing frame padding
    // lands in the final signal's low time)
    for (std::uint64_t t = 0; t < trials; ++t) {
        auto params = random_list(rng, true);
        const unsigned width = random_width(rng);
        const LineConfig line{10e9, width};
        const Bitstream stream = serialize(encode_stream(params, width), line);
        std::uint64_t sum = 0;
        for (const auto& p : params) sum += p.total_bits;
        params.back().total_bits += (width - sum % width) % width;
        if (decode_parameters(stream) != params) {
            log << "selftest FAILED: round trip does not recover parameters "
                   "(trial " << t << ", width " << width << ", seed " << seed
                << ")\n";
            return kExitCheckFailed;
        }
    }
    log << "selftest: serialize/decode round trip, " << trials << " trials ok\n";

    return kExitOk;
}

}  // namespace dtcsim::cli
