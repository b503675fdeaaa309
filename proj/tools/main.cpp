#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "dtcsim/lfsr.hpp"
#include "json.hpp"

namespace {

using namespace dtcsim;
using namespace dtcsim::cli;

double parse_double(const std::string& text, const std::string& field) {
    std::size_t used = 0;
    double value = 0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument(field + ": '" + text + "' is not a number");
    }
    if (used != text.size())
        throw std::invalid_argument(field + ": '" + text + "' is not a number");
    return value;
}

// parse_time_to_bits with the offending flag name prepended
std::uint64_t time_bits_field(const std::string& text, std::uint64_t rate_bps,
                              const std::string& field) {
    try {
        return parse_time_to_bits(text, rate_bps);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(field + ": " + e.what());
    }
}

struct SynthFlags {
    std::string mode;
    std::string rate = "10e9";
    unsigned frame_width = kDefaultFrameWidth;
    std::string high, total;
    std::uint64_t high_bits = 0, total_bits = 0;
    std::uint64_t count = 1;
    std::string lut_path;
    unsigned acc_depth = 12;
    std::uint64_t acc_control = 0;
    std::string acc_rate = "156.25e6";
    std::int64_t acc_phase = -1;
    std::vector<unsigned> bank_degrees;
    std::vector<std::uint64_t> bank_seeds;
    std::uint64_t map_offset = 10, map_low = 20;
    std::string range_min = "1ns", range_max = "40us";
    std::string output, manifest, from_manifest;

    // which options were actually given (to reject conflicting forms)
    CLI::Option *high_opt = nullptr, *total_opt = nullptr;
    CLI::Option *high_bits_opt = nullptr, *total_bits_opt = nullptr;
};

void add_synth_options(CLI::App& cmd, SynthFlags& f) {
    cmd.add_option("--mode", f.mode, "Generation mode")
        ->check(CLI::IsMember({"single", "fixed-sequence", "lut-sequence", "random"}));
    cmd.add_option("--rate", f.rate, "Line rate in bits per second (default 10e9)");
    cmd.add_option("--frame-width", f.frame_width,
                   "Parallel frame width in bits, 2..64 (default 32)");
    f.high_opt = cmd.add_option("--high", f.high,
                                "Pulse width as a time literal, e.g. 10ns");
    f.total_opt = cmd.add_option("--total", f.total,
                                 "Signal length (high + low) as a time literal");
    f.high_bits_opt =
        cmd.add_option("--high-bits", f.high_bits, "Pulse width in bit periods");
    f.total_bits_opt =
        cmd.add_option("--total-bits", f.total_bits, "Signal length in bit periods");
    cmd.add_option("--count", f.count,
                   "Pulses to emit (fixed-sequence, lut-sequence, random)");
    cmd.add_option("--lut", f.lut_path,
                   "Interval-code table file, one code per line");
    cmd.add_option("--acc-depth", f.acc_depth,
                   "Phase accumulator depth in bits (default 12)");
    cmd.add_option("--acc-control", f.acc_control,
                   "Frequency control word K; 0 sweeps the table one entry "
                   "per step (default)");
    cmd.add_option("--acc-rate", f.acc_rate,
                   "Accumulator sample rate in Hz (default 156.25e6)");
    cmd.add_option("--acc-phase", f.acc_phase,
                   "Initial accumulator phase; -1 starts the sweep on table "
                   "entry 0 (default)");
    cmd.add_option("--bank-degrees", f.bank_degrees,
                   "Twelve register degrees for random mode (default 9..20)")
        ->delimiter(',');
    cmd.add_option("--bank-seeds", f.bank_seeds,
                   "Twelve register seeds; 0 means all-ones (default)")
        ->delimiter(',');
    cmd.add_option("--map-offset", f.map_offset,
                   "Interval code to pulse width offset in bits (default 10)");
    cmd.add_option("--map-low", f.map_low,
                   "Low time appended after each mapped pulse in bits (default 20)");
    cmd.add_option("--range-min", f.range_min,
                   "Dynamic range minimum as a time literal (default 1ns)");
    cmd.add_option("--range-max", f.range_max,
                   "Dynamic range maximum as a time literal (default 40us)");
    cmd.add_option("--output,-o", f.output, "Bitstream output path");
    cmd.add_option("--manifest", f.manifest,
                   "Manifest output path (default <output>.manifest.json)");
    cmd.add_option("--from-manifest", f.from_manifest,
                   "Replay a previous run from its manifest (generation flags "
                   "are taken from the manifest)");
}

RunConfig config_from_flags(const SynthFlags& f) {
    if (!f.from_manifest.empty()) {
        RunConfig cfg = read_manifest(f.from_manifest);
        if (!f.output.empty()) cfg.output_path = f.output;
        cfg.manifest_path = f.manifest;
        return cfg;
    }

    if (f.mode.empty())
        throw std::invalid_argument("mode: required (or use --from-manifest)");
    RunConfig cfg;
    cfg.mode = mode_from_string(f.mode);
    cfg.line_rate_bps = integral_rate(parse_double(f.rate, "rate"), "rate");
    cfg.frame_width = f.frame_width;
    cfg.count = f.count;
    cfg.mapping = CodeMapping{f.map_offset, f.map_low};
    cfg.range_min_bits = time_bits_field(f.range_min, cfg.line_rate_bps, "range-min");
    cfg.range_max_bits = time_bits_field(f.range_max, cfg.line_rate_bps, "range-max");
    cfg.output_path = f.output;
    cfg.manifest_path = f.manifest;

    const bool wants_interval =
        cfg.mode == Mode::Single || cfg.mode == Mode::FixedSequence;
    if (wants_interval) {
        if (f.high_opt->count() && f.high_bits_opt->count())
            throw std::invalid_argument("high: give either --high or --high-bits");
        if (f.total_opt->count() && f.total_bits_opt->count())
            throw std::invalid_argument("total: give either --total or --total-bits");
        if (f.high_opt->count())
            cfg.high_bits = time_bits_field(f.high, cfg.line_rate_bps, "high");
        else if (f.high_bits_opt->count())
            cfg.high_bits = f.high_bits;
        else
            throw std::invalid_argument("high: required for this mode");
        if (f.total_opt->count())
            cfg.total_bits = time_bits_field(f.total, cfg.line_rate_bps, "total");
        else if (f.total_bits_opt->count())
            cfg.total_bits = f.total_bits;
        else
            throw std::invalid_argument("total: required for this mode");
    }

    if (cfg.mode == Mode::LutSequence) {
        cfg.lut_path = f.lut_path;
        cfg.accumulator.depth_bits = f.acc_depth;
        cfg.accumulator.control_word = f.acc_control;
        cfg.accumulator.sample_rate_hz = parse_double(f.acc_rate, "acc-rate");
        if (f.acc_phase >= 0)
            cfg.accumulator.initial_phase = static_cast<std::uint64_t>(f.acc_phase);
        else if (f.acc_phase < -1)
            throw std::invalid_argument("acc-phase: must be -1 (auto) or >= 0");
    }

    if (cfg.mode == Mode::Random && !f.bank_degrees.empty()) {
        if (f.bank_degrees.size() != kBankWidth)
            throw std::invalid_argument("bank-degrees: exactly " +
                                        std::to_string(kBankWidth) +
                                        " degrees are required");
        if (!f.bank_seeds.empty() && f.bank_seeds.size() != kBankWidth)
            throw std::invalid_argument("bank-seeds: exactly " +
                                        std::to_string(kBankWidth) +
                                        " seeds are required");
        for (std::size_t j = 0; j < kBankWidth; ++j) {
            LfsrSpec spec;
            spec.degree = f.bank_degrees[j];
            spec.taps = primitive_taps(spec.degree);
            spec.seed = f.bank_seeds.empty()
                            ? 0u
                            : static_cast<std::uint32_t>(f.bank_seeds[j]);
            cfg.bank.push_back(std::move(spec));
        }
    } else if (!f.bank_seeds.empty() && f.bank_degrees.empty()) {
        throw std::invalid_argument("bank-seeds: requires --bank-degrees");
    }

    return cfg;
}

struct AnalyzeFlags {
    std::string input;
    std::string summary, intervals_csv, linearity_csv;
    bool linearity = false;
    bool uniformity = false;
    unsigned bins = 64;
    std::uint32_t code_range = 4096;
    double significance = 0.01;
    std::uint64_t map_offset = 10, map_low = 20;
    std::string jitter_sigma = "0";
    std::uint64_t jitter_seed = 1;
    std::vector<std::uint64_t> expected_cycle;
};

void add_analyze_options(CLI::App& cmd, AnalyzeFlags& f) {
    cmd.add_option("input,--input", f.input, "Bitstream file to analyze");
    cmd.add_option("--summary", f.summary, "Write a JSON summary to this path");
    cmd.add_option("--intervals-csv", f.intervals_csv,
                   "Write per-pulse widths to this CSV path");
    cmd.add_option("--linearity-csv", f.linearity_csv,
                   "Write per-step DNL/INL to this CSV path");
    cmd.add_flag("--linearity", f.linearity,
                 "Treat successive pulses as an adjacent-code sweep and "
                 "report DNL/INL");
    cmd.add_flag("--uniformity", f.uniformity,
                 "Chi-square the recovered interval codes against a uniform "
                 "distribution");
    cmd.add_option("--bins", f.bins, "Histogram bins for --uniformity (default 64)");
    cmd.add_option("--code-range", f.code_range,
                   "Interval-code range for --uniformity (default 4096)");
    cmd.add_option("--significance", f.significance,
                   "Significance level for --uniformity (default 0.01)");
    cmd.add_option("--map-offset", f.map_offset,
                   "Pulse width to interval code offset in bits (default 10)");
    cmd.add_option("--map-low", f.map_low,
                   "Mapped low time in bits, for code recovery (default 20)");
    cmd.add_option("--jitter-sigma", f.jitter_sigma,
                   "Gaussian edge jitter sigma as a time literal (default 0)");
    cmd.add_option("--jitter-seed", f.jitter_seed,
                   "Seed for the jitter model (default 1)");
    cmd.add_option("--expect-cycle", f.expected_cycle,
                   "Expected repeating widths in bits, e.g. 30,31,32")
        ->delimiter(',');
}

AnalyzeOptions options_from_flags(const AnalyzeFlags& f) {
    AnalyzeOptions opt;
    opt.input_path = f.input;
    opt.summary_json = f.summary;
    opt.intervals_csv = f.intervals_csv;
    opt.linearity_csv = f.linearity_csv;
    opt.linearity = f.linearity || !f.linearity_csv.empty();
    opt.uniformity = f.uniformity;
    opt.bins = f.bins;
    opt.code_range = f.code_range;
    opt.significance = f.significance;
    opt.mapping = CodeMapping{f.map_offset, f.map_low};
    try {
        opt.jitter_sigma_s = parse_time_seconds(f.jitter_sigma);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("jitter-sigma: ") + e.what());
    }
    opt.jitter_seed = f.jitter_seed;
    opt.expected_cycle = f.expected_cycle;
    return opt;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "dtcsim: bit-accurate model of a transceiver-based digital-to-time "
        "converter (code in, timed pulse train out)"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "Read options from a config file; flags override file values");

    SynthFlags synth_flags;
    CLI::App* synth =
        app.add_subcommand("synth", "Synthesize a bitstream file and manifest");
    add_synth_options(*synth, synth_flags);

    AnalyzeFlags analyze_flags;
    CLI::App* analyze =
        app.add_subcommand("analyze", "Decode a bitstream file and report");
    add_analyze_options(*analyze, analyze_flags);

    std::uint64_t selftest_trials = 2000;
    std::uint64_t selftest_seed = 20260822;
    CLI::App* selftest = app.add_subcommand(
        "selftest", "Run the randomized encoder/round-trip property suite");
    selftest->add_option("--trials", selftest_trials,
                         "Trials per property (default 2000)");
    selftest->add_option("--seed", selftest_seed, "Random seed for the suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? dtcsim::cli::kExitOk : dtcsim::cli::kExitValidation;
    }

    try {
        if (synth->parsed()) {
            run_synth(config_from_flags(synth_flags), std::cout);
            return dtcsim::cli::kExitOk;
        }
        if (analyze->parsed())
            return run_analyze(options_from_flags(analyze_flags), std::cout);
        return run_selftest(selftest_trials, selftest_seed, std::cout);
    } catch (const std::logic_error& e) {
        // invalid_argument / out_of_range / domain_error: bad configuration
        std::cerr << "error: " << e.what() << '\n';
        return dtcsim::cli::kExitValidation;
    } catch (const std::exception& e) {
        // file and serialization failures
        std::cerr << "error: " << e.what() << '\n';
        return dtcsim::cli::kExitIo;
    }
}
