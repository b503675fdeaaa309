#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "commands.hpp"
#include "config.hpp"
#include "doctest.h"
#include "dtcsim/analyzer.hpp"

using namespace dtcsim;
using namespace dtcsim::cli;

namespace {

std::filesystem::path temp_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "dtcsim_tests" / "cli";
    std::filesystem::create_directories(dir);
    return dir;
}

std::vector<char> slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::vector<char>(std::istreambuf_iterator<char>(in),
                             std::istreambuf_iterator<char>());
}

std::string error_field(const RunConfig& cfg) {
    try {
        validate(cfg);
        return "";
    } catch (const std::invalid_argument& e) {
        const std::string what = e.what();
        return what.substr(0, what.find(':'));
    }
}

}  // namespace

TEST_CASE("time literals convert exactly at the line rate") {
    const std::uint64_t rate = 10'000'000'000ull;
    CHECK(parse_time_to_bits("100ps", rate) == 1);
    CHECK(parse_time_to_bits("1ns", rate) == 10);
    CHECK(parse_time_to_bits("10ns", rate) == 100);
    CHECK(parse_time_to_bits("0.1ns", rate) == 1);
    CHECK(parse_time_to_bits("1.5us", rate) == 15000);
    CHECK(parse_time_to_bits("40us", rate) == 400000);
    CHECK(parse_time_to_bits("2e-6s", rate) == 20000);
    CHECK(parse_time_to_bits("0.0000001s", rate) == 1000);
    CHECK(parse_time_to_bits("2e-9", rate) == 20);  // bare value reads as seconds
    CHECK(parse_time_to_bits("1e-10s", rate) == 1);
    CHECK(parse_time_to_bits("1ms", rate) == 10'000'000);
    CHECK(parse_time_to_bits("1000000s", 1'000'000'000ull) ==
          1'000'000'000'000'000ull);
}

TEST_CASE("fractional bit periods are rejected, not rounded") {
    const std::uint64_t rate = 10'000'000'000ull;
    CHECK_THROWS_AS(static_cast<void>(parse_time_to_bits("10.05ns", rate)),
                    std::invalid_argument);
    CHECK_THROWS_AS(static_cast<void>(parse_time_to_bits("123456789ps", rate)),
                    std::invalid_argument);
    CHECK_THROWS_AS(static_cast<void>(parse_time_to_bits("1ps", 1'000'000'000ull)),
                    std::invalid_argument);
    CHECK_THROWS_AS(static_cast<void>(parse_time_to_bits("0.5s", 3)),
                    std::invalid_argument);
    CHECK(parse_time_to_bits("1s", 3) == 3);
}

TEST_CASE("malformed time literals") {
    const std::uint64_t rate = 10'000'000'000ull;
    for (const char* bad : {"", "ns", "abc", "-5ns", "1.2.3ns", "10 ns", "1e999s"})
        CHECK_THROWS_AS(static_cast<void>(parse_time_to_bits(bad, rate)),
                        std::invalid_argument);
    CHECK_THROWS_AS(static_cast<void>(parse_time_to_bits("1e20s", rate)),
                    std::invalid_argument);  // overflows the bit counter
}

TEST_CASE("time literals in seconds") {
    CHECK(parse_time_seconds("100ps") == doctest::Approx(100e-12));
    CHECK(parse_time_seconds("1.57ps") == doctest::Approx(1.57e-12));
    CHECK(parse_time_seconds("2ms") == doctest::Approx(2e-3));
    CHECK_THROWS_AS(static_cast<void>(parse_time_seconds("xyz")),
                    std::invalid_argument);
}

TEST_CASE("line rates must be whole hertz in range") {
    CHECK(integral_rate(10e9, "rate") == 10'000'000'000ull);
    CHECK(integral_rate(156.25e6, "rate") == 156'250'000ull);
    CHECK_THROWS_AS(static_cast<void>(integral_rate(1.5, "rate")),
                    std::invalid_argument);
    CHECK_THROWS_AS(static_cast<void>(integral_rate(0.0, "rate")),
                    std::invalid_argument);
    CHECK_THROWS_AS(static_cast<void>(integral_rate(2e15, "rate")),
                    std::invalid_argument);
}

TEST_CASE("mode names round trip") {
    for (Mode m : {Mode::Single, Mode::FixedSequence, Mode::LutSequence,
                   Mode::Random})
        CHECK(mode_from_string(to_string(m)) == m);
    CHECK(to_string(Mode::LutSequence) == "lut-sequence");
    CHECK_THROWS_AS(static_cast<void>(mode_from_string("burst")),
                    std::invalid_argument);
}

TEST_CASE("validation names the offending field") {
    RunConfig cfg;
    cfg.mode = Mode::Single;
    cfg.high_bits = 10;
    cfg.total_bits = 20;
    cfg.output_path = temp_dir() / "v.dtcb";
    CHECK(error_field(cfg).empty());

    RunConfig bad = cfg;
    bad.output_path.clear();
    CHECK(error_field(bad) == "output");

    bad = cfg;
    bad.frame_width = 65;
    CHECK(error_field(bad) == "frame-width");

    bad = cfg;
    bad.high_bits = 30;
    CHECK(error_field(bad) == "high");

    bad = cfg;
    bad.range_min_bits = 0;
    CHECK(error_field(bad) == "range-min");

    bad = cfg;
    bad.range_min_bits = 100;
    bad.range_max_bits = 50;
    CHECK(error_field(bad) == "range-min");

    bad = cfg;
    bad.mode = Mode::FixedSequence;
    bad.count = 1001;
    CHECK(error_field(bad) == "count");

    bad = cfg;
    bad.mode = Mode::FixedSequence;
    bad.count = 0;
    CHECK(error_field(bad) == "count");

    bad = cfg;
    bad.mode = Mode::LutSequence;
    CHECK(error_field(bad) == "lut");

    bad = cfg;
    bad.mode = Mode::LutSequence;
    bad.lut_codes = {1, 2, 3};
    bad.accumulator.depth_bits = 0;
    CHECK(error_field(bad) == "acc-depth");

    bad = cfg;
    bad.mode = Mode::LutSequence;
    bad.lut_codes = {1, 2, 3};
    bad.accumulator.control_word = 4096;
    CHECK(error_field(bad) == "acc-control");

    bad = cfg;
    bad.mode = Mode::LutSequence;
    bad.lut_codes = {1, 2, 3};
    bad.accumulator.initial_phase = 4096;
    CHECK(error_field(bad) == "acc-phase");

    bad = cfg;
    bad.mode = Mode::Random;
    bad.bank.resize(3);
    CHECK(error_field(bad) == "bank");
}

TEST_CASE("manifests round trip the resolved configuration") {
    RunConfig cfg;
    cfg.mode = Mode::LutSequence;
    cfg.line_rate_bps = 12'500'000'000ull;
    cfg.frame_width = 16;
    cfg.count = 36;
    cfg.lut_codes = {0, 5, 9, 200};
    cfg.accumulator.depth_bits = 12;
    cfg.accumulator.control_word = 1024;
    cfg.accumulator.sample_rate_hz = 156.25e6;
    cfg.accumulator.initial_phase = 3072;
    cfg.mapping = CodeMapping{12, 25};
    cfg.range_min_bits = 5;
    cfg.range_max_bits = 500;
    cfg.output_path = temp_dir() / "m.dtcb";

    const auto path = temp_dir() / "m.manifest.json";
    write_manifest(path, cfg);
    const RunConfig back = read_manifest(path);

    CHECK(back.mode == Mode::LutSequence);
    CHECK(back.line_rate_bps == cfg.line_rate_bps);
    CHECK(back.frame_width == cfg.frame_width);
    CHECK(back.count == cfg.count);
    CHECK(back.lut_codes == cfg.lut_codes);
    CHECK(back.accumulator.depth_bits == 12);
    CHECK(back.accumulator.control_word == 1024);
    CHECK(back.accumulator.sample_rate_hz == doctest::Approx(156.25e6));
    REQUIRE(back.accumulator.initial_phase.has_value());
    CHECK(*back.accumulator.initial_phase == 3072);
    CHECK(back.mapping.high_offset == 12);
    CHECK(back.mapping.low_bits == 25);
    CHECK(back.range_min_bits == 5);
    CHECK(back.range_max_bits == 500);
    CHECK(back.output_path == cfg.output_path);

    CHECK_THROWS_AS(static_cast<void>(read_manifest(temp_dir() / "absent.json")),
                    std::runtime_error);
}

TEST_CASE("synthesis writes the bitstream and a replayable manifest") {
    std::ostringstream log;
    RunConfig cfg;
    cfg.mode = Mode::Random;
    cfg.count = 500;
    cfg.output_path = temp_dir() / "a.dtcb";

    const SynthSummary summary = run_synth(cfg, log);
    CHECK(summary.pulses == 500);
    CHECK(std::filesystem::exists(summary.output_path));
    CHECK(std::filesystem::exists(summary.manifest_path));
    CHECK(summary.manifest_path == temp_dir() / "a.dtcb.manifest.json");
    CHECK(log.str().find("wrote") != std::string::npos);

    // every decoded width must respect the configured mapping and range
    const BitstreamFile file = read_bitstream_file(summary.output_path);
    const auto decoded = decode_intervals(file.stream);
    REQUIRE(decoded.intervals.size() == 500);
    for (const auto& m : decoded.intervals) {
        REQUIRE(m.width_bits >= 10);
        REQUIRE(m.width_bits <= 10 + 4095);
    }

    RunConfig replay = read_manifest(summary.manifest_path);
    replay.output_path = temp_dir() / "b.dtcb";
    replay.manifest_path.clear();
    const SynthSummary again = run_synth(replay, log);
    CHECK(slurp(again.output_path) == slurp(summary.output_path));
}

TEST_CASE("synthesis enforces the dynamic range guardrail") {
    std::ostringstream log;
    RunConfig cfg;
    cfg.mode = Mode::Single;
    cfg.high_bits = 5;  // half a nanosecond, below the 1 ns floor
    cfg.total_bits = 20;
    cfg.output_path = temp_dir() / "oor.dtcb";
    std::filesystem::remove(cfg.output_path);
    CHECK_THROWS_AS(static_cast<void>(run_synth(cfg, log)), std::invalid_argument);
    CHECK_FALSE(std::filesystem::exists(cfg.output_path));

    cfg.high_bits = 10;
    cfg.total_bits = 500'000;  // 50 us period, beyond the 40 us ceiling
    CHECK_THROWS_AS(static_cast<void>(run_synth(cfg, log)), std::invalid_argument);

    cfg.total_bits = 20;
    CHECK_NOTHROW(static_cast<void>(run_synth(cfg, log)));
}

TEST_CASE("analysis reports widths and gates on the expected cycle") {
    std::ostringstream log;
    RunConfig cfg;
    cfg.mode = Mode::LutSequence;
    cfg.lut_codes = {0, 1, 2, 3, 4, 5, 6, 7, 8};
    cfg.count = 18;
    cfg.output_path = temp_dir() / "lut.dtcb";
    const SynthSummary summary = run_synth(cfg, log);

    AnalyzeOptions opt;
    opt.input_path = summary.output_path;
    opt.summary_json = temp_dir() / "lut.json";
    opt.intervals_csv = temp_dir() / "lut.csv";
    opt.expected_cycle = {10, 11, 12, 13, 14, 15, 16, 17, 18};
    CHECK(run_analyze(opt, log) == kExitOk);
    CHECK(std::filesystem::exists(opt.summary_json));
    CHECK(std::filesystem::exists(opt.intervals_csv));
    CHECK(log.str().find("confirmed") != std::string::npos);

    opt.expected_cycle = {10, 11, 12};
    CHECK(run_analyze(opt, log) == kExitCheckFailed);
}

TEST_CASE("analysis runs the uniformity test on recovered codes") {
    std::ostringstream log;
    RunConfig cfg;
    cfg.mode = Mode::Random;
    cfg.count = 2000;
    cfg.output_path = temp_dir() / "rand.dtcb";
    const SynthSummary summary = run_synth(cfg, log);

    AnalyzeOptions opt;
    opt.input_path = summary.output_path;
    opt.uniformity = true;
    opt.bins = 10;
    CHECK(run_analyze(opt, log) == kExitOk);
    CHECK(log.str().find("chi-square") != std::string::npos);

    AnalyzeOptions missing;
    missing.input_path = temp_dir() / "missing.dtcb";
    CHECK_THROWS_AS(static_cast<void>(run_analyze(missing, log)),
                    std::runtime_error);
}

TEST_CASE("the built-in property suite passes") {
    std::ostringstream log;
    CHECK(run_selftest(150, 20260822, log) == 0);
    CHECK(log.str().find("ok") != std::string::npos);
}
