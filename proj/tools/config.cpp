#include "config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace dtcsim::cli {

namespace {

using u128 = unsigned __int128;

constexpr std::uint64_t kMaxU64 = std::numeric_limits<std::uint64_t>::max();

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// Splits a trailing SI suffix (s, ms, us, ns, ps) off a time literal and
// returns its decimal exponent. No suffix reads as seconds.
int split_suffix(std::string& num) {
    if (num.empty() || num.back() != 's') return 0;
    num.pop_back();
    if (num.empty()) throw std::invalid_argument("time literal has no value");
    switch (num.back()) {
        case 'p': num.pop_back(); return -12;
        case 'n': num.pop_back(); return -9;
        case 'u': num.pop_back(); return -6;
        case 'm': num.pop_back(); return -3;
        default: return 0;
    }
}

struct DecimalValue {
    u128 mantissa = 0;  // significant digits, decimal point removed
    int exponent = 0;   // value = mantissa * 10^exponent
};

DecimalValue parse_decimal(const std::string& text) {
    const std::string what = "bad time literal '" + text + "'";
    std::size_t i = 0;
    const std::size_t n = text.size();
    if (i < n && (text[i] == '+' || text[i] == '-')) {
        if (text[i] == '-')
            throw std::invalid_argument(what + ": time must be nonnegative");
        ++i;
    }
    DecimalValue v;
    bool any_digit = false;
    bool seen_point = false;
    int significant = 0;
    int frac_digits = 0;
    for (; i < n; ++i) {
        const char c = text[i];
        if (c == '.') {
            if (seen_point) throw std::invalid_argument(what);
            seen_point = true;
            continue;
        }
        if (c < '0' || c > '9') break;
        any_digit = true;
        if (seen_point) ++frac_digits;
        if (v.mantissa == 0 && c == '0') continue;  // leading zeros
        if (++significant > 30)
            throw std::invalid_argument(what + ": too many digits");
        v.mantissa = v.mantissa * 10 + static_cast<unsigned>(c - '0');
    }
    if (!any_digit) throw std::invalid_argument(what);
    int exp = 0;
    if (i < n && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        bool neg = false;
        if (i < n && (text[i] == '+' || text[i] == '-')) neg = text[i++] == '-';
        if (i >= n) throw std::invalid_argument(what);
        for (; i < n; ++i) {
            const char c = text[i];
            if (c < '0' || c > '9') throw std::invalid_argument(what);
            exp = exp * 10 + (c - '0');
            if (exp > 99) throw std::invalid_argument(what + ": exponent out of range");
        }
        if (neg) exp = -exp;
    }
    if (i != n) throw std::invalid_argument(what);
    v.exponent = exp - frac_digits;
    return v;
}

}  // namespace

std::uint64_t parse_time_to_bits(const std::string& text, std::uint64_t rate_bps) {
    if (rate_bps == 0) throw std::invalid_argument("line rate must be positive");
    std::string num = trim(text);
    const int suffix_exp = split_suffix(num);
    DecimalValue v = parse_decimal(num);
    if (v.mantissa == 0) return 0;
    int exp = v.exponent + suffix_exp;

    const std::string not_whole =
        "'" + trim(text) + "' is not a whole number of bit periods at " +
        std::to_string(rate_bps) + " bps";
    const std::string too_large = "'" + trim(text) + "' is out of range";

    u128 mantissa = v.mantissa;
    u128 rate = rate_bps;
    for (; exp > 0; --exp) {
        if (mantissa > std::numeric_limits<u128>::max() / 10)
            throw std::invalid_argument(too_large);
        mantissa *= 10;
    }
    // bits = mantissa * rate / 10^-exp, required exact; peel one factor of
    // 10 = 2*5 at a time from either operand.
    for (; exp < 0; ++exp) {
        if (mantissa % 2 == 0) mantissa /= 2;
        else if (rate % 2 == 0) rate /= 2;
        else throw std::invalid_argument(not_whole);
        if (mantissa % 5 == 0) mantissa /= 5;
        else if (rate % 5 == 0) rate /= 5;
        else throw std::invalid_argument(not_whole);
    }
    if (mantissa > std::numeric_limits<u128>::max() / rate)
        throw std::invalid_argument(too_large);
    const u128 bits = mantissa * rate;
    if (bits > kMaxU64) throw std::invalid_argument(too_large);
    return static_cast<std::uint64_t>(bits);
}

double parse_time_seconds(const std::string& text) {
    std::string num = trim(text);
    const int suffix_exp = split_suffix(num);
    DecimalValue v = parse_decimal(num);
    return static_cast<double>(v.mantissa) *
           std::pow(10.0, v.exponent + suffix_exp);
}

std::uint64_t integral_rate(double rate_bps, const std::string& field) {
    if (!(rate_bps >= 1.0) || rate_bps > 1e15)
        throw std::invalid_argument(field + ": rate must be in [1, 1e15] Hz");
    if (rate_bps != std::floor(rate_bps))
        throw std::invalid_argument(field + ": rate must be a whole number of hertz");
    return static_cast<std::uint64_t>(rate_bps);
}

std::string to_string(Mode mode) {
    switch (mode) {
        case Mode::Single: return "single";
        case Mode::FixedSequence: return "fixed-sequence";
        case Mode::LutSequence: return "lut-sequence";
        case Mode::Random: return "random";
    }
    throw std::logic_error("unreachable mode");
}

Mode mode_from_string(const std::string& name) {
    if (name == "single") return Mode::Single;
    if (name == "fixed-sequence") return Mode::FixedSequence;
    if (name == "lut-sequence") return Mode::LutSequence;
    if (name == "random") return Mode::Random;
    throw std::invalid_argument(
        "mode: '" + name +
        "' is not one of single, fixed-sequence, lut-sequence, random");
}

void validate(const RunConfig& cfg) {
    if (cfg.frame_width < kMinFrameWidth || cfg.frame_width > kMaxFrameWidth)
        throw std::invalid_argument("frame-width: must be 2..64");
    if (cfg.line_rate_bps == 0)
        throw std::invalid_argument("rate: must be positive");
    if (cfg.range_min_bits == 0)
        throw std::invalid_argument("range-min: must be at least one bit period");
    if (cfg.range_min_bits > cfg.range_max_bits)
        throw std::invalid_argument("range-min: exceeds range-max");
    if (cfg.output_path.empty())
        throw std::invalid_argument("output: required");

    constexpr std::uint64_t kMaxPulses = 1u << 24;
    const bool counted = cfg.mode != Mode::Single;
    if (counted && cfg.count == 0)
        throw std::invalid_argument("count: must be at least 1");
    if (counted && cfg.count > kMaxPulses)
        throw std::invalid_argument("count: at most " + std::to_string(kMaxPulses) +
                                    " pulses per run");

    switch (cfg.mode) {
        case Mode::Single:
        case Mode::FixedSequence: {
            if (cfg.total_bits == 0)
                throw std::invalid_argument("total: required for this mode");
            if (cfg.high_bits > cfg.total_bits)
                throw std::invalid_argument("high: exceeds total");
            if (cfg.mode == Mode::FixedSequence && cfg.count > kDefaultMaxFixedCount)
                throw std::invalid_argument(
                    "count: fixed-sequence repetition is limited to " +
                    std::to_string(kDefaultMaxFixedCount));
            break;
        }
        case Mode::LutSequence: {
            if (cfg.lut_codes.empty() && cfg.lut_path.empty())
                throw std::invalid_argument("lut: a table file is required");
            const auto& acc = cfg.accumulator;
            if (acc.depth_bits < 1 || acc.depth_bits > 63)
                throw std::invalid_argument("acc-depth: must be 1..63");
            const std::uint64_t modulus = std::uint64_t{1} << acc.depth_bits;
            if (acc.control_word >= modulus)
                throw std::invalid_argument("acc-control: must be below 2^depth");
            if (acc.initial_phase && *acc.initial_phase >= modulus)
                throw std::invalid_argument("acc-phase: must be below 2^depth");
            break;
        }
        case Mode::Random: {
            if (!cfg.bank.empty() && cfg.bank.size() != kBankWidth)
                throw std::invalid_argument(
                    "bank: exactly " + std::to_string(kBankWidth) +
                    " registers are required");
            break;
        }
    }
}

namespace {

using nlohmann::json;

json mapping_to_json(const CodeMapping& m) {
    return json{{"high_offset", m.high_offset}, {"low_bits", m.low_bits}};
}

CodeMapping mapping_from_json(const json& j) {
    CodeMapping m;
    m.high_offset = j.at("high_offset").get<std::uint64_t>();
    m.low_bits = j.at("low_bits").get<std::uint64_t>();
    return m;
}

}  // namespace

void write_manifest(const std::filesystem::path& path, const RunConfig& cfg) {
    json j;
    j["format_version"] = 1;
    j["mode"] = to_string(cfg.mode);
    j["line_rate_bps"] = cfg.line_rate_bps;
    j["frame_width"] = cfg.frame_width;
    j["range_bits"] = json{{"min", cfg.range_min_bits}, {"max", cfg.range_max_bits}};
    j["output"] = cfg.output_path.string();
    switch (cfg.mode) {
        case Mode::Single:
            j["interval"] =
                json{{"high_bits", cfg.high_bits}, {"total_bits", cfg.total_bits}};
            break;
        case Mode::FixedSequence:
            j["interval"] =
                json{{"high_bits", cfg.high_bits}, {"total_bits", cfg.total_bits}};
            j["count"] = cfg.count;
            break;
        case Mode::LutSequence: {
            j["count"] = cfg.count;
            j["mapping"] = mapping_to_json(cfg.mapping);
            json acc;
            acc["depth_bits"] = cfg.accumulator.depth_bits;
            acc["control_word"] = cfg.accumulator.control_word;
            acc["sample_rate_hz"] = cfg.accumulator.sample_rate_hz;
            acc["initial_phase"] = cfg.accumulator.initial_phase.value_or(0);
            j["lut"] = json{{"codes", cfg.lut_codes}, {"accumulator", acc}};
            break;
        }
        case Mode::Random: {
            j["count"] = cfg.count;
            j["mapping"] = mapping_to_json(cfg.mapping);
            json bank = json::array();
            for (const auto& spec : cfg.bank) {
                bank.push_back(json{{"degree", spec.degree},
                                    {"taps", spec.taps},
                                    {"seed", spec.seed}});
            }
            j["bank"] = bank;
            break;
        }
    }

    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for write: " + tmp.string());
        out << j.dump(2) << '\n';
        if (!out.flush()) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

RunConfig read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    json j = json::parse(in);  // json::parse_error on malformed input
    if (j.at("format_version").get<int>() != 1)
        throw std::runtime_error(path.string() + ": unsupported manifest version");

    RunConfig cfg;
    cfg.mode = mode_from_string(j.at("mode").get<std::string>());
    cfg.line_rate_bps = j.at("line_rate_bps").get<std::uint64_t>();
    cfg.frame_width = j.at("frame_width").get<unsigned>();
    cfg.range_min_bits = j.at("range_bits").at("min").get<std::uint64_t>();
    cfg.range_max_bits = j.at("range_bits").at("max").get<std::uint64_t>();
    cfg.output_path = j.at("output").get<std::string>();
    switch (cfg.mode) {
        case Mode::Single:
        case Mode::FixedSequence:
            cfg.high_bits = j.at("interval").at("high_bits").get<std::uint64_t>();
            cfg.total_bits = j.at("interval").at("total_bits").get<std::uint64_t>();
            if (cfg.mode == Mode::FixedSequence)
                cfg.count = j.at("count").get<std::uint64_t>();
            break;
        case Mode::LutSequence: {
            cfg.count = j.at("count").get<std::uint64_t>();
            cfg.mapping = mapping_from_json(j.at("mapping"));
            const json& lut = j.at("lut");
            cfg.lut_codes = lut.at("codes").get<std::vector<std::uint32_t>>();
            const json& acc = lut.at("accumulator");
            cfg.accumulator.depth_bits = acc.at("depth_bits").get<unsigned>();
            cfg.accumulator.control_word = acc.at("control_word").get<std::uint64_t>();
            cfg.accumulator.sample_rate_hz = acc.at("sample_rate_hz").get<double>();
            cfg.accumulator.initial_phase = acc.at("initial_phase").get<std::uint64_t>();
            break;
        }
        case Mode::Random: {
            cfg.count = j.at("count").get<std::uint64_t>();
            cfg.mapping = mapping_from_json(j.at("mapping"));
            for (const json& reg : j.at("bank")) {
                LfsrSpec spec;
                spec.degree = reg.at("degree").get<unsigned>();
                spec.taps = reg.at("taps").get<std::vector<unsigned>>();
                spec.seed = reg.at("seed").get<std::uint32_t>();
                cfg.bank.push_back(std::move(spec));
            }
            break;
        }
    }
    return cfg;
}

}  // namespace dtcsim::cli
