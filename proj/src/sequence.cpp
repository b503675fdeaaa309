#include "dtcsim/sequence.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dtcsim {

PhaseAccumulator::PhaseAccumulator(unsigned depth_bits, std::uint64_t control_word,
                                   double sample_rate_hz, std::uint64_t initial_phase)
    : depth_bits_(depth_bits),
      control_word_(control_word),
      phase_(initial_phase),
      sample_rate_hz_(sample_rate_hz) {
    if (depth_bits_ < 1 || depth_bits_ > 63)
        throw std::invalid_argument("accumulator depth must be 1..63 bits");
    if (control_word_ < 1 || control_word_ >= modulus())
        throw std::invalid_argument("control word must satisfy 1 <= K < 2^D");
    if (!(sample_rate_hz_ > 0.0))
        throw std::invalid_argument("sample rate must be positive");
    if (initial_phase >= modulus())
        throw std::invalid_argument("initial phase must be below 2^D");
}

std::uint64_t PhaseAccumulator::step() noexcept {
    phase_ = (phase_ + control_word_) & (modulus() - 1);
    return phase_;
}

std::size_t PhaseAccumulator::step_index(std::size_t table_size) {
    if (table_size == 0)
        throw std::invalid_argument("table size must be positive");
    const std::uint64_t p = step();
    // floor(table_size * phase / 2^D); 128-bit product since D may reach 63.
    const auto wide = static_cast<unsigned __int128>(p) * table_size;
    return static_cast<std::size_t>(wide >> depth_bits_);
}

std::uint64_t PhaseAccumulator::traversal_steps() const noexcept {
    return modulus() / std::gcd(control_word_, modulus());
}

double PhaseAccumulator::sequence_length_s() const {
    if (control_word_ == 0)
        throw std::invalid_argument("control word must be nonzero");
    return std::ldexp(1.0, static_cast<int>(depth_bits_)) /
           (static_cast<double>(control_word_) * sample_rate_hz_);
}

std::uint64_t control_word_for_sweep(unsigned depth_bits, std::size_t table_size) {
    if (table_size == 0)
        throw std::invalid_argument("table size must be positive");
    const std::uint64_t mod = std::uint64_t{1} << depth_bits;
    if (table_size == 1) return 1;
    if (table_size > mod)
        throw std::invalid_argument("table larger than accumulator range");
    return (mod + table_size - 1) / table_size;  // ceil(2^D / N)
}

std::uint64_t sweep_start_phase(unsigned depth_bits, std::uint64_t control_word) {
    const std::uint64_t mod = std::uint64_t{1} << depth_bits;
    if (control_word < 1 || control_word >= mod)
        throw std::invalid_argument("control word must satisfy 1 <= K < 2^D");
    return mod - control_word;
}

ParameterLut ParameterLut::from_codes(std::span<const std::uint32_t> codes,
                                      const CodeMapping& mapping) {
    ParameterLut lut;
    lut.entries.reserve(codes.size());
    for (std::size_t i = 0; i < codes.size(); ++i) {
        TimingParameter p = mapping.map(codes[i]);
        check_parameter(p, " from LUT code #" + std::to_string(i));
        lut.entries.push_back(p);
    }
    return lut;
}

std::vector<std::uint32_t> load_lut_codes(const std::filesystem::path& path,
                                          std::size_t capacity) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open LUT file: " + path.string());
    std::vector<std::uint32_t> codes;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const auto begin = line.find_first_not_of(" \t\r,");
        if (begin == std::string::npos) continue;
        const auto end = line.find_last_not_of(" \t\r,");
        const std::string tok = line.substr(begin, end - begin + 1);
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(tok, &used, 0);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size())
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected one interval code per line, got '" +
                                     tok + "'");
        if (v > 0xFFF)
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": code " + std::to_string(v) +
                                     " exceeds 12 bits");
        if (codes.size() == capacity)
            throw std::runtime_error(path.string() + ": more than " +
                                     std::to_string(capacity) + " entries");
        codes.push_back(static_cast<std::uint32_t>(v));
    }
    return codes;
}

ParameterLut load_lut_file(const std::filesystem::path& path,
                           const CodeMapping& mapping, std::size_t capacity) {
    const auto codes = load_lut_codes(path, capacity);
    return ParameterLut::from_codes(codes, mapping);
}

std::vector<TimingParameter> generate_fixed(const TimingParameter& interval,
                                            std::size_t count, std::size_t max_count) {
    check_parameter(interval);
    if (count < 1 || count > max_count)
        throw std::invalid_argument("fixed-sequence count must be 1.." +
                                    std::to_string(max_count));
    return std::vector<TimingParameter>(count, interval);
}

std::vector<TimingParameter> generate_sequence(const ParameterLut& lut,
                                               PhaseAccumulator& acc,
                                               std::size_t count) {
    if (lut.entries.empty())
        throw std::invalid_argument("parameter LUT is empty");
    std::vector<TimingParameter> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(lut.entries[acc.step_index(lut.entries.size())]);
    return out;
}

}  // namespace dtcsim
