#include "dtcsim/lfsr.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <stdexcept>

namespace dtcsim {

Lfsr::Lfsr(unsigned degree, std::span<const unsigned> taps, std::uint32_t seed)
    : degree_(degree), taps_(taps.begin(), taps.end()), tap_mask_(0), state_(seed) {
    if (degree_ < 2 || degree_ > 31)
        throw std::invalid_argument("LFSR degree must be 2..31");
    if (taps_.empty())
        throw std::invalid_argument("LFSR needs at least one feedback tap");
    for (unsigned t : taps_) {
        if (t < 1 || t > degree_)
            throw std::invalid_argument("tap position outside 1..degree");
        tap_mask_ |= 1u << (degree_ - t);
    }
    const std::uint32_t mask = (degree_ >= 32) ? ~0u : ((1u << degree_) - 1);
    if (state_ == 0 || state_ > mask)
        throw std::invalid_argument("LFSR seed must be a nonzero n-bit word");
}

unsigned Lfsr::step() noexcept {
    const unsigned out = (state_ >> (degree_ - 1)) & 1u;
    const unsigned fb = std::popcount(state_ & tap_mask_) & 1u;
    state_ = (state_ >> 1) | (fb << (degree_ - 1));
    return out;
}

std::uint64_t Lfsr::period() const {
    Lfsr copy = *this;
    const std::uint32_t start = copy.state_;
    std::uint64_t count = 0;
    const std::uint64_t bound = (std::uint64_t{1} << degree_) + 1;
    do {
        copy.step();
        ++count;
    } while (copy.state_ != start && count < bound);
    return count;
}

LfsrBank::LfsrBank(std::span<const LfsrSpec> specs) {
    if (specs.size() != kBankWidth)
        throw std::invalid_argument("bank needs exactly 12 registers");
    std::set<unsigned> degrees;
    lfsrs_.reserve(specs.size());
    for (const auto& s : specs) {
        if (!degrees.insert(s.degree).second)
            throw std::invalid_argument("bank degrees must be pairwise distinct");
        const std::uint32_t seed =
            s.seed != 0 ? s.seed
                        : static_cast<std::uint32_t>((std::uint64_t{1} << s.degree) - 1);
        lfsrs_.emplace_back(s.degree, s.taps, seed);
    }
}

std::uint32_t LfsrBank::sample() noexcept {
    std::uint32_t word = 0;
    for (unsigned j = 0; j < kBankWidth; ++j)
        word |= lfsrs_[j].step() << j;
    return word;
}

namespace {

// Maximal-length tap sets, one per degree. Verified by enumeration in the
// test suite; small degrees are used by the period checks, 9..20 by the bank.
struct TapRow {
    unsigned degree;
    unsigned taps[4];  // zero-terminated
};

constexpr TapRow kTapTable[] = {
    {2, {2, 1, 0, 0}},     {3, {3, 2, 0, 0}},      {4, {4, 3, 0, 0}},
    {5, {5, 3, 0, 0}},     {6, {6, 5, 0, 0}},      {7, {7, 6, 0, 0}},
    {8, {8, 6, 5, 4}},     {9, {9, 5, 0, 0}},      {10, {10, 7, 0, 0}},
    {11, {11, 9, 0, 0}},   {12, {12, 6, 4, 1}},    {13, {13, 4, 3, 1}},
    {14, {14, 5, 3, 1}},   {15, {15, 14, 0, 0}},   {16, {16, 15, 13, 4}},
    {17, {17, 14, 0, 0}},  {18, {18, 11, 0, 0}},   {19, {19, 6, 2, 1}},
    {20, {20, 17, 0, 0}},
};

}  // namespace

std::vector<unsigned> primitive_taps(unsigned degree) {
    for (const auto& row : kTapTable) {
        if (row.degree != degree) continue;
        std::vector<unsigned> taps;
        for (unsigned t : row.taps)
            if (t != 0) taps.push_back(t);
        return taps;
    }
    throw std::out_of_range("no shipped tap set for degree " + std::to_string(degree));
}

std::vector<LfsrSpec> default_bank_specs() {
    std::vector<LfsrSpec> specs;
    specs.reserve(kBankWidth);
    for (unsigned degree = 9; degree <= 20; ++degree)
        specs.push_back({degree, primitive_taps(degree), 0});
    return specs;
}

LfsrBank default_bank() {
    const auto specs = default_bank_specs();
    return LfsrBank(specs);
}

std::uint64_t combined_period_u64(std::span<const unsigned> degrees) {
    unsigned __int128 product = 1;
    for (unsigned n : degrees) {
        if (n < 1 || n > 63)
            throw std::invalid_argument("degree must be 1..63");
        product *= (std::uint64_t{1} << n) - 1;
        if (product > static_cast<unsigned __int128>(~std::uint64_t{0}))
            throw std::overflow_error("combined period exceeds 64 bits");
    }
    return static_cast<std::uint64_t>(product);
}

std::string combined_period_dec(std::span<const unsigned> degrees) {
    // Schoolbook product over base-1e9 limbs, least significant first.
    std::vector<std::uint32_t> limbs{1};
    constexpr std::uint64_t kBase = 1000000000;
    for (unsigned n : degrees) {
        if (n < 1 || n > 63)
            throw std::invalid_argument("degree must be 1..63");
        const std::uint64_t factor = (std::uint64_t{1} << n) - 1;
        unsigned __int128 carry = 0;
        for (auto& limb : limbs) {
            carry += static_cast<unsigned __int128>(limb) * factor;
            limb = static_cast<std::uint32_t>(carry % kBase);
            carry /= kBase;
        }
        while (carry != 0) {
            limbs.push_back(static_cast<std::uint32_t>(carry % kBase));
            carry /= kBase;
        }
    }
    std::string out = std::to_string(limbs.back());
    for (auto it = limbs.rbegin() + 1; it != limbs.rend(); ++it) {
        std::string chunk = std::to_string(*it);
        out += std::string(9 - chunk.size(), '0') + chunk;
    }
    return out;
}

std::uint64_t joint_period(std::span<const Lfsr> lfsrs, std::uint64_t limit) {
    if (lfsrs.empty())
        throw std::invalid_argument("joint period of an empty bank");
    std::vector<Lfsr> regs(lfsrs.begin(), lfsrs.end());
    std::vector<std::uint32_t> start;
    start.reserve(regs.size());
    for (const auto& l : regs) start.push_back(l.state());
    for (std::uint64_t count = 1; count <= limit; ++count) {
        bool back = true;
        for (std::size_t i = 0; i < regs.size(); ++i) {
            regs[i].step();
            back = back && regs[i].state() == start[i];
        }
        if (back) return count;
    }
    throw std::runtime_error("joint period exceeds search limit");
}

std::vector<TimingParameter> random_parameters(LfsrBank& bank, std::size_t count,
                                               const CodeMapping& mapping) {
    mapping.validate(kBankWidth);
    std::vector<TimingParameter> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(mapping.map(bank.sample()));
    return out;
}

}  // namespace dtcsim
