#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "dtcsim/lfsr.hpp"

using namespace dtcsim;

TEST_CASE("three-bit register walks its full state cycle") {
    const unsigned taps[] = {3, 2};
    Lfsr reg(3, taps, 0b001);

    // 001 -> 100 -> 010 -> 101 -> 110 -> 111 -> 011 -> 001, MSB out first
    const unsigned expect_out[] = {0, 1, 0, 1, 1, 1, 0};
    const std::uint32_t expect_state[] = {0b100, 0b010, 0b101, 0b110,
                                          0b111, 0b011, 0b001};
    for (int i = 0; i < 7; ++i) {
        CHECK(reg.step() == expect_out[i]);
        CHECK(reg.state() == expect_state[i]);
    }
    CHECK(reg.period() == 7);
    CHECK(reg.is_maximal());
}

TEST_CASE("maximality does not depend on the seed") {
    const unsigned taps[] = {3, 1};
    for (std::uint32_t seed = 1; seed < 8; ++seed)
        CHECK(Lfsr(3, taps, seed).period() == 7);
}

TEST_CASE("a reducible tap set falls short of the full period") {
    const unsigned taps[] = {4, 2};
    Lfsr reg(4, taps, 0b1111);
    CHECK(reg.period() == 6);
    CHECK_FALSE(reg.is_maximal());
}

TEST_CASE("every shipped tap set is maximal by enumeration") {
    for (unsigned degree = 2; degree <= 20; ++degree) {
        const auto taps = primitive_taps(degree);
        Lfsr reg(degree, taps, 1);
        CAPTURE(degree);
        CHECK(reg.is_maximal());
    }
    CHECK_THROWS_AS(static_cast<void>(primitive_taps(21)), std::out_of_range);
    CHECK_THROWS_AS(static_cast<void>(primitive_taps(1)), std::out_of_range);
}

TEST_CASE("register validation") {
    const unsigned taps[] = {3, 2};
    const unsigned bad_tap[] = {4};
    const unsigned zero_tap[] = {0};
    CHECK_THROWS_AS(Lfsr(1, taps, 1), std::invalid_argument);
    CHECK_THROWS_AS(Lfsr(32, taps, 1), std::invalid_argument);
    CHECK_THROWS_AS(Lfsr(3, {}, 1), std::invalid_argument);
    CHECK_THROWS_AS(Lfsr(3, bad_tap, 1), std::invalid_argument);
    CHECK_THROWS_AS(Lfsr(3, zero_tap, 1), std::invalid_argument);
    CHECK_THROWS_AS(Lfsr(3, taps, 0), std::invalid_argument);
    CHECK_THROWS_AS(Lfsr(3, taps, 0b1000), std::invalid_argument);
}

TEST_CASE("default bank spans degrees 9 through 20 with all-ones seeds") {
    const auto specs = default_bank_specs();
    REQUIRE(specs.size() == kBankWidth);
    for (unsigned j = 0; j < kBankWidth; ++j) {
        CHECK(specs[j].degree == 9 + j);
        CHECK(specs[j].seed == 0);
        CHECK(specs[j].taps == primitive_taps(9 + j));
    }
}

TEST_CASE("bank packs one output bit per register, lsb first") {
    LfsrBank bank = default_bank();
    // all-ones seeds put a 1 on every MSB, so the first word is full scale
    CHECK(bank.sample() == 0xFFF);
    CHECK(bank.sample() == 0x000);
    CHECK(bank.sample() == 0x438);
    CHECK(bank.sample() == 0x400);
}

TEST_CASE("bank requires twelve pairwise distinct degrees") {
    auto specs = default_bank_specs();
    specs.pop_back();
    CHECK_THROWS_AS(static_cast<void>(LfsrBank(specs)), std::invalid_argument);

    specs = default_bank_specs();
    specs[1] = specs[0];
    CHECK_THROWS_AS(static_cast<void>(LfsrBank(specs)), std::invalid_argument);
}

TEST_CASE("combined period multiplies the per-register periods") {
    const unsigned two[] = {2};
    const unsigned pair[] = {3, 4};
    CHECK(combined_period_u64(two) == 3);
    CHECK(combined_period_u64(pair) == 105);

    std::vector<unsigned> bank_degrees;
    for (unsigned d = 9; d <= 20; ++d) bank_degrees.push_back(d);
    CHECK_THROWS_AS(static_cast<void>(combined_period_u64(bank_degrees)),
                    std::overflow_error);
    CHECK(combined_period_dec(bank_degrees) ==
          "23851851191987616963846006035131222576961512432730625");
    CHECK(combined_period_dec(pair) == "105");
}

TEST_CASE("joint period matches the closed form on a small bank") {
    std::vector<Lfsr> regs;
    for (unsigned d : {3u, 4u, 5u})
        regs.emplace_back(d, primitive_taps(d), (1u << d) - 1);
    CHECK(joint_period(regs) == 3255);

    const unsigned degrees[] = {3, 4, 5};
    CHECK(combined_period_u64(degrees) == 3255);
}

TEST_CASE("random parameters map bank words through the code rule") {
    LfsrBank bank = default_bank();
    const auto params = random_parameters(bank, 3, CodeMapping{10, 20});
    REQUIRE(params.size() == 3);
    CHECK(params[0] == TimingParameter{0xFFF + 10, 0xFFF + 30});
    CHECK(params[1] == TimingParameter{10, 30});
    CHECK(params[2] == TimingParameter{0x438 + 10, 0x438 + 30});
    for (const auto& p : params) CHECK(p.valid());
}
