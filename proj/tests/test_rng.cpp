#include "doctest.h"

#include "qsim/rng.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

using namespace qsim;

TEST_CASE("keyed bijection matches the published known-answer vectors") {
    const std::array<std::uint32_t, 4> zero_ctr{0, 0, 0, 0};
    const std::array<std::uint32_t, 2> zero_key{0, 0};
    CHECK(philox4x32_10(zero_ctr, zero_key) ==
          std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});

    const std::array<std::uint32_t, 4> ff_ctr{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu};
    const std::array<std::uint32_t, 2> ff_key{0xffffffffu, 0xffffffffu};
    CHECK(philox4x32_10(ff_ctr, ff_key) ==
          std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});

    const std::array<std::uint32_t, 4> pi_ctr{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u};
    const std::array<std::uint32_t, 2> pi_key{0xa4093822u, 0x299f31d0u};
    CHECK(philox4x32_10(pi_ctr, pi_key) ==
          std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("engines addressed by the same triple replay the same stream") {
    PhiloxEngine a(0x123456789abcdef0ull, 7, StreamRole::Service);
    PhiloxEngine b(0x123456789abcdef0ull, 7, StreamRole::Service);
    for (int i = 0; i < 64; ++i) CHECK(a() == b());
}

TEST_CASE("distinct roles, replications, and seeds give distinct streams") {
    const std::uint64_t seed = 42;
    PhiloxEngine base(seed, 0, StreamRole::Arrival);
    PhiloxEngine role(seed, 0, StreamRole::Abandon);
    PhiloxEngine rep(seed, 1, StreamRole::Arrival);
    PhiloxEngine other_seed(seed + 1, 0, StreamRole::Arrival);

    const std::uint64_t first = base();
    CHECK(first != role());
    CHECK(first != rep());
    CHECK(first != other_seed());
}

TEST_CASE("uniform draws stay strictly inside the open unit interval") {
    PhiloxEngine eng(2024, 3, StreamRole::Misc);
    for (int i = 0; i < 20000; ++i) {
        double u = eng.uniform01();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("exponential and normal transforms have the right first moments") {
    PhiloxEngine eng(99, 0, StreamRole::Misc);
    const int n = 40000;

    double esum = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = eng.exponential(2.0);
        CHECK(x > 0.0);
        esum += x;
    }
    CHECK(esum / n == doctest::Approx(0.5).epsilon(0.02));

    double zsum = 0.0, zsq = 0.0;
    for (int i = 0; i < n; ++i) {
        double z = eng.normal();
        zsum += z;
        zsq += z * z;
    }
    double mean = zsum / n;
    double var = zsq / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(var == doctest::Approx(1.0).epsilon(0.03));
}
