#include <doctest.h>

#include "torwave/rng.hpp"

using namespace torwave::rng;

TEST_SUITE("rng") {

// Known-answer vectors for Philox4x64-10, cross-checked against an
// independent implementation.
TEST_CASE("philox4x64-10 known answers")
{
    CHECK(philox4x64_10({0, 0, 0, 0}, {0, 0}) ==
          PhiloxBlock{0x16554d9eca36314cULL, 0xdb20fe9d672d0fdcULL, 0xd7e772cee186176bULL, 0x7e68b68aec7ba23bULL});

    const std::uint64_t ones = ~0ULL;
    CHECK(philox4x64_10({ones, ones, ones, ones}, {ones, ones}) ==
          PhiloxBlock{0x87b092c3013fe90bULL, 0x438c3c67be8d0224ULL, 0x9cc7d7c69cd777b6ULL, 0xa09caebf594f0ba0ULL});

    CHECK(philox4x64_10({0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL, 0xa4093822299f31d0ULL, 0x082efa98ec4e6c89ULL},
                        {0x452821e638d01377ULL, 0xbe5466cf34e90c6cULL}) ==
          PhiloxBlock{0xa528f45403e61d95ULL, 0x38c72dbd566e9788ULL, 0xa5a1610e72fd18b5ULL, 0x57bd43b5e52b7fe6ULL});

    CHECK(philox4x64_10({7, 3, 0, 0}, {42, 0x5eed}) ==
          PhiloxBlock{0xdc234a8d6cb7d0c3ULL, 0x09ef31b80ca33f34ULL, 0x7a10568e2f4a7cbaULL, 0x813cdabbaf6bac2fULL});
}

TEST_CASE("trial stream addresses blocks by (trial, index)")
{
    const TrialStream s(42, 0x5eed, 7);
    CHECK(s.block(3) == philox4x64_10({7, 3, 0, 0}, {42, 0x5eed}));
    for (std::uint64_t i = 0; i < 16; ++i) CHECK(s.word(i) == s.block(i / 4)[i % 4]);
    CHECK(TrialStream(42, 0x5eed, 8).block(0) != s.block(0));
    CHECK(TrialStream(43, 0x5eed, 7).block(0) != s.block(0));
}

TEST_CASE("open unit mapping stays strictly inside (0, 1)")
{
    CHECK(to_open_unit(0) > 0.0);
    CHECK(to_open_unit(~0ULL) < 1.0);
    CHECK(to_open_unit(~0ULL) == 1.0 - 0x1.0p-53);
    CHECK(to_open_unit(0) == 0x1.0p-53);
    CHECK(to_open_unit(1ULL << 63) == doctest::Approx(0.5).epsilon(1e-15));
}

}
