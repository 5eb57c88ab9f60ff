#include <doctest.h>

#include <cmath>
#include <set>
#include <utility>

#include "ovsafe/mc.hpp"
#include "ovsafe/rng.hpp"

using namespace ovsafe;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using C = Philox4x32::Counter;
  CHECK(Philox4x32::apply({0, 0, 0, 0}, {0, 0}) ==
        C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::apply({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                          {0xffffffffu, 0xffffffffu}) ==
        C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32::apply({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                          {0xa4093822u, 0x299f31d0u}) ==
        C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("normal stream moments") {
  NormalStream s({12345, 7});
  const int n = 200000;
  double sum = 0, sum2 = 0, sum4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal(static_cast<std::uint64_t>(i));
    sum += z;
    sum2 += z * z;
    sum4 += z * z * z * z;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 5.0 / std::sqrt(n));
  CHECK(std::abs(var - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(sum4 / n - 3.0) < 5.0 * std::sqrt(96.0 / n));
}

TEST_CASE("stream values are addressed by index") {
  NormalStream a({1, 2});
  NormalStream b({1, 2});
  const double forward = a.normal(10);
  b.normal(999);
  b.refinement_normal(10);
  CHECK(b.normal(10) == forward);
  CHECK(a.refinement_normal(10) != forward);
  NormalStream other_trial({1, 3});
  NormalStream other_seed({2, 2});
  CHECK(other_trial.normal(10) != forward);
  CHECK(other_seed.normal(10) != forward);
  CHECK(NormalStream::to_unit_open(0, 0) > 0.0);
  CHECK(NormalStream::to_unit_open(0xffffffffu, 0xffffffffu) <= 1.0);
}

TEST_CASE("sweep streams are disjoint") {
  std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
  for (std::size_t cell = 0; cell < 24; ++cell) {
    for (std::size_t trial = 0; trial < 2000; ++trial) {
      const StreamId id = sweep_stream(99, cell, trial);
      CHECK(id.seed == 99);
      seen.insert({id.seed, id.trial});
    }
  }
  CHECK(seen.size() == 24u * 2000u);
  // Largest indices still map to distinct ids.
  CHECK(!(sweep_stream(0, 1, 0) == sweep_stream(0, 0, 0xffffffffu)));
}

TEST_CASE("mix_seed") {
  CHECK(mix_seed(0) != mix_seed(1));
  static_assert(mix_seed(0) == 0xe220a8397b1dcdafull);
}
