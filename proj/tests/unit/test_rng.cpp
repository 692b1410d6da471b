#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "mangrad/rng.hpp"

using mangrad::RngStream;

// Known-answer vectors of the Philox4x32-10 reference implementation.
TEST(Rng, PhiloxKnownAnswers) {
  using B = RngStream::Block;
  using K = RngStream::Key;
  EXPECT_EQ(RngStream::philox4x32_10(B{0, 0, 0, 0}, K{0, 0}),
            (B{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(RngStream::philox4x32_10(B{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                     K{0xffffffffu, 0xffffffffu}),
            (B{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(RngStream::philox4x32_10(B{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                     K{0xa4093822u, 0x299f31d0u}),
            (B{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Rng, SameAddressReplays) {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(Rng, DistinctStreamsDiffer) {
  std::set<std::uint64_t> first;
  for (std::uint64_t s = 0; s < 64; ++s) first.insert(RngStream(1, s)());
  EXPECT_EQ(first.size(), 64u);
  EXPECT_NE(RngStream(1, 0)(), RngStream(2, 0)());
}

TEST(Rng, UniformRangeAndMoments) {
  RngStream r(3, 0);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = r.uniform_open();
    ASSERT_GT(v, 0.0);
    ASSERT_LE(v, 1.0);
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(sq / n - (sum / n) * (sum / n), 1.0 / 12.0, 2e-3);
}

TEST(Rng, NormalMoments) {
  RngStream r(5, 1);
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  EXPECT_NEAR(s1 / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(s4 / n, 3.0, 5.0 * std::sqrt(96.0 / n));
}
