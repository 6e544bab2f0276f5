// Copyright 2026 The fndstack Authors
// SPDX-License-Identifier: Apache-2.0

#include "fndstack/random.hpp"

#include <cmath>

#include <gtest/gtest.h>

namespace fndstack {
namespace {

TEST(Fnv1a, PublishedVectors) {
  // Reference values of 64-bit FNV-1a.
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(DeriveSeed, NamesSeparateStreams) {
  EXPECT_NE(derive_seed(42, "text_head"), derive_seed(42, "image_head"));
  EXPECT_NE(derive_seed(42, "text_head"), derive_seed(43, "text_head"));
  EXPECT_EQ(derive_seed(42, "text_head"), derive_seed(42, "text_head"));
}

TEST(Rng, SameSeedSameStream) {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) {
    ASSERT_EQ(a.next_u64(), b.next_u64());
    ASSERT_EQ(a.normal(), b.normal());
  }
}

TEST(Rng, UniformInHalfOpenUnitInterval) {
  Rng r(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, BelowIsUnbiasedEnough) {
  Rng r(3);
  std::array<int, 3> hist{};
  constexpr int n = 300000;
  for (int i = 0; i < n; ++i) ++hist[r.below(3)];
  // Binomial sd = sqrt(n p (1-p)) ~ 258; allow 5 sd.
  for (int h : hist) EXPECT_NEAR(h, n / 3.0, 5 * 258.0);
}

TEST(Rng, NormalMoments) {
  Rng r(11);
  constexpr int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
  }
  const double mean = s / n, var = s2 / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(var, 1.0, 5.0 * std::sqrt(2.0 / n));
}

}  // namespace
}  // namespace fndstack
