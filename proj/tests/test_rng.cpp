#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <vector>

#include "dagot/rng.hpp"

namespace dagot {
namespace {

TEST(Rng, KnownSplitMix64Vector) {
  // First three outputs for seed 0, per the published SplitMix64 reference.
  Rng rng(0);
  EXPECT_EQ(rng.next_u64(), 0xe220a8397b1dcdafull);
  EXPECT_EQ(rng.next_u64(), 0x6e789e6aa1b965f4ull);
  EXPECT_EQ(rng.next_u64(), 0x06c45d188009454full);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(12345), b(12345);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, DifferentSeedsDiverge) {
  Rng a(1), b(2);
  int same = 0;
  for (int i = 0; i < 64; ++i) same += a.next_u64() == b.next_u64() ? 1 : 0;
  EXPECT_LT(same, 2);
}

TEST(Rng, UniformIntBoundsAndCoverage) {
  Rng rng(7);
  std::map<int64_t, int> seen;
  for (int i = 0; i < 2000; ++i) {
    int64_t v = rng.uniform_int(3, 8);
    ASSERT_GE(v, 3);
    ASSERT_LE(v, 8);
    ++seen[v];
  }
  EXPECT_EQ(seen.size(), 6u);  // all six values hit
  EXPECT_EQ(rng.uniform_int(5, 5), 5);
}

TEST(Rng, UniformRealHalfOpen) {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    double v = rng.uniform_real(0.2, 0.6);
    ASSERT_GE(v, 0.2);
    ASSERT_LT(v, 0.6);
  }
  EXPECT_DOUBLE_EQ(rng.uniform_real(1.5, 1.5), 1.5);
}

TEST(Rng, UniformOpen0ExcludesZeroIncludesOne) {
  Rng rng(13);
  double max_seen = 0.0;
  for (int i = 0; i < 5000; ++i) {
    double v = rng.uniform_open0();
    ASSERT_GT(v, 0.0);
    ASSERT_LE(v, 1.0);
    max_seen = std::max(max_seen, v);
  }
  EXPECT_GT(max_seen, 0.999);
}

TEST(Rng, ShuffleIsPermutation) {
  Rng rng(17);
  std::vector<int> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<int> shuffled = v;
  rng.shuffle(shuffled);
  std::vector<int> sorted = shuffled;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, v);
  // and the shuffle actually moves things for some seed
  bool moved = false;
  for (uint64_t s = 0; s < 8 && !moved; ++s) {
    std::vector<int> w = v;
    Rng r(s);
    r.shuffle(w);
    moved = w != v;
  }
  EXPECT_TRUE(moved);
}

TEST(SubSeed, StagesAndIndicesSeparateStreams) {
  uint64_t base = 99;
  EXPECT_EQ(sub_seed(base, "collapse", 3), sub_seed(base, "collapse", 3));
  EXPECT_NE(sub_seed(base, "collapse", 3), sub_seed(base, "collapse", 4));
  EXPECT_NE(sub_seed(base, "collapse", 3), sub_seed(base, "serialize", 3));
  EXPECT_NE(sub_seed(base, "graph", 1, 2, 3), sub_seed(base, "graph", 1, 3, 2));
  EXPECT_NE(sub_seed(1, "graph", 0), sub_seed(2, "graph", 0));
}

}  // namespace
}  // namespace dagot
