// Copyright 2026 The ksmooth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "ksmooth/rng.hpp"

#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

namespace ksmooth {
namespace {

// Published known-answer vectors for Philox4x32-10.
TEST(Philox, KnownAnswers) {
  using C = Philox4x32::Counter;
  using K = Philox4x32::Key;
  EXPECT_EQ(Philox4x32::generate(C{0, 0, 0, 0}, K{0, 0}),
            (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::generate(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                 K{0xffffffff, 0xffffffff}),
            (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::generate(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                                 K{0xa4093822, 0x299f31d0}),
            (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RandomStream, Deterministic) {
  const StreamKey key{42, 3, 7, NoiseRole::kMeasurement};
  RandomStream a(key), b(key);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(a.next_u32(), b.next_u32());
    EXPECT_EQ(a.normal(), b.normal());
  }
}

TEST(RandomStream, StreamsDiffer) {
  std::vector<StreamKey> keys = {{1, 0, 0, NoiseRole::kProcess},
                                 {2, 0, 0, NoiseRole::kProcess},
                                 {1, 1, 0, NoiseRole::kProcess},
                                 {1, 0, 1, NoiseRole::kProcess},
                                 {1, 0, 0, NoiseRole::kMeasurement},
                                 {1, 0, 0, NoiseRole::kSplit}};
  std::set<std::vector<std::uint32_t>> seen;
  for (const auto& k : keys) {
    RandomStream s(k);
    std::vector<std::uint32_t> v(16);
    for (auto& x : v) x = s.next_u32();
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), keys.size());
}

TEST(RandomStream, IndependentStreamsUncorrelated) {
  RandomStream a({5, 0, 0, NoiseRole::kProcess});
  RandomStream b({5, 0, 0, NoiseRole::kMeasurement});
  const int n = 200000;
  double sab = 0.0;
  for (int i = 0; i < n; ++i) sab += a.normal() * b.normal();
  EXPECT_LT(std::abs(sab / n), 5.0 / std::sqrt(n));
}

TEST(RandomStream, UniformOpenInterval) {
  RandomStream s({9, 0, 0, NoiseRole::kProcess});
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum2 += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 5e-3);
  EXPECT_NEAR(sum2 / n - 0.25, 1.0 / 12.0, 5e-3);
}

TEST(RandomStream, NormalMoments) {
  RandomStream s({11, 2, 0, NoiseRole::kMeasurement});
  const int n = 400000;
  double m1 = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
  int beyond2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = s.normal();
    m1 += x;
    m2 += x * x;
    m3 += x * x * x;
    m4 += x * x * x * x;
    beyond2 += std::abs(x) > 2.0;
  }
  EXPECT_NEAR(m1 / n, 0.0, 0.01);
  EXPECT_NEAR(m2 / n, 1.0, 0.01);
  EXPECT_NEAR(m3 / n, 0.0, 0.03);
  EXPECT_NEAR(m4 / n, 3.0, 0.06);
  EXPECT_NEAR(static_cast<double>(beyond2) / n, 0.0455, 0.002);
}

TEST(RandomStream, BelowCoversRangeUniformly) {
  RandomStream s({13, 0, 0, NoiseRole::kSplit});
  const int n = 70000;
  std::vector<int> counts(7, 0);
  for (int i = 0; i < n; ++i) {
    const auto v = s.below(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 400.0);
  EXPECT_EQ(s.below(1), 0u);
}

}  // namespace
}  // namespace ksmooth
