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

#ifndef KSMOOTH_RNG_HPP_
#define KSMOOTH_RNG_HPP_

#include <array>
#include <cstdint>

namespace ksmooth {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key);
};

inline constexpr const char* kRngName = "philox4x32-10+box-muller";

// Purpose of a stream inside one replication.
enum class NoiseRole : std::uint32_t {
  kProcess = 0,
  kMeasurement = 1,
  kSplit = 2,
};

// A stream is identified by (seed, replication, cell, role). The seed is the
// Philox key; the other three fill the upper counter words and the lowest
// word counts blocks, so streams never overlap.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint32_t replication = 0;
  std::uint32_t cell = 0;
  NoiseRole role = NoiseRole::kProcess;
};

class RandomStream {
 public:
  explicit RandomStream(const StreamKey& key);

  std::uint32_t next_u32();
  // Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  // Standard normal by Box-Muller; the second value of each pair is cached.
  double normal();
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  Philox4x32::Key key_;
  Philox4x32::Counter ctr_;
  Philox4x32::Counter buf_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ksmooth

#endif  // KSMOOTH_RNG_HPP_
