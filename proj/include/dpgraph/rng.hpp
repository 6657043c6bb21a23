//
// Copyright 2026 The dpgraph Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
#ifndef DPGRAPH_RNG_HPP_
#define DPGRAPH_RNG_HPP_

#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace dpgraph {

// A deterministic, splittable random stream identified by (seed, path).
//
// Every consumer of randomness receives its own stream derived with split(),
// so the draws for one (node, feature) cell or one MCMC chain never depend on
// how many draws other consumers made. The key for a path is a splitmix64
// chain over the seed and the path indices; the engine is std::mt19937_64,
// whose output sequence is fixed by the standard. Mapping to doubles and
// bounded integers is done here rather than through <random> distributions,
// whose algorithms are implementation-defined.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::vector<std::uint64_t> path = {})
      : seed_(seed), path_(std::move(path)), engine_(derive_key(seed_, path_)) {}

  // Child stream; independent of this stream's draw position.
  RngStream split(std::uint64_t index) const {
    std::vector<std::uint64_t> child = path_;
    child.push_back(index);
    return RngStream(seed_, std::move(child));
  }

  std::uint64_t seed() const { return seed_; }
  const std::vector<std::uint64_t>& path() const { return path_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on the open interval (0, 1).
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_int(std::uint64_t bound) {
    // Rejection on the largest multiple of bound representable.
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  bool bernoulli(double p) { return uniform() < p; }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  static std::uint64_t derive_key(std::uint64_t seed,
                                  const std::vector<std::uint64_t>& path) {
    std::uint64_t h = splitmix64(seed);
    for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p + 1));
    return h;
  }

  std::uint64_t seed_;
  std::vector<std::uint64_t> path_;
  std::mt19937_64 engine_;
};

// Fisher-Yates with RngStream draws, so the permutation is portable.
template <typename T>
void shuffle(std::vector<T>& items, RngStream& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.uniform_int(i));
    std::swap(items[i - 1], items[j]);
  }
}

// Stream tags for the top-level stages.
namespace streams {
inline constexpr std::uint64_t kFeatures = 1;
inline constexpr std::uint64_t kMcmc = 2;
inline constexpr std::uint64_t kNoisyProb = 3;
inline constexpr std::uint64_t kGraphSampler = 4;
inline constexpr std::uint64_t kAudit = 5;
}  // namespace streams

}  // namespace dpgraph

#endif  // DPGRAPH_RNG_HPP_
