// Copyright 2026 The PolicyScope Authors
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

#ifndef POLICYSCOPE_RNG_H_
#define POLICYSCOPE_RNG_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace policyscope {

// splitmix64 finalizer. Used to expand seeds; never as the stream itself.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// xorshift64* (Vigna 2016): state ^= state >> 12; state ^= state << 25;
// state ^= state >> 27; output = state * 0x2545F4914F6CDD1D.
// The initial state is splitmix64(seed), or 1 if that happens to be zero.
// Every seeded draw in the toolkit goes through this generator, so splits,
// augmentation samples and training shuffles reproduce across platforms.
class Xorshift64Star {
 public:
  explicit Xorshift64Star(std::uint64_t seed) : state_(splitmix64(seed)) {
    if (state_ == 0) state_ = 1;
  }

  std::uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
  }

  // Uniform integer in [0, bound). Rejection sampling on the top of the
  // range keeps it unbiased. bound must be > 0.
  std::uint64_t uniform(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t r = next();
    while (r >= limit) r = next();
    return r % bound;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Fisher-Yates, descending index: for i = n-1..1 swap(v[i], v[uniform(i+1)]).
template <typename T>
void seeded_shuffle(std::span<T> values, Xorshift64Star& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform(i));
    using std::swap;
    swap(values[i - 1], values[j]);
  }
}

// Partial Fisher-Yates, ascending index: after the call the first k
// elements are a uniform sample without replacement, in draw order.
template <typename T>
void seeded_partial_shuffle(std::span<T> values, std::size_t k,
                            Xorshift64Star& rng) {
  const std::size_t n = values.size();
  if (k > n) k = n;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform(n - i));
    using std::swap;
    swap(values[i], values[j]);
  }
}

// Per-stage seed: splitmix64(fnv1a64(stage) ^ splitmix64(global_seed)).
// Lets a single stage be re-run in isolation with the seed it had inside
// the full pipeline.
std::uint64_t derive_seed(std::string_view stage, std::uint64_t global_seed);

}  // namespace policyscope

#endif  // POLICYSCOPE_RNG_H_
