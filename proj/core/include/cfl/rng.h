// Copyright 2026 The CFL Authors.
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

#ifndef CFL_RNG_H_
#define CFL_RNG_H_

#include <cstdint>

namespace cfl {

// Stateless counter-based generator: every draw is a pure function of
// (seed, stream, counter...), so results do not depend on evaluation order.
// Mixing uses the SplitMix64 finalizer.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(Mix(seed ^ Mix(stream + 0x9e3779b97f4a7c15ULL))) {}

  std::uint64_t Bits(std::uint64_t a, std::uint64_t b = 0,
                     std::uint64_t c = 0) const {
    std::uint64_t h = Mix(key_ ^ a);
    h = Mix(h ^ (b + 0x632be59bd9b4e019ULL));
    return Mix(h ^ (c + 0x85157af5ULL));
  }

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform(std::uint64_t a, std::uint64_t b = 0,
                 std::uint64_t c = 0) const {
    return static_cast<double>(Bits(a, b, c) >> 11) * 0x1.0p-53;
  }

  // Unbiased integer in [0, bound). Rejection re-keys on an attempt counter.
  std::uint64_t Below(std::uint64_t bound, std::uint64_t a, std::uint64_t b = 0,
                      std::uint64_t c = 0) const;

  static std::uint64_t Mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
};

// Sequential stream on top of CounterRng for code that just needs "the next
// number" (generators, shuffles). Deterministic given (seed, stream).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : rng_(seed, stream) {}

  std::uint64_t Bits() { return rng_.Bits(counter_++); }
  double Uniform() { return rng_.Uniform(counter_++); }
  std::uint64_t Below(std::uint64_t bound) {
    return rng_.Below(bound, counter_++);
  }
  double Normal();
  // Dirichlet(alpha, ..., alpha) sample of the given size.
  void Dirichlet(double alpha, double* out, int size);
  double Gamma(double shape);

 private:
  CounterRng rng_;
  std::uint64_t counter_ = 0;
};

}  // namespace cfl

#endif  // CFL_RNG_H_
