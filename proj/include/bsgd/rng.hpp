// Copyright (c) the BSGD Authors
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

#ifndef BSGD_RNG_HPP_
#define BSGD_RNG_HPP_

#include <cstdint>
#include <random>
#include <string>

#include "bsgd/image.hpp"

namespace bsgd {

// splitmix64 finalizer; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t x);

// Child seed for (base, a, b). Distinct index tuples give unrelated streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                          std::uint64_t b = 0);

// Seeded generator with a Gaussian stream. The whole state (engine and the
// cached normal deviate) serializes to text so training can resume bitwise.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  // Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }
  bool bernoulli(double p) { return uniform() < p; }

  Image normal_image(int height, int width, int channels);

  std::string state() const;
  void set_state(const std::string& state);
  // Short hex digest of the serialized state, for logs.
  std::string digest() const;

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// FNV-1a over bytes, rendered as 16 hex digits.
std::string fnv1a_hex(const void* data, std::size_t size);
std::string fnv1a_hex(const std::string& s);

}  // namespace bsgd

#endif  // BSGD_RNG_HPP_
