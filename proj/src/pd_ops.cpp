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

#include "bsgd/pd_ops.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

#include "bsgd/rng.hpp"

namespace bsgd {
namespace {

void check_factor(const Image& x, int f, const char* op) {
  if (f < 1) throw std::invalid_argument(std::string(op) + ": factor must be >= 1");
  if (x.height() % f != 0 || x.width() % f != 0) {
    throw std::invalid_argument(std::string(op) + ": " + x.shape_string() +
                                " not divisible by factor " + std::to_string(f));
  }
}

}  // namespace

Image pd_down(const Image& x, int f) {
  check_factor(x, f, "pd_down");
  if (f == 1) return x;
  const int th = x.height() / f;
  const int tw = x.width() / f;
  Image out(x.height(), x.width(), x.channels());
  for (int k = 0; k < x.channels(); ++k)
    for (int r = 0; r < f; ++r)
      for (int c = 0; c < f; ++c)
        for (int i = 0; i < th; ++i)
          for (int j = 0; j < tw; ++j)
            out.at(r * th + i, c * tw + j, k) = x.at(i * f + r, j * f + c, k);
  return out;
}

Image pd_up(const Image& x, int f) {
  check_factor(x, f, "pd_up");
  if (f == 1) return x;
  const int th = x.height() / f;
  const int tw = x.width() / f;
  Image out(x.height(), x.width(), x.channels());
  for (int k = 0; k < x.channels(); ++k)
    for (int r = 0; r < f; ++r)
      for (int c = 0; c < f; ++c)
        for (int i = 0; i < th; ++i)
          for (int j = 0; j < tw; ++j)
            out.at(i * f + r, j * f + c, k) = x.at(r * th + i, c * tw + j, k);
  return out;
}

std::size_t ReplacementMask::count() const {
  return std::accumulate(bits.begin(), bits.end(), std::size_t{0});
}

ReplacementMask ReplacementMask::inverted() const {
  ReplacementMask m = *this;
  for (auto& b : m.bits) b = b ? 0 : 1;
  return m;
}

ReplacementMask make_mask(int height, int width, double p, std::uint64_t seed) {
  if (height <= 0 || width <= 0) throw std::invalid_argument("make_mask: empty grid");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("make_mask: p outside [0, 1]");
  ReplacementMask m{height, width, p, seed, {}};
  m.bits.resize(static_cast<std::size_t>(height) * width);
  Rng rng(seed);
  for (auto& b : m.bits) b = rng.uniform() < p ? 1 : 0;
  return m;
}

Image replace(const Image& dst, const Image& src, const ReplacementMask& mask) {
  require_same_shape(dst, src, "replace");
  if (mask.height != dst.height() || mask.width != dst.width()) {
    throw std::invalid_argument("replace: mask does not match image grid");
  }
  Image out = dst;
  const std::size_t n = dst.pixels();
  for (int c = 0; c < dst.channels(); ++c) {
    auto o = out.plane(c);
    auto s = src.plane(c);
    for (std::size_t i = 0; i < n; ++i)
      if (mask.bits[i]) o[i] = s[i];
  }
  return out;
}

}  // namespace bsgd
