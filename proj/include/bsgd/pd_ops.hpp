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

#ifndef BSGD_PD_OPS_HPP_
#define BSGD_PD_OPS_HPP_

#include <cstdint>
#include <vector>

#include "bsgd/image.hpp"

namespace bsgd {

// Pixel-shuffle downsampling. The image becomes an f x f mosaic of stride-f
// phase tiles:
//   out[r*(H/f) + i, c*(W/f) + j] = in[i*f + r, j*f + c]
// Shape is unchanged. Requires H and W divisible by f.
Image pd_down(const Image& x, int factor);
// Exact inverse permutation of pd_down.
Image pd_up(const Image& x, int factor);

// Spatial Bernoulli(p) grid, broadcast across channels by replace().
struct ReplacementMask {
  int height = 0;
  int width = 0;
  double p = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::uint8_t> bits;  // row-major, 1 = take source pixel

  bool operator()(int y, int x) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
  std::size_t count() const;
  ReplacementMask inverted() const;
};

// Pure function of (h, w, p, seed).
ReplacementMask make_mask(int height, int width, double p, std::uint64_t seed);

// out = mask ? src : dst, per pixel.
Image replace(const Image& dst, const Image& src, const ReplacementMask& mask);

}  // namespace bsgd

#endif  // BSGD_PD_OPS_HPP_
