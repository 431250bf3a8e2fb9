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

#include "bsgd/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

namespace bsgd {

Image::Image(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  if (height <= 0 || width <= 0 || channels <= 0) {
    throw std::invalid_argument("image dimensions must be positive");
  }
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

bool Image::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::string Image::shape_string() const {
  std::ostringstream os;
  os << height_ << "x" << width_ << "x" << channels_;
  return os.str();
}

bool Image::bitwise_equal(const Image& other) const {
  return same_shape(other) &&
         std::memcmp(data_.data(), other.data_.data(),
                     data_.size() * sizeof(double)) == 0;
}

void require_same_shape(const Image& a, const Image& b, const char* what) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch " +
                                a.shape_string() + " vs " + b.shape_string());
  }
}

double storage_to_internal(double level) { return level / 127.5 - 1.0; }

double internal_to_storage(double value) { return (value + 1.0) * 127.5; }

std::uint8_t quantize_storage(double value) {
  const double level = std::clamp(internal_to_storage(value), 0.0, 255.0);
  return static_cast<std::uint8_t>(std::lround(level));
}

Image to_storage_levels(const Image& internal) {
  Image out = internal;
  for (double& v : out.values()) v = quantize_storage(v);
  return out;
}

Image clip(const Image& x, double lo, double hi) {
  Image out = x;
  for (double& v : out.values()) v = std::clamp(v, lo, hi);
  return out;
}

Image axpby(double a, const Image& x, double b, const Image& y) {
  require_same_shape(x, y, "axpby");
  Image out = x;
  auto xs = x.values();
  auto ys = y.values();
  auto os = out.values();
  for (std::size_t i = 0; i < os.size(); ++i) os[i] = a * xs[i] + b * ys[i];
  return out;
}

}  // namespace bsgd
