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

#ifndef BSGD_IMAGE_HPP_
#define BSGD_IMAGE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsgd {

// Planar (channel-major) image in the internal value range [-1, 1].
// Values are kept in double so that the diffusion algebra round-trips at
// 1e-6 even where 1/sqrt(1 - alpha_bar) is large; networks convert to float.
class Image {
 public:
  Image() = default;
  Image(int height, int width, int channels, double fill = 0.0);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t pixels() const { return static_cast<std::size_t>(height_) * width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int y, int x, int c) { return data_[index(y, x, c)]; }
  double at(int y, int x, int c) const { return data_[index(y, x, c)]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::span<double> plane(int c) { return {data_.data() + c * pixels(), pixels()}; }
  std::span<const double> plane(int c) const {
    return {data_.data() + c * pixels(), pixels()};
  }

  bool same_shape(const Image& other) const {
    return height_ == other.height_ && width_ == other.width_ &&
           channels_ == other.channels_;
  }
  bool all_finite() const;
  std::string shape_string() const;

  // Exact (bitwise) equality of shape and values.
  bool bitwise_equal(const Image& other) const;

 private:
  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

void require_same_shape(const Image& a, const Image& b, const char* what);

// 8-bit storage level (0..255) <-> internal value. The 256 levels round-trip
// exactly.
double storage_to_internal(double level);
double internal_to_storage(double value);
std::uint8_t quantize_storage(double value);

// Whole-image conversion into [0, 255] units, clipped and rounded to the
// representable 8-bit levels.
Image to_storage_levels(const Image& internal);
Image clip(const Image& x, double lo = -1.0, double hi = 1.0);

// a*x + b*y, element-wise.
Image axpby(double a, const Image& x, double b, const Image& y);

}  // namespace bsgd

#endif  // BSGD_IMAGE_HPP_
