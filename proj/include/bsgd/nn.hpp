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

#ifndef BSGD_NN_HPP_
#define BSGD_NN_HPP_

// Minimal single-sample CNN layers with explicit backward passes. Forward is
// const and writes whatever backward needs into a caller-owned cache, so
// prediction is safe for concurrent callers.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bsgd/rng.hpp"

namespace bsgd::nn {

// Buffers handed to Eigen products. Eigen's vectorized reductions and
// matrix-vector kernels peel leading elements up to the next packet
// boundary, so the summation order (and the last bits of the result) follow
// the buffer's address. Fixed alignment keeps training bitwise reproducible.
using FloatVec = std::vector<float, Eigen::aligned_allocator<float>>;

// One feature map, channel-major.
struct Tensor {
  int c = 0;
  int h = 0;
  int w = 0;
  FloatVec v;

  Tensor() = default;
  Tensor(int channels, int height, int width, float fill = 0.0f)
      : c(channels), h(height), w(width),
        v(static_cast<std::size_t>(channels) * height * width, fill) {}
  std::size_t plane() const { return static_cast<std::size_t>(h) * w; }
  float* channel(int k) { return v.data() + k * plane(); }
  const float* channel(int k) const { return v.data() + k * plane(); }
};

struct Param {
  std::string name;
  std::vector<int> shape;
  FloatVec value;
  FloatVec grad;
  FloatVec mask;  // empty, or 0/1 per entry; masked entries stay 0

  std::size_t size() const { return value.size(); }
  void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0f); }
  void apply_mask();
};

Param make_param(std::string name, std::vector<int> shape);
void init_uniform(Param& p, float bound, Rng& rng);

class Linear {
 public:
  Linear() = default;
  Linear(const std::string& name, int in, int out, Rng& rng);

  std::vector<float> forward(std::span<const float> x) const;
  // Accumulates parameter gradients; returns dL/dx.
  std::vector<float> backward(std::span<const float> dy, std::span<const float> x);

  int in() const { return in_; }
  int out() const { return out_; }
  void collect(std::vector<Param*>& out);

 private:
  int in_ = 0;
  int out_ = 0;
  Param weight_;
  Param bias_;
};

struct ConvCache {
  int in_c = 0, h = 0, w = 0;
  FloatVec col;  // im2col matrix (or the input itself for 1x1)
};

class Conv2d {
 public:
  Conv2d() = default;
  // Zero padding keeps the spatial size. A center-masked kernel has its
  // middle tap forced to zero for every input channel.
  Conv2d(const std::string& name, int in, int out, int kernel, int dilation,
         bool center_masked, Rng& rng);

  Tensor forward(const Tensor& x, ConvCache* cache) const;
  // Accumulates gradients; returns dL/dx when want_dx, else an empty tensor.
  Tensor backward(const Tensor& dy, const ConvCache& cache, bool want_dx);

  int in() const { return in_; }
  int out() const { return out_; }
  int kernel() const { return kernel_; }
  int dilation() const { return dilation_; }
  bool center_masked() const { return masked_; }
  void collect(std::vector<Param*>& out);

 private:
  void im2col(const Tensor& x, FloatVec& col) const;
  void col2im(const FloatVec& col, Tensor& dx) const;

  int in_ = 0;
  int out_ = 0;
  int kernel_ = 1;
  int dilation_ = 1;
  bool masked_ = false;
  Param weight_;  // [out, in * k * k]
  Param bias_;
};

// SiLU applied in place; `pre` keeps the input for backward when non-null.
void silu_inplace(Tensor& x, Tensor* pre);
void silu_backward_inplace(Tensor& dy, const Tensor& pre);
void silu_inplace(std::vector<float>& x, std::vector<float>* pre);
void silu_backward_inplace(std::span<float> dy, std::span<const float> pre);

// y = x * (1 + scale[c]) + shift[c]; ss = [scale..., shift...].
void film_inplace(Tensor& x, std::span<const float> ss, Tensor* pre);
// Returns d(ss); rewrites dy into dx.
std::vector<float> film_backward_inplace(Tensor& dy, std::span<const float> ss,
                                         const Tensor& pre);

Tensor avg_pool2(const Tensor& x);
Tensor avg_pool2_backward(const Tensor& dy);
Tensor upsample2(const Tensor& x);
Tensor upsample2_backward(const Tensor& dy);
Tensor concat_channels(const Tensor& a, const Tensor& b);
void split_channels(const Tensor& d, int first, Tensor& da, Tensor& db);
void add_inplace(Tensor& a, const Tensor& b);

// Sinusoidal embedding of a (possibly fractional) timestep, width `dim`.
std::vector<float> timestep_embedding(double t, int dim);

}  // namespace bsgd::nn

#endif  // BSGD_NN_HPP_
