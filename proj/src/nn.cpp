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

#include "bsgd/nn.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace bsgd::nn {
namespace {

using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

float sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }

}  // namespace

void Param::apply_mask() {
  if (mask.empty()) return;
  for (std::size_t i = 0; i < value.size(); ++i) {
    value[i] *= mask[i];
    grad[i] *= mask[i];
  }
}

Param make_param(std::string name, std::vector<int> shape) {
  Param p;
  p.name = std::move(name);
  p.shape = std::move(shape);
  std::size_t n = 1;
  for (int d : p.shape) n *= static_cast<std::size_t>(d);
  p.value.assign(n, 0.0f);
  p.grad.assign(n, 0.0f);
  return p;
}

void init_uniform(Param& p, float bound, Rng& rng) {
  for (float& v : p.value) v = static_cast<float>((2.0 * rng.uniform() - 1.0) * bound);
  p.apply_mask();
}

// ---------------------------------------------------------------------------

Linear::Linear(const std::string& name, int in, int out, Rng& rng)
    : in_(in), out_(out),
      weight_(make_param(name + ".weight", {out, in})),
      bias_(make_param(name + ".bias", {out})) {
  const float bound = 1.0f / std::sqrt(static_cast<float>(in));
  init_uniform(weight_, bound, rng);
  init_uniform(bias_, bound, rng);
}

std::vector<float> Linear::forward(std::span<const float> x) const {
  if (static_cast<int>(x.size()) != in_) throw std::invalid_argument("Linear: bad input width");
  std::vector<float> y(bias_.value.begin(), bias_.value.end());
  for (int o = 0; o < out_; ++o) {
    const float* w = weight_.value.data() + static_cast<std::size_t>(o) * in_;
    float acc = 0.0f;
    for (int i = 0; i < in_; ++i) acc += w[i] * x[i];
    y[o] += acc;
  }
  return y;
}

std::vector<float> Linear::backward(std::span<const float> dy, std::span<const float> x) {
  std::vector<float> dx(in_, 0.0f);
  for (int o = 0; o < out_; ++o) {
    const float g = dy[o];
    bias_.grad[o] += g;
    float* gw = weight_.grad.data() + static_cast<std::size_t>(o) * in_;
    const float* w = weight_.value.data() + static_cast<std::size_t>(o) * in_;
    for (int i = 0; i < in_; ++i) {
      gw[i] += g * x[i];
      dx[i] += g * w[i];
    }
  }
  return dx;
}

void Linear::collect(std::vector<Param*>& out) {
  out.push_back(&weight_);
  out.push_back(&bias_);
}

// ---------------------------------------------------------------------------

Conv2d::Conv2d(const std::string& name, int in, int out, int kernel, int dilation,
               bool center_masked, Rng& rng)
    : in_(in), out_(out), kernel_(kernel), dilation_(dilation), masked_(center_masked),
      weight_(make_param(name + ".weight", {out, in, kernel, kernel})),
      bias_(make_param(name + ".bias", {out})) {
  if (kernel < 1 || kernel % 2 == 0) throw std::invalid_argument("Conv2d: kernel must be odd");
  if (center_masked && kernel < 3) throw std::invalid_argument("Conv2d: masked 1x1 is empty");
  if (center_masked) {
    weight_.mask.assign(weight_.size(), 1.0f);
    const int kk = kernel * kernel;
    const int center = (kernel / 2) * kernel + kernel / 2;
    for (int o = 0; o < out; ++o)
      for (int i = 0; i < in; ++i)
        weight_.mask[(static_cast<std::size_t>(o) * in + i) * kk + center] = 0.0f;
  }
  const float bound = 1.0f / std::sqrt(static_cast<float>(in * kernel * kernel));
  init_uniform(weight_, bound, rng);
  init_uniform(bias_, bound, rng);
}

void Conv2d::im2col(const Tensor& x, FloatVec& col) const {
  const int k = kernel_;
  const int r = k / 2;
  const int H = x.h;
  const int W = x.w;
  const std::size_t hw = x.plane();
  col.assign(static_cast<std::size_t>(in_) * k * k * hw, 0.0f);
  for (int ci = 0; ci < in_; ++ci) {
    const float* src = x.channel(ci);
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const int oy = (ky - r) * dilation_;
        const int ox = (kx - r) * dilation_;
        float* dst = col.data() + (static_cast<std::size_t>(ci) * k * k + ky * k + kx) * hw;
        const int x0 = std::max(0, -ox);
        const int x1 = std::min(W, W - ox);
        if (x1 <= x0) continue;
        for (int y = 0; y < H; ++y) {
          const int sy = y + oy;
          if (sy < 0 || sy >= H) continue;
          std::memcpy(dst + static_cast<std::size_t>(y) * W + x0,
                      src + static_cast<std::size_t>(sy) * W + x0 + ox,
                      sizeof(float) * (x1 - x0));
        }
      }
    }
  }
}

void Conv2d::col2im(const FloatVec& col, Tensor& dx) const {
  const int k = kernel_;
  const int r = k / 2;
  const int H = dx.h;
  const int W = dx.w;
  const std::size_t hw = dx.plane();
  for (int ci = 0; ci < in_; ++ci) {
    float* dst = dx.channel(ci);
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const int oy = (ky - r) * dilation_;
        const int ox = (kx - r) * dilation_;
        const float* src = col.data() + (static_cast<std::size_t>(ci) * k * k + ky * k + kx) * hw;
        const int x0 = std::max(0, -ox);
        const int x1 = std::min(W, W - ox);
        if (x1 <= x0) continue;
        for (int y = 0; y < H; ++y) {
          const int sy = y + oy;
          if (sy < 0 || sy >= H) continue;
          const float* s = src + static_cast<std::size_t>(y) * W;
          float* d = dst + static_cast<std::size_t>(sy) * W;
          for (int xx = x0; xx < x1; ++xx) d[xx + ox] += s[xx];
        }
      }
    }
  }
}

Tensor Conv2d::forward(const Tensor& x, ConvCache* cache) const {
  if (x.c != in_) throw std::invalid_argument("Conv2d: expected " + std::to_string(in_) +
                                              " channels, got " + std::to_string(x.c));
  ConvCache local;
  ConvCache& c = cache ? *cache : local;
  c.in_c = x.c;
  c.h = x.h;
  c.w = x.w;
  im2col(x, c.col);
  const int kk = in_ * kernel_ * kernel_;
  const int hw = static_cast<int>(x.plane());
  Tensor y(out_, x.h, x.w);
  ConstMapMat wm(weight_.value.data(), out_, kk);
  ConstMapMat cm(c.col.data(), kk, hw);
  MapMat ym(y.v.data(), out_, hw);
  ym.noalias() = wm * cm;
  for (int o = 0; o < out_; ++o) ym.row(o).array() += bias_.value[o];
  return y;
}

Tensor Conv2d::backward(const Tensor& dy, const ConvCache& cache, bool want_dx) {
  const int kk = in_ * kernel_ * kernel_;
  const int hw = cache.h * cache.w;
  ConstMapMat dym(dy.v.data(), out_, hw);
  ConstMapMat cm(cache.col.data(), kk, hw);
  MapMat gw(weight_.grad.data(), out_, kk);
  gw.noalias() += dym * cm.transpose();
  for (int o = 0; o < out_; ++o) bias_.grad[o] += dym.row(o).sum();
  if (masked_) {
    for (std::size_t i = 0; i < weight_.grad.size(); ++i) weight_.grad[i] *= weight_.mask[i];
  }
  if (!want_dx) return {};
  FloatVec dcol(static_cast<std::size_t>(kk) * hw);
  MapMat dcm(dcol.data(), kk, hw);
  ConstMapMat wm(weight_.value.data(), out_, kk);
  dcm.noalias() = wm.transpose() * dym;
  Tensor dx(in_, cache.h, cache.w);
  col2im(dcol, dx);
  return dx;
}

void Conv2d::collect(std::vector<Param*>& out) {
  out.push_back(&weight_);
  out.push_back(&bias_);
}

// ---------------------------------------------------------------------------

void silu_inplace(std::vector<float>& x, std::vector<float>* pre) {
  if (pre) *pre = x;
  for (float& v : x) v = v * sigmoid(v);
}

void silu_backward_inplace(std::span<float> dy, std::span<const float> pre) {
  for (std::size_t i = 0; i < dy.size(); ++i) {
    const float s = sigmoid(pre[i]);
    dy[i] *= s * (1.0f + pre[i] * (1.0f - s));
  }
}

void silu_inplace(Tensor& x, Tensor* pre) {
  if (pre) *pre = x;
  for (float& v : x.v) v = v * sigmoid(v);
}

void silu_backward_inplace(Tensor& dy, const Tensor& pre) {
  silu_backward_inplace(dy.v, pre.v);
}

void film_inplace(Tensor& x, std::span<const float> ss, Tensor* pre) {
  if (static_cast<int>(ss.size()) != 2 * x.c) throw std::invalid_argument("film: bad width");
  if (pre) *pre = x;
  const std::size_t n = x.plane();
  for (int k = 0; k < x.c; ++k) {
    const float g = 1.0f + ss[k];
    const float b = ss[x.c + k];
    float* p = x.channel(k);
    for (std::size_t i = 0; i < n; ++i) p[i] = p[i] * g + b;
  }
}

std::vector<float> film_backward_inplace(Tensor& dy, std::span<const float> ss,
                                         const Tensor& pre) {
  std::vector<float> dss(2 * dy.c, 0.0f);
  const std::size_t n = dy.plane();
  for (int k = 0; k < dy.c; ++k) {
    float* d = dy.channel(k);
    const float* x = pre.channel(k);
    double dscale = 0.0, dshift = 0.0;
    const float g = 1.0f + ss[k];
    for (std::size_t i = 0; i < n; ++i) {
      dscale += static_cast<double>(d[i]) * x[i];
      dshift += d[i];
      d[i] *= g;
    }
    dss[k] = static_cast<float>(dscale);
    dss[dy.c + k] = static_cast<float>(dshift);
  }
  return dss;
}

Tensor avg_pool2(const Tensor& x) {
  if (x.h % 2 || x.w % 2) throw std::invalid_argument("avg_pool2: odd spatial size");
  Tensor y(x.c, x.h / 2, x.w / 2);
  for (int k = 0; k < x.c; ++k) {
    const float* s = x.channel(k);
    float* d = y.channel(k);
    for (int i = 0; i < y.h; ++i)
      for (int j = 0; j < y.w; ++j) {
        const float* p = s + (2 * i) * x.w + 2 * j;
        d[i * y.w + j] = 0.25f * (p[0] + p[1] + p[x.w] + p[x.w + 1]);
      }
  }
  return y;
}

Tensor avg_pool2_backward(const Tensor& dy) {
  Tensor dx(dy.c, dy.h * 2, dy.w * 2);
  for (int k = 0; k < dy.c; ++k) {
    const float* s = dy.channel(k);
    float* d = dx.channel(k);
    for (int i = 0; i < dx.h; ++i)
      for (int j = 0; j < dx.w; ++j) d[i * dx.w + j] = 0.25f * s[(i / 2) * dy.w + j / 2];
  }
  return dx;
}

Tensor upsample2(const Tensor& x) {
  Tensor y(x.c, x.h * 2, x.w * 2);
  for (int k = 0; k < x.c; ++k) {
    const float* s = x.channel(k);
    float* d = y.channel(k);
    for (int i = 0; i < y.h; ++i)
      for (int j = 0; j < y.w; ++j) d[i * y.w + j] = s[(i / 2) * x.w + j / 2];
  }
  return y;
}

Tensor upsample2_backward(const Tensor& dy) {
  Tensor dx(dy.c, dy.h / 2, dy.w / 2);
  for (int k = 0; k < dy.c; ++k) {
    const float* s = dy.channel(k);
    float* d = dx.channel(k);
    for (int i = 0; i < dy.h; ++i)
      for (int j = 0; j < dy.w; ++j) d[(i / 2) * dx.w + j / 2] += s[i * dy.w + j];
  }
  return dx;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  if (a.h != b.h || a.w != b.w) throw std::invalid_argument("concat: spatial mismatch");
  Tensor y(a.c + b.c, a.h, a.w);
  std::copy(a.v.begin(), a.v.end(), y.v.begin());
  std::copy(b.v.begin(), b.v.end(), y.v.begin() + a.v.size());
  return y;
}

void split_channels(const Tensor& d, int first, Tensor& da, Tensor& db) {
  da = Tensor(first, d.h, d.w);
  db = Tensor(d.c - first, d.h, d.w);
  std::copy(d.v.begin(), d.v.begin() + da.v.size(), da.v.begin());
  std::copy(d.v.begin() + da.v.size(), d.v.end(), db.v.begin());
}

void add_inplace(Tensor& a, const Tensor& b) {
  for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] += b.v[i];
}

std::vector<float> timestep_embedding(double t, int dim) {
  std::vector<float> e(dim, 0.0f);
  const int half = dim / 2;
  for (int i = 0; i < half; ++i) {
    const double freq = std::exp(-std::log(10000.0) * i / half);
    e[i] = static_cast<float>(std::sin(t * freq));
    e[half + i] = static_cast<float>(std::cos(t * freq));
  }
  return e;
}

}  // namespace bsgd::nn
