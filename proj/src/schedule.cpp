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

#include "bsgd/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bsgd {

NoiseSchedule::NoiseSchedule(std::vector<double> betas) : betas_(std::move(betas)) {
  if (betas_.empty()) throw std::invalid_argument("schedule needs at least one step");
  alphas_.reserve(betas_.size());
  alpha_bars_.reserve(betas_.size());
  double running = 1.0;
  for (double b : betas_) {
    if (!(b > 0.0 && b < 1.0)) {
      throw std::invalid_argument("beta outside (0, 1): " + std::to_string(b));
    }
    alphas_.push_back(1.0 - b);
    running *= 1.0 - b;
    alpha_bars_.push_back(running);
  }
}

int NoiseSchedule::check(int t, int lo) const {
  if (t < lo || t > steps()) {
    throw std::out_of_range("timestep " + std::to_string(t) + " outside [" +
                            std::to_string(lo) + ", " + std::to_string(steps()) +
                            "]");
  }
  return t;
}

NoiseSchedule make_linear_schedule(int t_train, double beta_start, double beta_end) {
  if (t_train < 1) throw std::invalid_argument("t_train must be >= 1");
  if (!(beta_start > 0.0) || !(beta_start <= beta_end) || !(beta_end < 1.0)) {
    throw std::invalid_argument("need 0 < beta_start <= beta_end < 1");
  }
  std::vector<double> betas(t_train);
  for (int i = 0; i < t_train; ++i) {
    const double frac = t_train == 1 ? 0.0 : static_cast<double>(i) / (t_train - 1);
    betas[i] = beta_start + (beta_end - beta_start) * frac;
  }
  return NoiseSchedule(std::move(betas));
}

Image forward_diffuse(const Image& x0, int t, const Image& eps,
                      const NoiseSchedule& sched) {
  require_same_shape(x0, eps, "forward_diffuse");
  const double ab = sched.alpha_bar(t);
  return axpby(std::sqrt(ab), x0, std::sqrt(1.0 - ab), eps);
}

Image x0_to_eps(const Image& x_t, const Image& x0_hat, int t,
                const NoiseSchedule& sched) {
  require_same_shape(x_t, x0_hat, "x0_to_eps");
  const double ab = sched.alpha_bar(t);
  if (!(ab < 1.0)) throw std::domain_error("x0_to_eps: alpha_bar == 1 at t=" + std::to_string(t));
  const double s = std::sqrt(ab);
  const double n = std::sqrt(1.0 - ab);
  Image out = x_t;
  auto xs = x_t.values();
  auto ps = x0_hat.values();
  auto os = out.values();
  for (std::size_t i = 0; i < os.size(); ++i) os[i] = (xs[i] - s * ps[i]) / n;
  return out;
}

Image eps_to_x0(const Image& x_t, const Image& eps_hat, int t,
                const NoiseSchedule& sched) {
  require_same_shape(x_t, eps_hat, "eps_to_x0");
  const double ab = sched.alpha_bar(t);
  if (!(ab > 0.0)) throw std::domain_error("eps_to_x0: alpha_bar == 0 at t=" + std::to_string(t));
  const double s = std::sqrt(ab);
  const double n = std::sqrt(1.0 - ab);
  Image out = x_t;
  auto xs = x_t.values();
  auto es = eps_hat.values();
  auto os = out.values();
  for (std::size_t i = 0; i < os.size(); ++i) os[i] = (xs[i] - n * es[i]) / s;
  return out;
}

}  // namespace bsgd
