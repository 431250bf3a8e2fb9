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

#ifndef BSGD_SCHEDULE_HPP_
#define BSGD_SCHEDULE_HPP_

#include <vector>

#include "bsgd/image.hpp"

namespace bsgd {

// Diffusion timetable. Timesteps run 1..T; step 0 is the clean-data
// convention with alpha_bar(0) == 1.
class NoiseSchedule {
 public:
  NoiseSchedule() = default;
  explicit NoiseSchedule(std::vector<double> betas);

  int steps() const { return static_cast<int>(betas_.size()); }
  double beta(int t) const { return betas_.at(check(t, 1) - 1); }
  double alpha(int t) const { return alphas_.at(check(t, 1) - 1); }
  double alpha_bar(int t) const {
    return check(t, 0) == 0 ? 1.0 : alpha_bars_[t - 1];
  }

  const std::vector<double>& betas() const { return betas_; }
  const std::vector<double>& alphas() const { return alphas_; }
  const std::vector<double>& alpha_bars() const { return alpha_bars_; }

 private:
  int check(int t, int lo) const;

  std::vector<double> betas_;
  std::vector<double> alphas_;
  std::vector<double> alpha_bars_;
};

// Betas interpolated linearly from beta_start (t = 1) to beta_end (t = T).
NoiseSchedule make_linear_schedule(int t_train, double beta_start,
                                   double beta_end);

// sqrt(ab_t) * x0 + sqrt(1 - ab_t) * eps
Image forward_diffuse(const Image& x0, int t, const Image& eps,
                      const NoiseSchedule& sched);

// (x_t - sqrt(ab_t) * x0_hat) / sqrt(1 - ab_t)
Image x0_to_eps(const Image& x_t, const Image& x0_hat, int t,
                const NoiseSchedule& sched);

// (x_t - sqrt(1 - ab_t) * eps_hat) / sqrt(ab_t)
Image eps_to_x0(const Image& x_t, const Image& eps_hat, int t,
                const NoiseSchedule& sched);

}  // namespace bsgd

#endif  // BSGD_SCHEDULE_HPP_
