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

#ifndef BSGD_ORACLE_HPP_
#define BSGD_ORACLE_HPP_

#include <cstdint>
#include <filesystem>

#include "bsgd/sampler.hpp"
#include "bsgd/schedule.hpp"
#include "bsgd/score_model.hpp"

namespace bsgd {

// Data distribution N(mean, std^2), i.i.d. per pixel.
struct GaussianWorld {
  double mean = 0.0;
  double std = 1.0;
};

// Exact posterior mean E[x0 | x_t] under the forward process:
//   m + sqrt(ab) s^2 / (ab s^2 + 1 - ab) * (x_t - sqrt(ab) m)
Image analytic_predict_x0(const Image& x_t, int t, const GaussianWorld& world,
                          const NoiseSchedule& sched);

// ScoreModel adapter for the closed form. `bias` is added to every prediction
// so tests can check that the moment check catches a broken predictor.
class AnalyticPredictor final : public ScoreModel {
 public:
  AnalyticPredictor(GaussianWorld world, const NoiseSchedule& sched, double bias = 0.0)
      : world_(world), sched_(&sched), bias_(bias) {}

  Image predict_x0(const Image& x_t, int t, const Image* cond) const override;
  bool blind_spot() const override { return false; }
  std::size_t parameter_count() const override { return 0; }

 private:
  GaussianWorld world_;
  const NoiseSchedule* sched_;
  double bias_;
};

struct OracleOptions {
  int n_samples = 1000;  // independent sampling runs
  int image_size = 8;    // each run denoises an image_size^2 single-channel image
  int steps = 8;
  int t_start = 30;
  double w = 0.5;
  std::uint64_t seed = 2024;
  double bias = 0.0;     // test hook
  double mean_tol = 0.05;
  double var_rel_tol = 0.10;
  double refine_tol = 1e-2;
};

struct MomentReport {
  int runs = 0;
  std::size_t values = 0;
  double mean = 0.0;
  double variance = 0.0;
  bool variance_defined = false;
  bool mean_ok = false;
  bool variance_ok = false;
  bool guidance_neutral = false;   // w = 0 and w = 1 trajectories bitwise equal
  // Per-pixel RMS of out(S) - out(2S) on run 0. The sup norm grows with the
  // oracle image size, so it is reported but not gated.
  double refinement_delta = 0.0;
  double refinement_max = 0.0;
  bool refinement_ok = false;

  bool passed() const {
    return mean_ok && (variance_ok || !variance_defined) && guidance_neutral && refinement_ok;
  }
  void write_csv(const std::filesystem::path& path) const;
};

// Deterministic guided DDIM (eta = 0, no replacement, no pixel shuffle) with
// the analytic predictor on both branches, started from the exact marginal
// at t_start. Reports moments of the final outputs.
MomentReport oracle_sampler_check(const GaussianWorld& world, const NoiseSchedule& sched,
                                  const OracleOptions& opt);

}  // namespace bsgd

#endif  // BSGD_ORACLE_HPP_
