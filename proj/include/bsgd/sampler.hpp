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

#ifndef BSGD_SAMPLER_HPP_
#define BSGD_SAMPLER_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bsgd/image.hpp"
#include "bsgd/pd_ops.hpp"
#include "bsgd/schedule.hpp"
#include "bsgd/score_model.hpp"

namespace bsgd {

enum class InitMode { kRenoise, kPureNoise };

struct SamplerConfig {
  double w = 0.7;            // weight on the blind-spot branch, in [0, 1]
  int steps = 8;             // per round
  int rounds = 8;
  int t_start = 30;
  double p_replace = 0.25;
  int pd_factor = 2;         // first-step pixel shuffle; 1 disables
  double eta = 0.0;
  InitMode init_mode = InitMode::kRenoise;
  std::uint64_t seed = 0;

  void validate(const NoiseSchedule& sched) const;
  std::map<std::string, std::string> echo() const;
};

// Non-owning view of the two branches. Either pointer may be null when the
// guidance weight makes that branch irrelevant (w == 0 needs no blind
// branch, w == 1 needs no plain branch).
struct Branches {
  const ScoreModel* blind = nullptr;
  const ScoreModel* plain = nullptr;
};

// S + 1 timesteps from t_start down to 0 with stride floor(t_start / S):
// make_trajectory(300, 8) = 300, 263, ..., 41, 0.
std::vector<int> make_trajectory(int t_start, int steps, const NoiseSchedule& sched);

// w * eps_blind + (1 - w) * eps_plain with each eps derived from the branch's
// x0 prediction. The endpoints return one branch's eps unmixed.
Image guided_eps(const Image& x_t, int t, const Image* cond, const Branches& branches,
                 double w, const NoiseSchedule& sched);

// Generalized DDIM update from t to t_prev. `z` may be null when eta == 0.
Image ddim_step(const Image& x_t, const Image& eps_mix, int t, int t_prev,
                const NoiseSchedule& sched, double eta, const Image* z);

// DDIM stochasticity for the (t -> t_prev) transition.
double ddim_sigma(int t, int t_prev, const NoiseSchedule& sched, double eta);

struct StepRecord {
  int round = 0;
  int step = 0;
  int t = 0;
  int t_prev = 0;
  std::uint64_t mask_seed = 0;
  ReplacementMask mask;
  Image estimate;  // x0 estimate after replacement
};

struct RoundRecord {
  int round = 0;
  std::uint64_t seed = 0;
  std::uint64_t reference_mask_seed = 0;  // 0 for the first round
  Image reference;                        // x_ref used by this round
};

struct RunRecord {
  Image noisy;
  SamplerConfig config;
  std::vector<int> trajectory;
  std::vector<RoundRecord> rounds;
  std::vector<StepRecord> steps;
  Image output;

  // Indexed PNGs (estimate_rRR_sSS.png, mask_rRR_sSS.png, reference_rRR.png,
  // noisy.png, output.png) plus manifest.txt.
  void save(const std::filesystem::path& dir) const;
};

struct RoundResult {
  std::vector<Image> estimates;   // replaced x0 estimates, one per step
  Image final_estimate;           // last step's x0 estimate before replacement
};

// One sampling round (Base Replacement). Appends to `record` when non-null.
RoundResult sample_round(const Image& x_ref, const Branches& branches,
                         const NoiseSchedule& sched, const SamplerConfig& cfg,
                         int round_index, RunRecord* record = nullptr);

// All rounds with Complementary Replacement between them. The output is the
// clipped mean of every recorded estimate.
Image sample_full(const Image& x_noisy, const Branches& branches,
                  const NoiseSchedule& sched, const SamplerConfig& cfg,
                  RunRecord* record = nullptr);

// Seeds used by the sampler, exposed for audit and tests.
std::uint64_t round_seed(std::uint64_t run_seed, int round);
std::uint64_t step_mask_seed(std::uint64_t run_seed, int round, int step);
std::uint64_t reference_mask_seed(std::uint64_t run_seed, int round);

}  // namespace bsgd

#endif  // BSGD_SAMPLER_HPP_
