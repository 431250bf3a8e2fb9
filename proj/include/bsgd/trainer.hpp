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

#ifndef BSGD_TRAINER_HPP_
#define BSGD_TRAINER_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "bsgd/models.hpp"
#include "bsgd/rng.hpp"
#include "bsgd/schedule.hpp"
#include "bsgd/synth_data.hpp"

namespace bsgd {

enum class LossKind { kL1, kL2 };

struct TrainConfig {
  int batch_size = 8;
  double learning_rate = 8e-5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int iters_blind = 5000;
  int iters_plain = 10000;
  double cond_dropout = 0.1;
  LossKind loss = LossKind::kL1;
  double grad_clip = 1.0;  // global-norm; <= 0 disables
  std::uint64_t seed = 3;
  int log_interval = 100;
  int checkpoint_interval = 0;  // 0 = final checkpoint only
  // Probability that a blind-branch training sample is pixel-shuffled
  // (cond, latent and target together) with bsn_pd_factor.
  int bsn_pd_factor = 2;
  double bsn_pd_prob = 1.0;

  void validate() const;
  int total_iterations() const { return std::max(iters_blind, iters_plain); }
};

struct TrainLogRecord {
  int iteration = 0;
  std::string branch;
  double loss = 0.0;
  double wall_time_s = 0.0;
  std::string rng_digest;
};

struct TrainLog {
  std::vector<TrainLogRecord> records;
  // iteration,branch,loss,wall_time_s,rng_digest
  void write_csv(const std::filesystem::path& path) const;
};

class Adam {
 public:
  Adam() = default;
  Adam(std::vector<nn::Param*> params, double beta1, double beta2, double eps);

  void step(double lr);
  std::uint64_t steps() const { return steps_; }

  void export_state(std::vector<CheckpointParam>& into) const;
  void import_state(const std::vector<CheckpointParam>& from, std::uint64_t steps);

 private:
  std::vector<nn::Param*> params_;
  std::vector<std::vector<float>> m_;
  std::vector<std::vector<float>> v_;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  std::uint64_t steps_ = 0;
};

// One iteration's worth of random draws.
struct TrainBatch {
  std::vector<Image> x0;         // noisy training patches (the targets)
  std::vector<int> t;
  std::vector<Image> eps;
  std::vector<bool> drop_cond;   // blind branch sees a zero reference
  std::vector<bool> shuffle;     // blind branch sample is pixel-shuffled
};

struct StepLosses {
  double blind = 0.0;
  double plain = 0.0;
};

// Joint optimizer for both branches over one shared batch stream.
class Trainer {
 public:
  Trainer(const NoiseSchedule& sched, const TrainConfig& cfg,
          const BlindSpotNetConfig& blind_cfg, const PlainNetConfig& plain_cfg,
          std::map<std::string, std::string> echo = {});

  // Continues from a pair of checkpoints written by save().
  static Trainer resume(const NoiseSchedule& sched, const TrainConfig& cfg,
                        const std::filesystem::path& blind_ckpt,
                        const std::filesystem::path& plain_ckpt);

  TrainBatch draw_batch(const PatchDataset& data);

  // Forms x_t = forward_diffuse(x0, t, eps) and takes one optimizer step on
  // each requested branch. Throws on a non-finite loss before updating.
  StepLosses train_step(const TrainBatch& batch, bool train_blind, bool train_plain);

  // Runs the loop up to `until` (inclusive) shared iterations. Writes
  // checkpoints into out_dir when non-empty.
  TrainLog run(const PatchDataset& data, int until, const std::filesystem::path& out_dir = {});

  // blind.ckpt and plain.ckpt under dir.
  void save(const std::filesystem::path& dir) const;
  Checkpoint checkpoint(BranchKind kind) const;

  ModelPair& models() { return models_; }
  const ModelPair& models() const { return models_; }
  int iteration() const { return iteration_; }
  Rng& rng() { return rng_; }

 private:
  double blind_batch(const TrainBatch& batch);
  double plain_batch(const TrainBatch& batch);
  void clip_and_step(const std::vector<nn::Param*>& params, Adam& opt);

  NoiseSchedule sched_;
  TrainConfig cfg_;
  std::map<std::string, std::string> echo_;
  ModelPair models_;
  Adam blind_opt_;
  Adam plain_opt_;
  Rng rng_;
  int iteration_ = 0;
};

struct TrainResult {
  std::filesystem::path blind_checkpoint;
  std::filesystem::path plain_checkpoint;
  TrainLog log;
};

// Full run from scratch; checkpoints and train_log.csv land in out_dir.
TrainResult train(const PatchDataset& data, const TrainConfig& cfg,
                  const BlindSpotNetConfig& blind_cfg, const PlainNetConfig& plain_cfg,
                  const NoiseSchedule& sched, const std::filesystem::path& out_dir,
                  std::map<std::string, std::string> echo = {});

}  // namespace bsgd

#endif  // BSGD_TRAINER_HPP_
