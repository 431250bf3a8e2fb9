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

#include "bsgd/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include "bsgd/errors.hpp"
#include "bsgd/pd_ops.hpp"

namespace bsgd {
namespace {

// Returns the mean loss and writes dL/d(pred) for one sample into d_out.
double loss_and_grad(const nn::Tensor& pred, const nn::Tensor& target, LossKind kind,
                     double scale, nn::Tensor& d_out) {
  d_out = nn::Tensor(pred.c, pred.h, pred.w);
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.v.size(); ++i) {
    const double diff = static_cast<double>(pred.v[i]) - target.v[i];
    if (kind == LossKind::kL1) {
      acc += std::abs(diff);
      d_out.v[i] = static_cast<float>(scale * ((diff > 0) - (diff < 0)));
    } else {
      acc += diff * diff;
      d_out.v[i] = static_cast<float>(scale * 2.0 * diff);
    }
  }
  return acc / static_cast<double>(pred.v.size());
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size < 1) throw std::invalid_argument("batch_size must be positive");
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("learning_rate must be >= 0");
  if (iters_blind < 0 || iters_plain < 0) throw std::invalid_argument("iteration counts must be >= 0");
  if (!(cond_dropout >= 0.0 && cond_dropout <= 1.0)) {
    throw std::invalid_argument("cond_dropout must lie in [0, 1]");
  }
  if (bsn_pd_factor < 1) throw std::invalid_argument("bsn_train_pd_factor must be >= 1");
  if (!(bsn_pd_prob >= 0.0 && bsn_pd_prob <= 1.0)) {
    throw std::invalid_argument("bsn_train_pd_prob must lie in [0, 1]");
  }
}

void TrainLog::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "iteration,branch,loss,wall_time_s,rng_digest\n";
  out << std::setprecision(8);
  for (const auto& r : records) {
    out << r.iteration << ',' << r.branch << ',' << r.loss << ',' << r.wall_time_s << ','
        << r.rng_digest << '\n';
  }
}

// ---------------------------------------------------------------------------

Adam::Adam(std::vector<nn::Param*> params, double beta1, double beta2, double eps)
    : params_(std::move(params)), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const auto* p : params_) {
    m_.emplace_back(p->size(), 0.0f);
    v_.emplace_back(p->size(), 0.0f);
  }
}

void Adam::step(double lr) {
  ++steps_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    nn::Param& p = *params_[k];
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double g = p.grad[i];
      m[i] = static_cast<float>(beta1_ * m[i] + (1.0 - beta1_) * g);
      v[i] = static_cast<float>(beta2_ * v[i] + (1.0 - beta2_) * g * g);
      const double mh = m[i] / c1;
      const double vh = v[i] / c2;
      p.value[i] = static_cast<float>(p.value[i] - lr * mh / (std::sqrt(vh) + eps_));
    }
    p.apply_mask();
  }
}

void Adam::export_state(std::vector<CheckpointParam>& into) const {
  for (std::size_t k = 0; k < into.size(); ++k) {
    into[k].adam_m = m_[k];
    into[k].adam_v = v_[k];
  }
}

void Adam::import_state(const std::vector<CheckpointParam>& from, std::uint64_t steps) {
  if (from.size() != m_.size()) throw std::runtime_error("optimizer state size mismatch");
  for (std::size_t k = 0; k < from.size(); ++k) {
    m_[k] = from[k].adam_m;
    v_[k] = from[k].adam_v;
  }
  steps_ = steps;
}

// ---------------------------------------------------------------------------

Trainer::Trainer(const NoiseSchedule& sched, const TrainConfig& cfg,
                 const BlindSpotNetConfig& blind_cfg, const PlainNetConfig& plain_cfg,
                 std::map<std::string, std::string> echo)
    : sched_(sched), cfg_(cfg), echo_(std::move(echo)), rng_(cfg.seed) {
  cfg_.validate();
  if (blind_cfg.channels != plain_cfg.channels) {
    throw std::invalid_argument("branches disagree on channel count");
  }
  models_.blind = std::make_unique<BlindSpotNet>(blind_cfg);
  models_.plain = std::make_unique<PlainNet>(plain_cfg);
  blind_opt_ = Adam(models_.blind->parameters(), cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  plain_opt_ = Adam(models_.plain->parameters(), cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  for (const auto& [k, v] : blind_cfg.echo()) echo_[k] = v;
  for (const auto& [k, v] : plain_cfg.echo()) echo_[k] = v;
  echo_["t_train"] = std::to_string(sched.steps());
}

Trainer Trainer::resume(const NoiseSchedule& sched, const TrainConfig& cfg,
                        const std::filesystem::path& blind_ckpt,
                        const std::filesystem::path& plain_ckpt) {
  const Checkpoint b = load_checkpoint(blind_ckpt);
  const Checkpoint p = load_checkpoint(plain_ckpt);
  if (b.kind != BranchKind::kBlind || p.kind != BranchKind::kPlain) {
    throw std::runtime_error("resume: expected a blind and a plain checkpoint");
  }
  if (b.loop_iteration != p.loop_iteration || b.rng_state != p.rng_state) {
    throw std::runtime_error("resume: checkpoints come from different training states");
  }
  if (std::to_string(sched.steps()) != b.config.at("t_train")) {
    throw std::runtime_error("resume: schedule length differs from checkpoint");
  }
  Trainer tr(sched, cfg, BlindSpotNetConfig::from_echo(b.config),
             PlainNetConfig::from_echo(p.config), b.config);
  restore_params(b.params, tr.models_.blind->parameters());
  restore_params(p.params, tr.models_.plain->parameters());
  tr.blind_opt_.import_state(b.params, b.iteration);
  tr.plain_opt_.import_state(p.params, p.iteration);
  tr.rng_.set_state(b.rng_state);
  tr.iteration_ = static_cast<int>(b.loop_iteration);
  return tr;
}

TrainBatch Trainer::draw_batch(const PatchDataset& data) {
  if (data.patches.empty()) throw std::invalid_argument("training dataset is empty");
  TrainBatch b;
  const int n = static_cast<int>(data.patches.size());
  for (int i = 0; i < cfg_.batch_size; ++i) {
    const Image& x0 = data.patches[rng_.uniform_int(0, n - 1)];
    b.x0.push_back(x0);
    b.t.push_back(rng_.uniform_int(1, sched_.steps()));
    b.eps.push_back(rng_.normal_image(x0.height(), x0.width(), x0.channels()));
    b.drop_cond.push_back(rng_.bernoulli(cfg_.cond_dropout));
    b.shuffle.push_back(rng_.bernoulli(cfg_.bsn_pd_prob));
  }
  return b;
}

double Trainer::blind_batch(const TrainBatch& batch) {
  auto params = models_.blind->parameters();
  for (auto* p : params) p->zero_grad();
  const double n = static_cast<double>(batch.x0.size());
  double total = 0.0;
  for (std::size_t i = 0; i < batch.x0.size(); ++i) {
    Image x0 = batch.x0[i];
    Image x_t = forward_diffuse(x0, batch.t[i], batch.eps[i], sched_);
    const int f = cfg_.bsn_pd_factor;
    if (batch.shuffle[i] && f > 1 && x0.height() % f == 0 && x0.width() % f == 0) {
      x0 = pd_down(x0, f);
      x_t = pd_down(x_t, f);
    }
    const Image cond = batch.drop_cond[i] ? Image(x0.height(), x0.width(), x0.channels(), 0.0) : x0;
    BlindSpotNet::Cache cache;
    const nn::Tensor pred = models_.blind->forward(BlindSpotNet::pack_input(x_t, &cond),
                                                   batch.t[i], &cache);
    nn::Tensor d_out;
    const nn::Tensor target = image_to_tensor(x0);
    total += loss_and_grad(pred, target, cfg_.loss, 1.0 / (n * pred.v.size()), d_out);
    models_.blind->backward(d_out, cache);
  }
  return total / n;
}

double Trainer::plain_batch(const TrainBatch& batch) {
  auto params = models_.plain->parameters();
  for (auto* p : params) p->zero_grad();
  const double n = static_cast<double>(batch.x0.size());
  double total = 0.0;
  for (std::size_t i = 0; i < batch.x0.size(); ++i) {
    const Image x_t = forward_diffuse(batch.x0[i], batch.t[i], batch.eps[i], sched_);
    PlainNet::Cache cache;
    const nn::Tensor pred = models_.plain->forward(PlainNet::pack_input(x_t), batch.t[i], &cache);
    nn::Tensor d_out;
    const nn::Tensor target = image_to_tensor(batch.x0[i]);
    total += loss_and_grad(pred, target, cfg_.loss, 1.0 / (n * pred.v.size()), d_out);
    models_.plain->backward(d_out, cache);
  }
  return total / n;
}

void Trainer::clip_and_step(const std::vector<nn::Param*>& params, Adam& opt) {
  if (cfg_.grad_clip > 0.0) {
    double sq = 0.0;
    for (const auto* p : params)
      for (float g : p->grad) sq += static_cast<double>(g) * g;
    const double norm = std::sqrt(sq);
    if (norm > cfg_.grad_clip) {
      const float s = static_cast<float>(cfg_.grad_clip / norm);
      for (auto* p : params)
        for (float& g : p->grad) g *= s;
    }
  }
  opt.step(cfg_.learning_rate);
}

StepLosses Trainer::train_step(const TrainBatch& batch, bool train_blind, bool train_plain) {
  StepLosses out;
  if (train_plain) {
    out.plain = plain_batch(batch);
    if (!std::isfinite(out.plain)) {
      throw NumericError("non-finite plain-branch loss at iteration " +
                               std::to_string(iteration_ + 1) + " (rng state " + rng_.digest() + ")");
    }
  }
  if (train_blind) {
    out.blind = blind_batch(batch);
    if (!std::isfinite(out.blind)) {
      throw NumericError("non-finite blind-branch loss at iteration " +
                               std::to_string(iteration_ + 1) + " (rng state " + rng_.digest() + ")");
    }
  }
  if (train_plain) clip_and_step(models_.plain->parameters(), plain_opt_);
  if (train_blind) clip_and_step(models_.blind->parameters(), blind_opt_);
  return out;
}

TrainLog Trainer::run(const PatchDataset& data, int until, const std::filesystem::path& out_dir) {
  TrainLog log;
  const auto start = std::chrono::steady_clock::now();
  double sum_b = 0.0, sum_u = 0.0;
  int n_b = 0, n_u = 0;
  std::string last_safe;
  auto write = [&] {
    try {
      save(out_dir);
      last_safe = out_dir.string() + " at iteration " + std::to_string(iteration_);
    } catch (const std::exception& e) {
      throw IoError(std::string(e.what()) + "; last safe checkpoint: " +
                               (last_safe.empty() ? std::string("none") : last_safe));
    }
  };
  while (iteration_ < until) {
    const bool tb = iteration_ < cfg_.iters_blind;
    const bool tu = iteration_ < cfg_.iters_plain;
    const TrainBatch batch = draw_batch(data);
    const StepLosses l = train_step(batch, tb, tu);
    ++iteration_;
    if (tb) sum_b += l.blind, ++n_b;
    if (tu) sum_u += l.plain, ++n_u;
    if (cfg_.log_interval > 0 && (iteration_ % cfg_.log_interval == 0 || iteration_ == until)) {
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (n_b) log.records.push_back({iteration_, "blind", sum_b / n_b, wall, rng_.digest()});
      if (n_u) log.records.push_back({iteration_, "plain", sum_u / n_u, wall, rng_.digest()});
      sum_b = sum_u = 0.0;
      n_b = n_u = 0;
    }
    if (!out_dir.empty() && cfg_.checkpoint_interval > 0 &&
        iteration_ % cfg_.checkpoint_interval == 0) {
      write();
    }
  }
  if (!out_dir.empty()) write();
  return log;
}

Checkpoint Trainer::checkpoint(BranchKind kind) const {
  Checkpoint c;
  c.kind = kind;
  c.loop_iteration = static_cast<std::uint64_t>(iteration_);
  c.config = echo_;
  c.rng_state = rng_.state();
  if (kind == BranchKind::kBlind) {
    c.params = snapshot_params(models_.blind->parameters());
    blind_opt_.export_state(c.params);
    c.iteration = blind_opt_.steps();
  } else {
    c.params = snapshot_params(models_.plain->parameters());
    plain_opt_.export_state(c.params);
    c.iteration = plain_opt_.steps();
  }
  return c;
}

void Trainer::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  save_checkpoint(checkpoint(BranchKind::kBlind), dir / "blind.ckpt");
  save_checkpoint(checkpoint(BranchKind::kPlain), dir / "plain.ckpt");
}

TrainResult train(const PatchDataset& data, const TrainConfig& cfg,
                  const BlindSpotNetConfig& blind_cfg, const PlainNetConfig& plain_cfg,
                  const NoiseSchedule& sched, const std::filesystem::path& out_dir,
                  std::map<std::string, std::string> echo) {
  if (data.patches.empty()) throw std::invalid_argument("training dataset is empty");
  Trainer tr(sched, cfg, blind_cfg, plain_cfg, std::move(echo));
  TrainResult res;
  res.log = tr.run(data, cfg.total_iterations(), out_dir);
  res.blind_checkpoint = out_dir / "blind.ckpt";
  res.plain_checkpoint = out_dir / "plain.ckpt";
  res.log.write_csv(out_dir / "train_log.csv");
  return res;
}

}  // namespace bsgd
