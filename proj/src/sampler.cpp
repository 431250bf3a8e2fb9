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

#include "bsgd/sampler.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "bsgd/errors.hpp"
#include "bsgd/image_io.hpp"
#include "bsgd/rng.hpp"

namespace bsgd {
namespace {

constexpr std::uint64_t kInitStream = 0x1417;
constexpr std::uint64_t kZStream = 0x2a2a;
constexpr std::uint64_t kMaskStream = 0x3a5c;
constexpr std::uint64_t kReferenceStream = 0xc0c0;

std::string indexed(const char* prefix, int round, int step) {
  char buf[64];
  if (step < 0) {
    std::snprintf(buf, sizeof(buf), "%s_r%02d.png", prefix, round);
  } else {
    std::snprintf(buf, sizeof(buf), "%s_r%02d_s%02d.png", prefix, round, step);
  }
  return buf;
}

}  // namespace

void SamplerConfig::validate(const NoiseSchedule& sched) const {
  if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("guidance weight w must lie in [0, 1]");
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  if (t_start < 1 || t_start > sched.steps()) {
    throw std::invalid_argument("t_start must lie in [1, " + std::to_string(sched.steps()) + "]");
  }
  if (steps > t_start) throw std::invalid_argument("steps exceeds t_start");
  if (!(p_replace >= 0.0 && p_replace <= 1.0)) {
    throw std::invalid_argument("p_replace must lie in [0, 1]");
  }
  if (pd_factor < 1) throw std::invalid_argument("pd_factor must be >= 1");
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in [0, 1]");
}

std::map<std::string, std::string> SamplerConfig::echo() const {
  std::ostringstream wv, pv, ev;
  wv << std::setprecision(17) << w;
  pv << std::setprecision(17) << p_replace;
  ev << std::setprecision(17) << eta;
  return {{"w", wv.str()},
          {"steps", std::to_string(steps)},
          {"rounds", std::to_string(rounds)},
          {"t_start", std::to_string(t_start)},
          {"p_replace", pv.str()},
          {"pd_factor", std::to_string(pd_factor)},
          {"eta", ev.str()},
          {"init_mode", init_mode == InitMode::kRenoise ? "renoise" : "pure_noise"},
          {"seed", std::to_string(seed)}};
}

std::uint64_t round_seed(std::uint64_t run_seed, int round) {
  return derive_seed(run_seed, static_cast<std::uint64_t>(round), kInitStream);
}

std::uint64_t step_mask_seed(std::uint64_t run_seed, int round, int step) {
  return derive_seed(run_seed ^ kMaskStream, static_cast<std::uint64_t>(round),
                     static_cast<std::uint64_t>(step) + 1);
}

std::uint64_t reference_mask_seed(std::uint64_t run_seed, int round) {
  return derive_seed(run_seed ^ kReferenceStream, static_cast<std::uint64_t>(round));
}

std::vector<int> make_trajectory(int t_start, int steps, const NoiseSchedule& sched) {
  if (steps < 1) throw std::invalid_argument("make_trajectory: steps must be >= 1");
  if (t_start < 1 || t_start > sched.steps()) {
    throw std::invalid_argument("make_trajectory: t_start outside the schedule");
  }
  if (steps > t_start) throw std::invalid_argument("make_trajectory: steps exceeds t_start");
  const int stride = t_start / steps;
  std::vector<int> traj;
  for (int k = 0; k < steps; ++k) traj.push_back(t_start - k * stride);
  traj.push_back(0);
  return traj;
}

Image guided_eps(const Image& x_t, int t, const Image* cond, const Branches& branches,
                 double w, const NoiseSchedule& sched) {
  if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("guided_eps: w outside [0, 1]");
  auto plain_eps = [&] {
    if (!branches.plain) throw std::invalid_argument("guided_eps: plain branch missing");
    return x0_to_eps(x_t, branches.plain->predict_x0(x_t, t, nullptr), t, sched);
  };
  auto blind_eps = [&] {
    if (!branches.blind) throw std::invalid_argument("guided_eps: blind branch missing");
    if (!cond) throw std::invalid_argument("guided_eps: conditioning image required when w > 0");
    return x0_to_eps(x_t, branches.blind->predict_x0(x_t, t, cond), t, sched);
  };
  if (w == 0.0) return plain_eps();
  if (w == 1.0) return blind_eps();
  return axpby(w, blind_eps(), 1.0 - w, plain_eps());
}

double ddim_sigma(int t, int t_prev, const NoiseSchedule& sched, double eta) {
  if (eta == 0.0) return 0.0;
  const double ab = sched.alpha_bar(t);
  const double ab_prev = sched.alpha_bar(t_prev);
  return eta * std::sqrt((1.0 - ab_prev) / (1.0 - ab)) * std::sqrt(1.0 - ab / ab_prev);
}

Image ddim_step(const Image& x_t, const Image& eps_mix, int t, int t_prev,
                const NoiseSchedule& sched, double eta, const Image* z) {
  if (!(t > t_prev && t_prev >= 0)) throw std::invalid_argument("ddim_step: need t > t_prev >= 0");
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("ddim_step: eta outside [0, 1]");
  const Image x0_hat = eps_to_x0(x_t, eps_mix, t, sched);
  const double ab_prev = sched.alpha_bar(t_prev);
  const double sigma = ddim_sigma(t, t_prev, sched, eta);
  double radicand = 1.0 - ab_prev - sigma * sigma;
  if (radicand < 0.0) {
    if (radicand < -1e-12) throw std::domain_error("ddim_step: negative direction variance");
    radicand = 0.0;
  }
  Image out = axpby(std::sqrt(ab_prev), x0_hat, std::sqrt(radicand), eps_mix);
  if (sigma > 0.0) {
    if (!z) throw std::invalid_argument("ddim_step: eta > 0 needs a noise draw");
    require_same_shape(out, *z, "ddim_step");
    out = axpby(1.0, out, sigma, *z);
  }
  return out;
}

RoundResult sample_round(const Image& x_ref, const Branches& branches,
                         const NoiseSchedule& sched, const SamplerConfig& cfg,
                         int round_index, RunRecord* record) {
  cfg.validate(sched);
  const int f = cfg.pd_factor;
  if (x_ref.height() % f || x_ref.width() % f) {
    throw std::invalid_argument("sample_round: image " + x_ref.shape_string() +
                                " not divisible by pd_factor " + std::to_string(f));
  }
  const auto traj = make_trajectory(cfg.t_start, cfg.steps, sched);
  const std::uint64_t seed = round_seed(cfg.seed, round_index);
  Rng init_rng(derive_seed(seed, 0));
  Rng z_rng(derive_seed(seed, kZStream));

  Image x = init_rng.normal_image(x_ref.height(), x_ref.width(), x_ref.channels());
  if (cfg.init_mode == InitMode::kRenoise) x = forward_diffuse(x_ref, cfg.t_start, x, sched);

  RoundResult result;
  Image cond = x_ref;
  for (int k = 0; k < cfg.steps; ++k) {
    const int t = traj[k];
    const int t_prev = traj[k + 1];
    Image eps;
    if (k == 0 && f > 1) {
      const Image x_pd = pd_down(x, f);
      const Image cond_pd = pd_down(cond, f);
      eps = pd_up(guided_eps(x_pd, t, &cond_pd, branches, cfg.w, sched), f);
    } else {
      eps = guided_eps(x, t, &cond, branches, cfg.w, sched);
    }
    Image x0_hat = eps_to_x0(x, eps, t, sched);
    const std::uint64_t mseed = step_mask_seed(cfg.seed, round_index, k);
    ReplacementMask mask = make_mask(x.height(), x.width(), cfg.p_replace, mseed);
    Image replaced = replace(x0_hat, x_ref, mask);
    if (!replaced.all_finite()) {
      throw NumericError("non-finite x0 estimate at round " + std::to_string(round_index) +
                               " step " + std::to_string(k) + " (mask seed " +
                               std::to_string(mseed) + ")");
    }

    std::optional<Image> z;
    if (cfg.eta > 0.0) z = z_rng.normal_image(x.height(), x.width(), x.channels());
    x = ddim_step(x, eps, t, t_prev, sched, cfg.eta, z ? &*z : nullptr);

    if (record) {
      record->steps.push_back({round_index, k, t, t_prev, mseed, std::move(mask), replaced});
    }
    result.estimates.push_back(replaced);
    cond = std::move(replaced);
    if (k + 1 == cfg.steps) result.final_estimate = std::move(x0_hat);
  }
  return result;
}

Image sample_full(const Image& x_noisy, const Branches& branches,
                  const NoiseSchedule& sched, const SamplerConfig& cfg, RunRecord* record) {
  cfg.validate(sched);
  if (!x_noisy.all_finite()) throw std::invalid_argument("sample_full: non-finite input");
  if (record) {
    *record = RunRecord{};
    record->noisy = x_noisy;
    record->config = cfg;
    record->trajectory = make_trajectory(cfg.t_start, cfg.steps, sched);
  }
  Image sum(x_noisy.height(), x_noisy.width(), x_noisy.channels(), 0.0);
  std::size_t count = 0;
  Image previous;
  for (int r = 0; r < cfg.rounds; ++r) {
    Image x_ref = x_noisy;
    std::uint64_t ref_seed = 0;
    if (r > 0) {
      ref_seed = reference_mask_seed(cfg.seed, r);
      x_ref = replace(previous,
                      x_noisy,
                      make_mask(x_noisy.height(), x_noisy.width(), cfg.p_replace, ref_seed));
    }
    if (record) record->rounds.push_back({r, round_seed(cfg.seed, r), ref_seed, x_ref});
    RoundResult res = sample_round(x_ref, branches, sched, cfg, r, record);
    for (const Image& e : res.estimates) {
      auto s = sum.values();
      auto v = e.values();
      for (std::size_t i = 0; i < s.size(); ++i) s[i] += v[i];
      ++count;
    }
    previous = std::move(res.final_estimate);
  }
  Image out = sum;
  for (double& v : out.values()) v /= static_cast<double>(count);
  out = clip(out);
  if (record) record->output = out;
  return out;
}

void RunRecord::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  write_png(noisy, dir / "noisy.png");
  write_png(output, dir / "output.png");
  for (const auto& r : rounds) write_png(r.reference, dir / indexed("reference", r.round, -1));
  for (const auto& s : steps) {
    write_png(s.estimate, dir / indexed("estimate", s.round, s.step));
    Image m(s.mask.height, s.mask.width, 1, -1.0);
    for (std::size_t i = 0; i < s.mask.bits.size(); ++i) m[i] = s.mask.bits[i] ? 1.0 : -1.0;
    write_png(m, dir / indexed("mask", s.round, s.step));
  }
  std::ofstream out(dir / "manifest.txt");
  if (!out) throw IoError("cannot write run record manifest in " + dir.string());
  for (const auto& [k, v] : config.echo()) out << "config." << k << "=" << v << "\n";
  out << "trajectory=";
  for (std::size_t i = 0; i < trajectory.size(); ++i) out << (i ? "," : "") << trajectory[i];
  out << "\n";
  for (const auto& r : rounds) {
    out << "round." << r.round << ".seed=" << r.seed << "\n";
    out << "round." << r.round << ".reference_mask_seed=" << r.reference_mask_seed << "\n";
  }
  for (const auto& s : steps) {
    out << "step." << s.round << "." << s.step << "=t:" << s.t << ",t_prev:" << s.t_prev
        << ",mask_seed:" << s.mask_seed << ",replaced:" << s.mask.count() << "\n";
  }
  out << "estimates=" << steps.size() << "\n";
}

}  // namespace bsgd
