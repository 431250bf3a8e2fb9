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

#include "bsgd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include "bsgd/rng.hpp"

namespace bsgd {

Image analytic_predict_x0(const Image& x_t, int t, const GaussianWorld& world,
                          const NoiseSchedule& sched) {
  if (!(world.std >= 0.0)) throw std::invalid_argument("oracle: std must be non-negative");
  const double ab = sched.alpha_bar(t);
  const double s2 = world.std * world.std;
  const double denom = ab * s2 + 1.0 - ab;
  const double gain = denom > 0.0 ? std::sqrt(ab) * s2 / denom : 1.0 / std::sqrt(ab);
  const double shift = std::sqrt(ab) * world.mean;
  Image out = x_t;
  for (double& v : out.values()) v = world.mean + gain * (v - shift);
  return out;
}

Image AnalyticPredictor::predict_x0(const Image& x_t, int t, const Image*) const {
  Image out = analytic_predict_x0(x_t, t, world_, *sched_);
  if (bias_ != 0.0)
    for (double& v : out.values()) v += bias_;
  return out;
}

MomentReport oracle_sampler_check(const GaussianWorld& world, const NoiseSchedule& sched,
                                  const OracleOptions& opt) {
  if (opt.n_samples < 1) throw std::invalid_argument("oracle: n_samples must be >= 1");
  if (!(world.std > 0.0)) throw std::invalid_argument("oracle: std must be positive");
  const AnalyticPredictor predictor(world, sched, opt.bias);
  const Branches both{&predictor, &predictor};

  SamplerConfig cfg;
  cfg.w = opt.w;
  cfg.steps = opt.steps;
  cfg.rounds = 1;
  cfg.t_start = opt.t_start;
  cfg.p_replace = 0.0;
  cfg.pd_factor = 1;
  cfg.eta = 0.0;
  cfg.init_mode = InitMode::kRenoise;

  MomentReport rep;
  rep.runs = opt.n_samples;
  double sum = 0.0, sum_sq = 0.0;
  for (int k = 0; k < opt.n_samples; ++k) {
    // x_ref ~ data, renoised to t_start, is an exact draw of the t_start marginal.
    Rng rng(derive_seed(opt.seed, k, 0x0eac1e));
    Image x_ref = rng.normal_image(opt.image_size, opt.image_size, 1);
    for (double& v : x_ref.values()) v = world.mean + world.std * v;
    cfg.seed = derive_seed(opt.seed, k, 0x5a3);
    const Image out = sample_round(x_ref, both, sched, cfg, 0).final_estimate;
    for (double v : out.values()) {
      sum += v;
      sum_sq += v * v;
    }
    rep.values += out.size();

    if (k == 0) {
      SamplerConfig c0 = cfg, c1 = cfg;
      c0.w = 0.0;
      c1.w = 1.0;
      rep.guidance_neutral = sample_round(x_ref, both, sched, c0, 0)
                                 .final_estimate.bitwise_equal(
                                     sample_round(x_ref, both, sched, c1, 0).final_estimate);
      SamplerConfig fine = cfg;
      fine.steps = std::min(2 * cfg.steps, cfg.t_start);
      const Image refined = sample_round(x_ref, both, sched, fine, 0).final_estimate;
      double sq = 0.0;
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double d = refined[i] - out[i];
        sq += d * d;
        rep.refinement_max = std::max(rep.refinement_max, std::abs(d));
      }
      rep.refinement_delta = std::sqrt(sq / static_cast<double>(out.size()));
    }
  }
  const double n = static_cast<double>(rep.values);
  rep.mean = sum / n;
  rep.variance_defined = opt.n_samples > 1;
  if (rep.variance_defined) rep.variance = (sum_sq - n * rep.mean * rep.mean) / (n - 1.0);
  rep.mean_ok = std::abs(rep.mean - world.mean) <= opt.mean_tol;
  const double s2 = world.std * world.std;
  rep.variance_ok = rep.variance_defined && std::abs(rep.variance - s2) <= opt.var_rel_tol * s2;
  rep.refinement_ok = rep.refinement_delta <= opt.refine_tol;
  return rep;
}

void MomentReport::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(10);
  out << "quantity,value,ok\n";
  out << "runs," << runs << ",\n";
  out << "values," << values << ",\n";
  out << "mean," << mean << ',' << (mean_ok ? "pass" : "fail") << '\n';
  if (variance_defined) {
    out << "variance," << variance << ',' << (variance_ok ? "pass" : "fail") << '\n';
  } else {
    out << "variance,undefined,\n";
  }
  out << "guidance_neutral," << (guidance_neutral ? 1 : 0) << ','
      << (guidance_neutral ? "pass" : "fail") << '\n';
  out << "refinement_max," << refinement_max << ",\n";
  out << "refinement_delta," << refinement_delta << ',' << (refinement_ok ? "pass" : "fail")
      << '\n';
}

}  // namespace bsgd
