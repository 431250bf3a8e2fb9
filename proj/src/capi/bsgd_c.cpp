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

#include "bsgd/bsgd.h"

#include <array>
#include <cstring>
#include <exception>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>

#include "bsgd/config.hpp"
#include "bsgd/errors.hpp"
#include "bsgd/image_io.hpp"
#include "bsgd/metrics.hpp"
#include "bsgd/models.hpp"
#include "bsgd/oracle.hpp"
#include "bsgd/plot.hpp"
#include "bsgd/rng.hpp"
#include "bsgd/sampler.hpp"
#include "bsgd/synth_data.hpp"
#include "bsgd/trainer.hpp"
#include "bsgd_code_digest.h"

struct bsgd_config {
  bsgd::Config cfg;
};

struct bsgd_image {
  bsgd::Image img;
};

struct bsgd_models {
  std::unique_ptr<bsgd::BlindSpotNet> blind;
  std::unique_ptr<bsgd::PlainNet> plain;
  std::map<std::string, std::string> echo;
  std::string digest;
};

struct bsgd_run {
  bsgd::RunRecord rec;
};

namespace {

thread_local std::string g_last_error;

bsgd_status fail(bsgd_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Runs f, translating exceptions into status codes.
template <class F>
bsgd_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const bsgd::ConfigError& e) {
    return fail(BSGD_ERR_CONFIG, e.what());
  } catch (const bsgd::IoError& e) {
    return fail(BSGD_ERR_IO, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(BSGD_ERR_IO, e.what());
  } catch (const bsgd::NumericError& e) {
    return fail(BSGD_ERR_NUMERIC, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(BSGD_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(BSGD_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(BSGD_ERR_RUNTIME, "unknown error");
  }
}

bsgd_status copy_out(const std::string& s, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (!buf) return BSGD_OK;
  if (cap < s.size() + 1) return fail(BSGD_ERR_INVALID_ARGUMENT, "buffer too small");
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return BSGD_OK;
}

#define BSGD_REQUIRE(cond, what) \
  if (!(cond)) return fail(BSGD_ERR_INVALID_ARGUMENT, what)

bsgd::Image quantized(const bsgd::Image& x) {
  bsgd::Image out = x;
  for (double& v : out.values()) v = bsgd::storage_to_internal(bsgd::quantize_storage(v));
  return out;
}

// Checkpoint echo keys that must agree with the sampling config.
constexpr const char* kMustMatch[] = {"channels", "t_train", "beta_start", "beta_end",
                                      "patch_size"};

std::string models_mismatch(const bsgd_models& m, const bsgd::Config& cfg) {
  std::string out;
  for (const char* key : kMustMatch) {
    auto it = m.echo.find(key);
    if (it == m.echo.end()) continue;
    const std::string& want = cfg.get(key);
    bool same = it->second == want;
    if (!same) {
      // Numeric keys may be spelled differently (1e-4 vs 0.0001).
      try {
        same = std::stod(it->second) == std::stod(want);
      } catch (const std::exception&) {
      }
    }
    if (!same) out += std::string(out.empty() ? "" : ", ") + key + " (checkpoint " + it->second +
                      ", config " + want + ")";
  }
  return out;
}

bsgd_status check_input(const bsgd_models& models, const bsgd::Config& c, const bsgd::Image& x) {
  if (const std::string bad = models_mismatch(models, c); !bad.empty()) {
    return fail(BSGD_ERR_INCOMPATIBLE, "checkpoint/config mismatch: " + bad);
  }
  const bsgd::SamplerConfig sc = bsgd::sampler_config_from(c);
  if (x.channels() != models.blind->config().channels) {
    return fail(BSGD_ERR_INCOMPATIBLE, "input has " + std::to_string(x.channels()) +
                                           " channels, checkpoints expect " +
                                           std::to_string(models.blind->config().channels));
  }
  // The plain branch pools by 2 and the first step shuffles by pd_factor.
  const int m = std::lcm(2, sc.pd_factor);
  if (x.height() % m || x.width() % m) {
    return fail(BSGD_ERR_INCOMPATIBLE, "input " + x.shape_string() +
                                           ": height and width must be multiples of " +
                                           std::to_string(m));
  }
  return BSGD_OK;
}

}  // namespace

extern "C" {

const char* bsgd_last_error(void) { return g_last_error.c_str(); }

const char* bsgd_status_name(bsgd_status status) {
  switch (status) {
    case BSGD_OK: return "ok";
    case BSGD_ERR_INVALID_ARGUMENT: return "invalid argument";
    case BSGD_ERR_CONFIG: return "configuration error";
    case BSGD_ERR_IO: return "i/o error";
    case BSGD_ERR_INCOMPATIBLE: return "incompatible checkpoint";
    case BSGD_ERR_NUMERIC: return "numeric failure";
    case BSGD_ERR_RUNTIME: return "runtime error";
  }
  return "unknown status";
}

const char* bsgd_version(void) { return "1.0.0"; }
const char* bsgd_code_digest(void) { return BSGD_CODE_DIGEST; }

// ---- configuration ----

bsgd_status bsgd_config_new(bsgd_config** out) {
  BSGD_REQUIRE(out, "out is NULL");
  return guarded([&] {
    *out = new bsgd_config{};
    return BSGD_OK;
  });
}

bsgd_status bsgd_config_load(const char* path, bsgd_config** out) {
  BSGD_REQUIRE(path && out, "NULL argument");
  return guarded([&] {
    *out = new bsgd_config{bsgd::Config::load(path)};
    return BSGD_OK;
  });
}

bsgd_status bsgd_config_parse(const char* text, bsgd_config** out) {
  BSGD_REQUIRE(text && out, "NULL argument");
  return guarded([&] {
    *out = new bsgd_config{bsgd::Config::parse_text(text)};
    return BSGD_OK;
  });
}

bsgd_status bsgd_config_clone(const bsgd_config* cfg, bsgd_config** out) {
  BSGD_REQUIRE(cfg && out, "NULL argument");
  return guarded([&] {
    *out = new bsgd_config{cfg->cfg};
    return BSGD_OK;
  });
}

bsgd_status bsgd_config_set(bsgd_config* cfg, const char* key, const char* value) {
  BSGD_REQUIRE(cfg && key && value, "NULL argument");
  return guarded([&] {
    cfg->cfg.set(key, value);
    return BSGD_OK;
  });
}

bsgd_status bsgd_config_get(const bsgd_config* cfg, const char* key, char* buf, size_t cap,
                            size_t* needed) {
  BSGD_REQUIRE(cfg && key, "NULL argument");
  return guarded([&] { return copy_out(cfg->cfg.get(key), buf, cap, needed); });
}

bsgd_status bsgd_config_to_text(const bsgd_config* cfg, char* buf, size_t cap, size_t* needed) {
  BSGD_REQUIRE(cfg, "NULL argument");
  return guarded([&] { return copy_out(cfg->cfg.to_text(), buf, cap, needed); });
}

void bsgd_config_free(bsgd_config* cfg) { delete cfg; }

size_t bsgd_config_key_count(void) { return bsgd::config_registry().size(); }

const char* bsgd_config_key_name(size_t index) {
  const auto& reg = bsgd::config_registry();
  return index < reg.size() ? reg[index].name.c_str() : nullptr;
}

const char* bsgd_config_key_default(size_t index) {
  const auto& reg = bsgd::config_registry();
  return index < reg.size() ? reg[index].default_value.c_str() : nullptr;
}

const char* bsgd_config_key_help(size_t index) {
  const auto& reg = bsgd::config_registry();
  return index < reg.size() ? reg[index].help.c_str() : nullptr;
}

// ---- images ----

bsgd_status bsgd_image_new(int height, int width, int channels, bsgd_image** out) {
  BSGD_REQUIRE(out, "out is NULL");
  BSGD_REQUIRE(height > 0 && width > 0 && channels > 0, "image dimensions must be positive");
  return guarded([&] {
    *out = new bsgd_image{bsgd::Image(height, width, channels)};
    return BSGD_OK;
  });
}

bsgd_status bsgd_image_load_png(const char* path, int channels, bsgd_image** out) {
  BSGD_REQUIRE(path && out, "NULL argument");
  return guarded([&] {
    bsgd::Image img = bsgd::read_png(path);
    if (channels > 0) img = bsgd::convert_channels(img, channels);
    *out = new bsgd_image{std::move(img)};
    return BSGD_OK;
  });
}

bsgd_status bsgd_image_save_png(const bsgd_image* img, const char* path) {
  BSGD_REQUIRE(img && path, "NULL argument");
  return guarded([&] {
    bsgd::write_png(img->img, path);
    return BSGD_OK;
  });
}

bsgd_status bsgd_image_shape(const bsgd_image* img, int* height, int* width, int* channels) {
  BSGD_REQUIRE(img, "NULL image");
  if (height) *height = img->img.height();
  if (width) *width = img->img.width();
  if (channels) *channels = img->img.channels();
  return BSGD_OK;
}

double* bsgd_image_data(bsgd_image* img) { return img ? img->img.values().data() : nullptr; }
const double* bsgd_image_const_data(const bsgd_image* img) {
  return img ? img->img.values().data() : nullptr;
}
void bsgd_image_free(bsgd_image* img) { delete img; }

bsgd_status bsgd_synth_pair(const bsgd_config* cfg, uint64_t index, bsgd_image** clean,
                            bsgd_image** noisy) {
  BSGD_REQUIRE(cfg && clean && noisy, "NULL argument");
  return guarded([&] {
    bsgd::SceneConfig scene = bsgd::scene_from(cfg->cfg);
    scene.patch_size = static_cast<int>(cfg->cfg.get_int("eval_size"));
    const bsgd::NoiseConfig noise = bsgd::noise_from(cfg->cfg);
    const std::uint64_t idx = cfg->cfg.get_uint("eval_first_index") + index;
    bsgd::Image c = bsgd::gen_clean(scene, idx);
    bsgd::Image n = quantized(bsgd::add_correlated_noise(c, noise, idx));
    *clean = new bsgd_image{quantized(c)};
    *noisy = new bsgd_image{std::move(n)};
    return BSGD_OK;
  });
}

// ---- training ----

bsgd_status bsgd_train(const bsgd_config* cfg, const char* out_dir) {
  BSGD_REQUIRE(cfg && out_dir, "NULL argument");
  return guarded([&] {
    const bsgd::Config& c = cfg->cfg;
    const bsgd::NoiseSchedule sched = bsgd::schedule_from(c);
    const bsgd::TrainConfig tc = bsgd::train_config_from(c);
    const bsgd::BlindSpotNetConfig bc = bsgd::blind_config_from(c);
    const bsgd::PlainNetConfig pc = bsgd::plain_config_from(c);
    const bsgd::PatchDataset data = bsgd::dataset_from(c);
    std::filesystem::create_directories(out_dir);
    data.write_manifest(std::filesystem::path(out_dir) / "dataset_manifest.csv");
    bsgd::train(data, tc, bc, pc, sched, out_dir, c.values());
    return BSGD_OK;
  });
}

// ---- models and sampling ----

bsgd_status bsgd_models_load(const char* blind_ckpt, const char* plain_ckpt, bsgd_models** out) {
  BSGD_REQUIRE(blind_ckpt && plain_ckpt && out, "NULL argument");
  return guarded([&] {
    const bsgd::Checkpoint b = bsgd::load_checkpoint(blind_ckpt);
    const bsgd::Checkpoint p = bsgd::load_checkpoint(plain_ckpt);
    if (b.kind != bsgd::BranchKind::kBlind || p.kind != bsgd::BranchKind::kPlain) {
      return fail(BSGD_ERR_INCOMPATIBLE, "expected a blind-spot and a plain checkpoint, in that order");
    }
    auto m = std::make_unique<bsgd_models>();
    m->blind = bsgd::blind_from_checkpoint(b);
    m->plain = bsgd::plain_from_checkpoint(p);
    if (m->blind->config().channels != m->plain->config().channels) {
      return fail(BSGD_ERR_INCOMPATIBLE, "branch checkpoints disagree on channel count");
    }
    m->echo = b.config;
    m->digest = bsgd::fnv1a_hex(bsgd::parameter_digest(m->blind->parameters()) +
                                bsgd::parameter_digest(m->plain->parameters()));
    *out = m.release();
    return BSGD_OK;
  });
}

bsgd_status bsgd_models_check(const bsgd_models* models, const bsgd_config* cfg) {
  BSGD_REQUIRE(models && cfg, "NULL argument");
  return guarded([&] {
    const std::string bad = models_mismatch(*models, cfg->cfg);
    if (!bad.empty()) return fail(BSGD_ERR_INCOMPATIBLE, "checkpoint/config mismatch: " + bad);
    return BSGD_OK;
  });
}

bsgd_status bsgd_models_digest(const bsgd_models* models, char* buf, size_t cap, size_t* needed) {
  BSGD_REQUIRE(models, "NULL argument");
  return copy_out(models->digest, buf, cap, needed);
}

void bsgd_models_free(bsgd_models* models) { delete models; }

bsgd_status bsgd_denoise_check(const bsgd_models* models, const bsgd_config* cfg,
                               const bsgd_image* noisy) {
  BSGD_REQUIRE(models && cfg && noisy, "NULL argument");
  return guarded([&] { return check_input(*models, cfg->cfg, noisy->img); });
}

bsgd_status bsgd_denoise(const bsgd_models* models, const bsgd_config* cfg,
                         const bsgd_image* noisy, bsgd_image** out, bsgd_run** record) {
  BSGD_REQUIRE(models && cfg && noisy && out, "NULL argument");
  return guarded([&] {
    const bsgd::Config& c = cfg->cfg;
    const bsgd::Image& x = noisy->img;
    if (bsgd_status st = check_input(*models, c, x); st != BSGD_OK) return st;
    const bsgd::SamplerConfig sc = bsgd::sampler_config_from(c);
    const bsgd::NoiseSchedule sched = bsgd::schedule_from(c);
    const bsgd::Branches br{models->blind.get(), models->plain.get()};
    std::unique_ptr<bsgd_run> rec = record ? std::make_unique<bsgd_run>() : nullptr;
    bsgd::Image y = bsgd::sample_full(x, br, sched, sc, rec ? &rec->rec : nullptr);
    *out = new bsgd_image{std::move(y)};
    if (record) *record = rec.release();
    return BSGD_OK;
  });
}

bsgd_status bsgd_run_save(const bsgd_run* record, const char* dir) {
  BSGD_REQUIRE(record && dir, "NULL argument");
  return guarded([&] {
    record->rec.save(dir);
    return BSGD_OK;
  });
}

void bsgd_run_free(bsgd_run* record) { delete record; }

// ---- metrics ----

bsgd_status bsgd_psnr(const bsgd_image* a, const bsgd_image* b, double* out_db) {
  BSGD_REQUIRE(a && b && out_db, "NULL argument");
  return guarded([&] {
    *out_db = bsgd::psnr_8bit(a->img, b->img);
    return BSGD_OK;
  });
}

bsgd_status bsgd_ssim(const bsgd_image* a, const bsgd_image* b, double* out) {
  BSGD_REQUIRE(a && b && out, "NULL argument");
  return guarded([&] {
    *out = bsgd::ssim_8bit(a->img, b->img);
    return BSGD_OK;
  });
}

bsgd_status bsgd_evaluate_dirs(const char* denoised_dir, const char* clean_dir,
                               const char* csv_path, double* mean_psnr, double* mean_ssim) {
  BSGD_REQUIRE(denoised_dir && clean_dir, "NULL argument");
  return guarded([&] {
    const bsgd::MetricReport rep = bsgd::evaluate_directories(denoised_dir, clean_dir);
    if (csv_path) rep.write_csv(csv_path);
    if (mean_psnr) *mean_psnr = rep.mean_psnr();
    if (mean_ssim) *mean_ssim = rep.mean_ssim();
    return BSGD_OK;
  });
}

// ---- oracle ----

bsgd_status bsgd_oracle_check(const bsgd_config* cfg, const char* csv_path,
                              bsgd_oracle_report* out) {
  BSGD_REQUIRE(cfg && out, "NULL argument");
  return guarded([&] {
    const bsgd::NoiseSchedule sched = bsgd::schedule_from(cfg->cfg);
    const bsgd::MomentReport r = bsgd::oracle_sampler_check(
        bsgd::oracle_world_from(cfg->cfg), sched, bsgd::oracle_options_from(cfg->cfg));
    if (csv_path) r.write_csv(csv_path);
    *out = bsgd_oracle_report{r.runs,
                              r.values,
                              r.mean,
                              r.variance,
                              r.variance_defined,
                              r.mean_ok,
                              r.variance_ok,
                              r.guidance_neutral,
                              r.refinement_delta,
                              r.refinement_max,
                              r.refinement_ok,
                              r.passed()};
    return BSGD_OK;
  });
}

// ---- plots and files ----

bsgd_status bsgd_plot_lines(const char* path, const char* title, const char* x_label,
                            const double* x, size_t n, const double* const* ys,
                            const char* const* y_labels, size_t panels) {
  BSGD_REQUIRE(path && x && ys && panels > 0, "NULL argument");
  return guarded([&] {
    static const std::array<std::uint8_t, 3> colors[] = {{31, 119, 180}, {214, 39, 40},
                                                          {44, 160, 44}, {148, 103, 189}};
    std::vector<bsgd::PlotPanel> ps;
    for (size_t i = 0; i < panels; ++i) {
      BSGD_REQUIRE(ys[i], "NULL series");
      const std::string label = y_labels && y_labels[i] ? y_labels[i] : "";
      ps.push_back({label,
                    {{label, std::vector<double>(x, x + n), std::vector<double>(ys[i], ys[i] + n),
                      colors[i % 4]}}});
    }
    bsgd::PlotOptions opt;
    opt.title = title ? title : "";
    opt.x_label = x_label ? x_label : "";
    bsgd::write_line_plot(path, ps, opt);
    return BSGD_OK;
  });
}

bsgd_status bsgd_file_digest(const char* path, char* buf, size_t cap, size_t* needed) {
  BSGD_REQUIRE(path, "NULL argument");
  return guarded([&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw bsgd::IoError(std::string("cannot read ") + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return copy_out(bsgd::fnv1a_hex(ss.str()), buf, cap, needed);
  });
}

}  // extern "C"
