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

// Exercises the shared library through its C header only.

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "bsgd/bsgd.h"

namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("bsgd_capi_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string get(const bsgd_config* c, const char* key) {
  size_t need = 0;
  EXPECT_EQ(bsgd_config_get(c, key, nullptr, 0, &need), BSGD_OK);
  std::string s(need, '\0');
  EXPECT_EQ(bsgd_config_get(c, key, s.data(), s.size(), &need), BSGD_OK);
  s.resize(need - 1);
  return s;
}

// Tiny models so the whole file runs in seconds.
bsgd_config* tiny_config() {
  bsgd_config* c = nullptr;
  EXPECT_EQ(bsgd_config_parse("bsn_channels = 4\nbsn_blocks = 1\nunet_channels = 4\n"
                              "temb_dim = 8\niters_blind = 2\niters_plain = 3\nbatch_size = 2\n"
                              "num_train = 4\npatch_size = 8\neval_size = 8\nsteps = 2\n"
                              "rounds = 2\nt_start = 10\nlog_interval = 1\n",
                              &c),
            BSGD_OK)
      << bsgd_last_error();
  return c;
}

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STREQ(bsgd_version(), "1.0.0");
  EXPECT_EQ(std::strlen(bsgd_code_digest()), 16u);
  EXPECT_STREQ(bsgd_status_name(BSGD_OK), "ok");
  EXPECT_STRNE(bsgd_status_name(BSGD_ERR_CONFIG), bsgd_status_name(BSGD_ERR_IO));
}

TEST(CApi, ConfigLifecycle) {
  bsgd_config* c = nullptr;
  ASSERT_EQ(bsgd_config_new(&c), BSGD_OK);
  EXPECT_EQ(get(c, "w"), "0.7");
  EXPECT_EQ(bsgd_config_set(c, "w", "0.3"), BSGD_OK);
  EXPECT_EQ(get(c, "w"), "0.3");

  EXPECT_EQ(bsgd_config_set(c, "nope", "1"), BSGD_ERR_CONFIG);
  EXPECT_NE(std::string(bsgd_last_error()).find("nope"), std::string::npos);
  EXPECT_EQ(bsgd_config_set(c, "w", "7"), BSGD_ERR_CONFIG);
  EXPECT_EQ(bsgd_config_set(nullptr, "w", "0.1"), BSGD_ERR_INVALID_ARGUMENT);

  bsgd_config* copy = nullptr;
  ASSERT_EQ(bsgd_config_clone(c, &copy), BSGD_OK);
  bsgd_config_set(copy, "w", "0.9");
  EXPECT_EQ(get(c, "w"), "0.3");

  size_t need = 0;
  ASSERT_EQ(bsgd_config_to_text(c, nullptr, 0, &need), BSGD_OK);
  std::string text(need, '\0');
  char tiny[4];
  EXPECT_EQ(bsgd_config_to_text(c, tiny, sizeof(tiny), &need), BSGD_ERR_INVALID_ARGUMENT);
  ASSERT_EQ(bsgd_config_to_text(c, text.data(), text.size(), &need), BSGD_OK);
  EXPECT_NE(text.find("w = 0.3"), std::string::npos);

  bsgd_config* parsed = nullptr;
  ASSERT_EQ(bsgd_config_parse(text.c_str(), &parsed), BSGD_OK);
  EXPECT_EQ(get(parsed, "w"), "0.3");

  bsgd_config* bad = nullptr;
  EXPECT_EQ(bsgd_config_parse("a = 1\nb = 2\n", &bad), BSGD_ERR_CONFIG);
  EXPECT_EQ(bad, nullptr);
  EXPECT_EQ(bsgd_config_load("/nonexistent/x.cfg", &bad), BSGD_ERR_IO);

  ASSERT_GT(bsgd_config_key_count(), 40u);
  EXPECT_STREQ(bsgd_config_key_name(0), "t_train");
  EXPECT_EQ(bsgd_config_key_name(100000), nullptr);
  bsgd_config_free(c);
  bsgd_config_free(copy);
  bsgd_config_free(parsed);
  bsgd_config_free(nullptr);
}

TEST(CApi, ImagesAndMetrics) {
  bsgd_image* a = nullptr;
  bsgd_image* b = nullptr;
  ASSERT_EQ(bsgd_image_new(16, 16, 1, &a), BSGD_OK);
  ASSERT_EQ(bsgd_image_new(16, 16, 1, &b), BSGD_OK);
  // One pixel off by 10 levels on a 16x16 frame.
  bsgd_image_data(b)[37] = 20.0 / 255.0;
  bsgd_image_data(a)[37] = 0.0;
  double p = 0.0, s = 0.0;
  ASSERT_EQ(bsgd_psnr(a, b, &p), BSGD_OK);
  EXPECT_NEAR(p, 52.2132032617976, 1e-6);
  ASSERT_EQ(bsgd_ssim(a, a, &s), BSGD_OK);
  EXPECT_DOUBLE_EQ(s, 1.0);

  const fs::path d = fresh_dir("images");
  ASSERT_EQ(bsgd_image_save_png(b, (d / "b.png").c_str()), BSGD_OK);
  bsgd_image* back = nullptr;
  ASSERT_EQ(bsgd_image_load_png((d / "b.png").c_str(), 0, &back), BSGD_OK);
  int h = 0, w = 0, c = 0;
  bsgd_image_shape(back, &h, &w, &c);
  EXPECT_EQ(h * 100 + w * 10 + c, 16 * 100 + 16 * 10 + 1);
  EXPECT_EQ(bsgd_image_load_png((d / "missing.png").c_str(), 0, &back), BSGD_ERR_IO);

  bsgd_image* small = nullptr;
  ASSERT_EQ(bsgd_image_new(8, 8, 1, &small), BSGD_OK);
  EXPECT_EQ(bsgd_psnr(a, small, &p), BSGD_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(bsgd_image_new(0, 8, 1, &small), BSGD_ERR_INVALID_ARGUMENT);
  bsgd_image_free(a);
  bsgd_image_free(b);
  bsgd_image_free(back);
}

TEST(CApi, TrainDenoiseRecord) {
  bsgd_config* cfg = tiny_config();
  const fs::path d = fresh_dir("train");
  ASSERT_EQ(bsgd_train(cfg, d.c_str()), BSGD_OK) << bsgd_last_error();
  for (const char* f : {"blind.ckpt", "plain.ckpt", "train_log.csv", "dataset_manifest.csv"})
    EXPECT_TRUE(fs::exists(d / f)) << f;

  bsgd_models* m = nullptr;
  ASSERT_EQ(bsgd_models_load((d / "blind.ckpt").c_str(), (d / "plain.ckpt").c_str(), &m), BSGD_OK)
      << bsgd_last_error();
  EXPECT_EQ(bsgd_models_check(m, cfg), BSGD_OK) << bsgd_last_error();

  bsgd_image* clean = nullptr;
  bsgd_image* noisy = nullptr;
  ASSERT_EQ(bsgd_synth_pair(cfg, 0, &clean, &noisy), BSGD_OK);
  bsgd_image* out = nullptr;
  bsgd_run* rec = nullptr;
  ASSERT_EQ(bsgd_denoise(m, cfg, noisy, &out, &rec), BSGD_OK) << bsgd_last_error();
  bsgd_image* again = nullptr;
  ASSERT_EQ(bsgd_denoise(m, cfg, noisy, &again, nullptr), BSGD_OK);
  EXPECT_EQ(std::memcmp(bsgd_image_const_data(out), bsgd_image_const_data(again),
                        8 * 8 * sizeof(double)),
            0);
  const fs::path rd = d / "record";
  ASSERT_EQ(bsgd_run_save(rec, rd.c_str()), BSGD_OK);
  EXPECT_TRUE(fs::exists(rd / "estimate_r01_s01.png"));

  // Incompatible inputs are refused before sampling.
  bsgd_image* odd = nullptr;
  bsgd_image_new(9, 9, 1, &odd);
  EXPECT_EQ(bsgd_denoise_check(m, cfg, odd), BSGD_ERR_INCOMPATIBLE);
  bsgd_image* rgb = nullptr;
  bsgd_image_new(8, 8, 3, &rgb);
  EXPECT_EQ(bsgd_denoise(m, cfg, rgb, &again, nullptr), BSGD_ERR_INCOMPATIBLE);
  bsgd_config* other = nullptr;
  bsgd_config_clone(cfg, &other);
  bsgd_config_set(other, "t_train", "200");
  EXPECT_EQ(bsgd_models_check(m, other), BSGD_ERR_INCOMPATIBLE);
  EXPECT_NE(std::string(bsgd_last_error()).find("t_train"), std::string::npos);

  EXPECT_EQ(bsgd_models_load((d / "plain.ckpt").c_str(), (d / "blind.ckpt").c_str(), &m),
            BSGD_ERR_INCOMPATIBLE);

  char digest[64];
  size_t need = 0;
  EXPECT_EQ(bsgd_models_digest(m, digest, sizeof(digest), &need), BSGD_OK);
  EXPECT_EQ(bsgd_file_digest((d / "blind.ckpt").c_str(), digest, sizeof(digest), &need), BSGD_OK);

  bsgd_image_free(clean);
  bsgd_image_free(noisy);
  bsgd_image_free(out);
  bsgd_image_free(again);
  bsgd_image_free(odd);
  bsgd_image_free(rgb);
  bsgd_run_free(rec);
  bsgd_models_free(m);
  bsgd_config_free(cfg);
  bsgd_config_free(other);
}

TEST(CApi, TrainIsDeterministic) {
  bsgd_config* cfg = tiny_config();
  const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
  ASSERT_EQ(bsgd_train(cfg, a.c_str()), BSGD_OK);
  ASSERT_EQ(bsgd_train(cfg, b.c_str()), BSGD_OK);
  for (const char* f : {"blind.ckpt", "plain.ckpt"}) {
    char da[64], db[64];
    size_t need = 0;
    ASSERT_EQ(bsgd_file_digest((a / f).c_str(), da, sizeof(da), &need), BSGD_OK);
    ASSERT_EQ(bsgd_file_digest((b / f).c_str(), db, sizeof(db), &need), BSGD_OK);
    EXPECT_STREQ(da, db) << f;
  }
  bsgd_config_free(cfg);
}

TEST(CApi, OracleAndPlot) {
  bsgd_config* cfg = nullptr;
  ASSERT_EQ(bsgd_config_parse("oracle_runs = 200\n", &cfg), BSGD_OK);
  bsgd_oracle_report r{};
  const fs::path d = fresh_dir("oracle");
  ASSERT_EQ(bsgd_oracle_check(cfg, (d / "o.csv").c_str(), &r), BSGD_OK);
  EXPECT_EQ(r.runs, 200);
  EXPECT_TRUE(r.passed);
  bsgd_config_set(cfg, "oracle_bias", "0.3");
  ASSERT_EQ(bsgd_oracle_check(cfg, nullptr, &r), BSGD_OK);
  EXPECT_FALSE(r.passed);

  const double x[3] = {0.0, 0.5, 1.0};
  const double y1[3] = {20.0, 22.0, 21.0};
  const double y2[3] = {0.5, 0.6, 0.55};
  const double* ys[2] = {y1, y2};
  const char* labels[2] = {"PSNR", "SSIM"};
  EXPECT_EQ(bsgd_plot_lines((d / "p.png").c_str(), "t", "w", x, 3, ys, labels, 2), BSGD_OK);
  EXPECT_TRUE(fs::exists(d / "p.png"));
  bsgd_config_free(cfg);
}

}  // namespace
