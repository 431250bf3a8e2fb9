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

// Drives the `bsgd` executable end to end with tiny models.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bsgd/bsgd.h"

namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string output;  // stdout and stderr interleaved
};

Result run(const std::string& args) {
  const std::string cmd = std::string(BSGD_CLI_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof buf, p)) r.output.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::vector<std::string> out;
  std::ifstream f(p);
  for (std::string l; std::getline(f, l);) out.push_back(l);
  return out;
}

std::string manifest_digest(const fs::path& manifest, const std::string& output) {
  for (const auto& l : lines(manifest))
    if (l.rfind(output + " = ", 0) == 0) return l.substr(output.size() + 3);
  return "";
}

std::size_t count_png(const fs::path& dir) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".png") ++n;
  return n;
}

// One tiny training run shared by every test in the file.
class Cli : public ::testing::Test {
 protected:
  static fs::path root;
  static fs::path cfg;
  static fs::path ckpt;
  static fs::path data;

  static void SetUpTestSuite() {
    root = fs::temp_directory_path() / "bsgd_cli_tests";
    fs::remove_all(root);
    fs::create_directories(root);
    cfg = root / "tiny.cfg";
    std::ofstream(cfg) << "# tiny desk run\n"
                          "bsn_channels = 4\nbsn_blocks = 1\nunet_channels = 4\ntemb_dim = 8\n"
                          "iters_blind = 2\niters_plain = 3\nbatch_size = 2\nnum_train = 4\n"
                          "patch_size = 8\neval_size = 16\neval_count = 3\nsteps = 2\n"
                          "rounds = 2\nt_start = 10\nlog_interval = 1\n";
    ckpt = root / "train";
    data = root / "data";
    const Result t = run("train --config " + cfg.string() + " --out " + ckpt.string());
    ASSERT_EQ(t.code, 0) << t.output;
    const Result d = run("make-data --config " + cfg.string() + " --eval-count 10 --out " +
                         data.string());
    ASSERT_EQ(d.code, 0) << d.output;
  }

  static std::string models() {
    return " --config " + cfg.string() + " --blind " + (ckpt / "blind.ckpt").string() +
           " --plain " + (ckpt / "plain.ckpt").string();
  }
};

fs::path Cli::root;
fs::path Cli::cfg;
fs::path Cli::ckpt;
fs::path Cli::data;

TEST_F(Cli, TrainWritesCheckpointsAndManifest) {
  for (const char* f : {"blind.ckpt", "plain.ckpt", "train_log.csv", "manifest.txt"}) {
    EXPECT_TRUE(fs::exists(ckpt / f)) << f;
  }
  const auto m = lines(ckpt / "manifest.txt");
  ASSERT_FALSE(m.empty());
  EXPECT_EQ(m[1], "command = train");
  EXPECT_EQ(manifest_digest(ckpt / "manifest.txt", "train_log.csv"), "nondeterministic");
  EXPECT_EQ(manifest_digest(ckpt / "manifest.txt", "blind.ckpt").size(), 16u);
}

TEST_F(Cli, TrainingTwiceGivesIdenticalCheckpoints) {
  const fs::path again = root / "train_again";
  const Result r = run("train --config " + cfg.string() + " --out " + again.string());
  ASSERT_EQ(r.code, 0) << r.output;
  for (const char* f : {"blind.ckpt", "plain.ckpt"}) {
    EXPECT_EQ(slurp(ckpt / f), slurp(again / f)) << f;
  }
}

TEST_F(Cli, ConfigurationErrorsExitOneAndNameTheKey) {
  Result r = run("train --config " + cfg.string() + " --set bogus_key=1 --set w=3 --out " +
                 (root / "bad").string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("bogus_key"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("w"), std::string::npos);

  r = run("train --config " + cfg.string() +
          " --data-source folder --data-dir /nonexistent/bsgd --out " + (root / "bad").string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("data_dir"), std::string::npos) << r.output;

  r = run("train --config /nonexistent/bsgd.cfg --out " + (root / "bad").string());
  EXPECT_EQ(r.code, 1) << r.output;

  r = run("frobnicate");
  EXPECT_EQ(r.code, 1);
}

TEST_F(Cli, DenoisesAFolderAndListsEveryOutput) {
  const fs::path out = root / "denoise_folder";
  const std::string before = slurp(data / "noisy" / "00003.png");
  const Result r = run("denoise" + models() + " --out " + out.string() + " " +
                       (data / "noisy").string());
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(count_png(out), 10u);
  for (int i = 0; i < 10; ++i) {
    char name[16];
    std::snprintf(name, sizeof name, "%05d.png", i);
    EXPECT_EQ(manifest_digest(out / "manifest.txt", name).size(), 16u) << name;
  }
  // Inputs are read, never written.
  EXPECT_EQ(slurp(data / "noisy" / "00003.png"), before);
}

TEST_F(Cli, GuidanceWeightChangesTheOutput) {
  const std::string in = (data / "noisy" / "00000.png").string();
  const Result a = run("denoise" + models() + " --w 0.1 --out " + (root / "w01").string() + " " + in);
  const Result b = run("denoise" + models() + " --w 0.7 --out " + (root / "w07").string() + " " + in);
  ASSERT_EQ(a.code, 0) << a.output;
  ASSERT_EQ(b.code, 0) << b.output;
  EXPECT_NE(slurp(root / "w01" / "00000.png"), slurp(root / "w07" / "00000.png"));
}

TEST_F(Cli, MinimalSamplingCompletes) {
  const fs::path out = root / "minimal";
  const Result r = run("denoise" + models() + " --rounds 1 --steps 1 --p-replace 0 --dump-steps --out " +
                       out.string() + " " + (data / "noisy" / "00001.png").string());
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(fs::exists(out / "00001.png"));
  EXPECT_TRUE(fs::exists(out / "records" / "00001" / "manifest.txt"));
}

TEST_F(Cli, IncompatibleInputIsRejectedBeforeSampling) {
  bsgd_image* img = nullptr;
  ASSERT_EQ(bsgd_image_new(8, 8, 3, &img), BSGD_OK);
  const fs::path rgb = root / "rgb.png";
  ASSERT_EQ(bsgd_image_save_png(img, rgb.c_str()), BSGD_OK);
  bsgd_image_free(img);
  const fs::path out = root / "rgb_out";
  Result r = run("denoise" + models() + " --channels 3 --out " + out.string() + " " + rgb.string());
  EXPECT_EQ(r.code, 1) << r.output;
  EXPECT_FALSE(fs::exists(out / "rgb.png"));

  r = run("denoise" + models() + " --out " + out.string() + " /nonexistent/x.png");
  EXPECT_EQ(r.code, 1) << r.output;
}

TEST_F(Cli, EvaluateIdenticalFoldersGivesInfinitePsnr) {
  const fs::path out = root / "eval_same";
  const Result r = run("evaluate --denoised " + (data / "clean").string() + " --clean " +
                       (data / "clean").string() + " --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.output;
  const auto csv = lines(out / "metrics.csv");
  ASSERT_EQ(csv.size(), 12u);
  EXPECT_EQ(csv.front(), "image_id,psnr_db,ssim");
  EXPECT_EQ(csv.back(), "mean,inf,1");
}

TEST_F(Cli, EvaluateListsUnmatchedFiles) {
  const fs::path den = root / "eval_unmatched";
  fs::create_directories(den);
  fs::copy_file(data / "clean" / "00000.png", den / "00000.png");
  fs::copy_file(data / "clean" / "00001.png", den / "stray.png");
  const Result r = run("evaluate --denoised " + den.string() + " --clean " +
                       (data / "clean").string() + " --out " + (root / "eval_bad").string());
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.output.find("stray.png"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("00009.png"), std::string::npos) << r.output;
}

TEST_F(Cli, EvaluateMatchesTheHandComputedPsnr) {
  // One pixel 10 levels off on a 16x16 frame: 10 log10(255^2 * 256 / 100).
  const fs::path a = root / "hand_a", b = root / "hand_b";
  fs::create_directories(a);
  fs::create_directories(b);
  bsgd_image *x = nullptr, *y = nullptr;
  ASSERT_EQ(bsgd_image_new(16, 16, 1, &x), BSGD_OK);
  ASSERT_EQ(bsgd_image_new(16, 16, 1, &y), BSGD_OK);
  bsgd_image_data(y)[37] = 20.0 / 255.0;
  ASSERT_EQ(bsgd_image_save_png(x, (a / "p.png").c_str()), BSGD_OK);
  ASSERT_EQ(bsgd_image_save_png(y, (b / "p.png").c_str()), BSGD_OK);
  bsgd_image_free(x);
  bsgd_image_free(y);
  const fs::path out = root / "hand_eval";
  const Result r = run("evaluate --denoised " + a.string() + " --clean " + b.string() +
                       " --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.output;
  const auto csv = lines(out / "metrics.csv");
  ASSERT_EQ(csv.size(), 3u);
  const std::string row = csv[1];
  ASSERT_EQ(row.rfind("p,", 0), 0u) << row;
  EXPECT_NEAR(std::stod(row.substr(2)), 52.2132032617976, 1e-6);
}

TEST_F(Cli, SweepOverGuidanceWritesRowsAndPlot) {
  const fs::path out = root / "sweep_w";
  const Result r = run("sweep" + models() + " --axis w --values 0,0.5,1 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.output;
  const auto csv = lines(out / "sweep_w.csv");
  ASSERT_EQ(csv.size(), 4u);
  EXPECT_EQ(csv[0], "w,mean_psnr,mean_ssim,status");
  for (std::size_t i = 1; i < csv.size(); ++i) {
    EXPECT_EQ(csv[i].substr(csv[i].rfind(',') + 1), "ok") << csv[i];
  }
  EXPECT_GT(fs::file_size(out / "sweep_w.png"), 100u);
}

TEST_F(Cli, SweepSortsValuesAndAcceptsFolders) {
  const fs::path out = root / "sweep_p";
  const Result r = run("sweep" + models() + " --axis p --values 0.5,0,0.25 --noisy-dir " +
                       (data / "noisy").string() + " --clean-dir " + (data / "clean").string() +
                       " --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.output;
  const auto csv = lines(out / "sweep_p.csv");
  ASSERT_EQ(csv.size(), 4u);
  EXPECT_EQ(csv[0], "p_replace,mean_psnr,mean_ssim,status");
  EXPECT_EQ(csv[1].substr(0, 2), "0,");
  EXPECT_EQ(csv[2].substr(0, 5), "0.25,");
  EXPECT_EQ(csv[3].substr(0, 4), "0.5,");
  for (std::size_t i = 1; i < csv.size(); ++i) {
    EXPECT_EQ(csv[i].substr(csv[i].rfind(',') + 1), "ok") << csv[i];
  }
}

TEST_F(Cli, SweepSingleStepCellCompletes) {
  const fs::path out = root / "sweep_steps";
  const Result r = run("sweep" + models() + " --axis steps --values 1,2 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.output;
  const auto csv = lines(out / "sweep_steps.csv");
  ASSERT_EQ(csv.size(), 3u);
  EXPECT_EQ(csv[1].rfind("1,", 0), 0u);
  EXPECT_EQ(csv[1].substr(csv[1].rfind(',') + 1), "ok");
}

TEST_F(Cli, SweepRejectsUnknownAxis) {
  const Result r = run("sweep" + models() + " --axis gamma --values 1 --out " +
                       (root / "sweep_bad").string());
  EXPECT_EQ(r.code, 1);
}

TEST_F(Cli, OracleExitCodes) {
  Result r = run("oracle --oracle-runs 50 --out " + (root / "oracle_ok").string());
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(fs::exists(root / "oracle_ok" / "oracle.csv"));

  r = run("oracle --oracle-runs 50 --oracle-bias 0.3 --out " + (root / "oracle_bias").string());
  EXPECT_EQ(r.code, 3) << r.output;

  r = run("oracle --oracle-runs 1 --out " + (root / "oracle_one").string());
  EXPECT_NE(r.output.find("undefined"), std::string::npos) << r.output;
  EXPECT_NE(slurp(root / "oracle_one" / "oracle.csv").find("variance,undefined"),
            std::string::npos);
}

TEST_F(Cli, RerunReproducesOutputsBitwise) {
  const fs::path out = root / "rerun_src";
  Result r = run("denoise" + models() + " --out " + out.string() + " " +
                 (data / "noisy" / "00002.png").string());
  ASSERT_EQ(r.code, 0) << r.output;
  r = run("rerun " + (out / "manifest.txt").string() + " --verify --out " +
          (root / "rerun_dst").string());
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("0 mismatched"), std::string::npos) << r.output;
  EXPECT_EQ(slurp(out / "00002.png"), slurp(root / "rerun_dst" / "00002.png"));

  r = run("rerun " + (ckpt / "manifest.txt").string() + " --verify --out " +
          (root / "rerun_train").string());
  EXPECT_EQ(r.code, 0) << r.output;
}

TEST_F(Cli, RerunDetectsTamperedDigests) {
  const fs::path src = root / "tamper_src";
  Result r = run("make-data --config " + cfg.string() + " --eval-count 2 --out " + src.string());
  ASSERT_EQ(r.code, 0) << r.output;
  std::string text = slurp(src / "manifest.txt");
  const auto at = text.find("clean/00000.png = ");
  ASSERT_NE(at, std::string::npos);
  text.replace(at + 18, 16, "0000000000000000");
  std::ofstream(src / "manifest.txt") << text;
  r = run("rerun " + (src / "manifest.txt").string() + " --verify --out " +
          (root / "tamper_dst").string());
  EXPECT_EQ(r.code, 3) << r.output;
  EXPECT_NE(r.output.find("1 mismatched"), std::string::npos) << r.output;
}

}  // namespace
