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

#ifndef BSGD_METRICS_HPP_
#define BSGD_METRICS_HPP_

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "bsgd/image.hpp"

namespace bsgd {

// Identical images have zero MSE; their PSNR is reported as +infinity.
inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

double mse(const Image& a, const Image& b);

// 10 log10(peak^2 / MSE) in dB.
double psnr(const Image& a, const Image& b, double peak);

struct SsimOptions {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};

// Mean SSIM over all fully-contained Gaussian windows, averaged over
// channels. `peak` is the dynamic range L (255 for 8-bit levels, 2 for the
// internal range).
double ssim(const Image& a, const Image& b, double peak, const SsimOptions& opt = {});

struct MetricReport {
  std::vector<std::string> image_ids;
  std::vector<double> psnr_db;
  std::vector<double> ssim;

  void add(std::string id, double p, double s);
  std::size_t count() const { return image_ids.size(); }
  double mean_psnr() const;
  double mean_ssim() const;
  // image_id,psnr_db,ssim with a trailing "mean" row.
  void write_csv(const std::filesystem::path& path) const;
};

// PSNR / SSIM of two internal-range images measured on 8-bit levels (peak 255).
double psnr_8bit(const Image& a, const Image& b);
double ssim_8bit(const Image& a, const Image& b);

// Pairs PNG files by name across the two folders and scores each pair.
// Any file present on only one side is an error listing every such name.
MetricReport evaluate_directories(const std::filesystem::path& denoised_dir,
                                  const std::filesystem::path& clean_dir);

}  // namespace bsgd

#endif  // BSGD_METRICS_HPP_
