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

#ifndef BSGD_SYNTH_DATA_HPP_
#define BSGD_SYNTH_DATA_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bsgd/image.hpp"

namespace bsgd {

struct SceneConfig {
  int patch_size = 32;
  int channels = 1;
  int rectangles = 3;
  int discs = 3;
  double field_amplitude = 0.3;
  std::uint64_t seed = 1;
};

// Clean images stay inside [-1 + margin, 1 - margin].
inline constexpr double kSceneMargin = 0.05;

struct NoiseConfig {
  double sigma = 25.0;              // [0, 255] units
  int kernel_size = 3;              // odd
  std::vector<double> kernel;       // kernel_size^2 entries, row-major, sum 1
  std::uint64_t seed = 2;

  // Uniform box kernel of the given odd size (size 1 = white noise).
  static NoiseConfig box(double sigma, int size, std::uint64_t seed);
  void validate() const;
};

// Piecewise-smooth scene: low-frequency cosine field plus anti-aliased
// rectangles and discs. Deterministic in (cfg.seed, index).
Image gen_clean(const SceneConfig& cfg, std::uint64_t index);

// The raw correlated noise field n (white Gaussian, reflect-padded,
// convolved with the kernel, rescaled so the per-pixel std is sigma).
Image correlated_noise(int height, int width, int channels,
                       const NoiseConfig& cfg, std::uint64_t index);

// x + n without clipping.
Image add_correlated_noise(const Image& x, const NoiseConfig& cfg,
                           std::uint64_t index);

struct CropRecord {
  std::string file;
  int crop_y = 0;
  int crop_x = 0;
  int patch_index = 0;
};

struct PatchDataset {
  std::vector<Image> patches;
  std::vector<CropRecord> manifest;

  void write_manifest(const std::filesystem::path& csv) const;
};

// Deterministic random crops from every decodable PNG in `dir` (sorted by
// file name). Undecodable or undersized files are skipped with a warning.
// channels == 0 keeps the first image's channel count.
PatchDataset ingest_folder(const std::filesystem::path& dir, int patch_size,
                           int patches_per_image, std::uint64_t seed,
                           int channels = 0);

// `count` noisy synthetic patches (clean scene + correlated noise).
PatchDataset synthetic_dataset(const SceneConfig& scene, const NoiseConfig& noise,
                               int count, std::uint64_t first_index = 0);

}  // namespace bsgd

#endif  // BSGD_SYNTH_DATA_HPP_
