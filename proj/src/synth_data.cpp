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

#include "bsgd/synth_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <stdexcept>

#include "bsgd/errors.hpp"
#include "bsgd/image_io.hpp"
#include "bsgd/rng.hpp"

namespace bsgd {
namespace {

constexpr int kSupersample = 4;

int reflect(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

}  // namespace

NoiseConfig NoiseConfig::box(double sigma, int size, std::uint64_t seed) {
  NoiseConfig cfg;
  cfg.sigma = sigma;
  cfg.kernel_size = size;
  if (size < 1 || size % 2 == 0) {
    throw std::invalid_argument("noise kernel size must be odd and positive");
  }
  cfg.kernel.assign(static_cast<std::size_t>(size) * size, 1.0 / (size * size));
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

void NoiseConfig::validate() const {
  if (sigma < 0.0 || sigma > 255.0) throw std::invalid_argument("noise sigma outside [0, 255]");
  if (kernel_size < 1 || kernel_size % 2 == 0) {
    throw std::invalid_argument("noise kernel size must be odd and positive");
  }
  if (kernel.size() != static_cast<std::size_t>(kernel_size) * kernel_size) {
    throw std::invalid_argument("noise kernel has wrong number of entries");
  }
  double sum = 0.0;
  for (double k : kernel) {
    if (k < 0.0) throw std::invalid_argument("noise kernel entries must be non-negative");
    sum += k;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("noise kernel must sum to 1");
}

Image gen_clean(const SceneConfig& cfg, std::uint64_t index) {
  const int n = cfg.patch_size;
  Image img(n, n, cfg.channels, 0.0);
  Rng rng(derive_seed(cfg.seed, index, 0x5ce7e));

  if (cfg.field_amplitude != 0.0) {
    constexpr int kWaves = 3;
    for (int c = 0; c < cfg.channels; ++c) {
      for (int wv = 0; wv < kWaves; ++wv) {
        const double fy = rng.uniform() * 2.0 / n;
        const double fx = rng.uniform() * 2.0 / n;
        const double phase = rng.uniform() * 2.0 * std::numbers::pi;
        const double amp = cfg.field_amplitude / kWaves;
        for (int y = 0; y < n; ++y)
          for (int x = 0; x < n; ++x)
            img.at(y, x, c) +=
                amp * std::cos(2.0 * std::numbers::pi * (fy * y + fx * x) + phase);
      }
    }
  }

  const int shapes = cfg.rectangles + cfg.discs;
  for (int s = 0; s < shapes; ++s) {
    const bool is_rect = s < cfg.rectangles;
    std::vector<double> level(cfg.channels);
    const double base = rng.uniform() * 1.6 - 0.8;
    for (int c = 0; c < cfg.channels; ++c) {
      level[c] = std::clamp(base + (rng.uniform() - 0.5) * 0.4, -0.8, 0.8);
    }
    double y0 = 0, x0 = 0, y1 = 0, x1 = 0, cy = 0, cx = 0, radius = 0;
    if (is_rect) {
      y0 = rng.uniform() * n * 0.8;
      x0 = rng.uniform() * n * 0.8;
      y1 = y0 + (0.15 + 0.5 * rng.uniform()) * n;
      x1 = x0 + (0.15 + 0.5 * rng.uniform()) * n;
    } else {
      cy = rng.uniform() * n;
      cx = rng.uniform() * n;
      radius = (0.08 + 0.25 * rng.uniform()) * n;
    }
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        int hits = 0;
        for (int sy = 0; sy < kSupersample; ++sy) {
          for (int sx = 0; sx < kSupersample; ++sx) {
            const double py = y + (sy + 0.5) / kSupersample;
            const double px = x + (sx + 0.5) / kSupersample;
            const bool inside =
                is_rect ? (py >= y0 && py < y1 && px >= x0 && px < x1)
                        : ((py - cy) * (py - cy) + (px - cx) * (px - cx) < radius * radius);
            hits += inside ? 1 : 0;
          }
        }
        if (hits == 0) continue;
        const double a = static_cast<double>(hits) / (kSupersample * kSupersample);
        for (int c = 0; c < cfg.channels; ++c) {
          img.at(y, x, c) = (1.0 - a) * img.at(y, x, c) + a * level[c];
        }
      }
    }
  }

  const double lim = 1.0 - kSceneMargin;
  for (double& v : img.values()) v = std::clamp(v, -lim, lim);
  return img;
}

Image correlated_noise(int height, int width, int channels, const NoiseConfig& cfg,
                       std::uint64_t index) {
  cfg.validate();
  const int k = cfg.kernel_size;
  const int r = k / 2;
  double energy = 0.0;
  for (double v : cfg.kernel) energy += v * v;
  const double sigma_internal = cfg.sigma * 2.0 / 255.0;
  const double white_std = sigma_internal / std::sqrt(energy);

  Rng rng(derive_seed(cfg.seed, index, 0x0415e));
  Image noise(height, width, channels, 0.0);
  Image white(height, width, 1);
  for (int c = 0; c < channels; ++c) {
    for (double& v : white.values()) v = rng.normal() * white_std;
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        double acc = 0.0;
        for (int dy = -r; dy <= r; ++dy)
          for (int dx = -r; dx <= r; ++dx)
            acc += cfg.kernel[(dy + r) * k + (dx + r)] *
                   white.at(reflect(y + dy, height), reflect(x + dx, width), 0);
        noise.at(y, x, c) = acc;
      }
    }
  }
  return noise;
}

Image add_correlated_noise(const Image& x, const NoiseConfig& cfg, std::uint64_t index) {
  cfg.validate();
  if (cfg.sigma == 0.0) return x;
  Image n = correlated_noise(x.height(), x.width(), x.channels(), cfg, index);
  return axpby(1.0, x, 1.0, n);
}

void PatchDataset::write_manifest(const std::filesystem::path& csv) const {
  std::ofstream out(csv);
  if (!out) throw IoError("cannot write " + csv.string());
  out << "file,crop_y,crop_x,patch_index\n";
  for (const auto& m : manifest) {
    out << m.file << ',' << m.crop_y << ',' << m.crop_x << ',' << m.patch_index << '\n';
  }
}

PatchDataset ingest_folder(const std::filesystem::path& dir, int patch_size,
                           int patches_per_image, std::uint64_t seed, int channels) {
  namespace fs = std::filesystem;
  if (patch_size < 1 || patches_per_image < 1) {
    throw std::invalid_argument("ingest_folder: patch size and count must be positive");
  }
  if (!fs::is_directory(dir)) {
    throw std::runtime_error("ingest_folder: not a directory: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  PatchDataset ds;
  int patch_index = 0;
  for (std::size_t fi = 0; fi < files.size(); ++fi) {
    Image img;
    try {
      img = read_png(files[fi]);
    } catch (const std::exception& e) {
      std::cerr << "warning: skipping " << files[fi].string() << ": " << e.what() << "\n";
      continue;
    }
    if (img.height() < patch_size || img.width() < patch_size) {
      std::cerr << "warning: skipping " << files[fi].string() << ": smaller than patch\n";
      continue;
    }
    if (channels == 0) channels = img.channels();
    img = convert_channels(img, channels);
    Rng rng(derive_seed(seed, fi, 0xc209));
    for (int k = 0; k < patches_per_image; ++k) {
      const int cy = rng.uniform_int(0, img.height() - patch_size);
      const int cx = rng.uniform_int(0, img.width() - patch_size);
      Image patch(patch_size, patch_size, channels);
      for (int c = 0; c < channels; ++c)
        for (int y = 0; y < patch_size; ++y)
          for (int x = 0; x < patch_size; ++x)
            patch.at(y, x, c) = img.at(cy + y, cx + x, c);
      ds.patches.push_back(std::move(patch));
      ds.manifest.push_back({files[fi].filename().string(), cy, cx, patch_index++});
    }
  }
  if (ds.patches.empty()) {
    throw std::runtime_error("ingest_folder: no usable images in " + dir.string());
  }
  return ds;
}

PatchDataset synthetic_dataset(const SceneConfig& scene, const NoiseConfig& noise,
                               int count, std::uint64_t first_index) {
  if (count < 1) throw std::invalid_argument("synthetic_dataset: count must be >= 1");
  PatchDataset ds;
  ds.patches.reserve(count);
  for (int i = 0; i < count; ++i) {
    const std::uint64_t idx = first_index + i;
    ds.patches.push_back(add_correlated_noise(gen_clean(scene, idx), noise, idx));
    ds.manifest.push_back({"synthetic", 0, 0, i});
  }
  return ds;
}

}  // namespace bsgd
