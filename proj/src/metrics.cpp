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

#include "bsgd/metrics.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "bsgd/image_io.hpp"

namespace bsgd {
namespace {

std::vector<double> gaussian_taps(int size, double sigma) {
  std::vector<double> taps(size);
  const int r = size / 2;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    taps[i] = std::exp(-0.5 * (i - r) * (i - r) / (sigma * sigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Valid-mode separable filtering of one plane: (h - n + 1) x (w - n + 1).
std::vector<double> filter_valid(const std::vector<double>& src, int h, int w,
                                 const std::vector<double>& taps) {
  const int n = static_cast<int>(taps.size());
  const int oh = h - n + 1;
  const int ow = w - n + 1;
  std::vector<double> rows(static_cast<std::size_t>(h) * ow);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += taps[k] * src[y * w + x + k];
      rows[y * ow + x] = acc;
    }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += taps[k] * rows[(y + k) * ow + x];
      out[y * ow + x] = acc;
    }
  return out;
}

std::string format_metric(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

}  // namespace

double mse(const Image& a, const Image& b) {
  require_same_shape(a, b, "mse");
  auto av = a.values();
  auto bv = b.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = av[i] - bv[i];
    acc += d * d;
  }
  return acc / static_cast<double>(av.size());
}

double psnr(const Image& a, const Image& b, double peak) {
  if (!(peak > 0.0)) throw std::invalid_argument("psnr: peak must be positive");
  const double m = mse(a, b);
  if (m == 0.0) return kPsnrIdentical;
  return 10.0 * std::log10(peak * peak / m);
}

double ssim(const Image& a, const Image& b, double peak, const SsimOptions& opt) {
  require_same_shape(a, b, "ssim");
  if (a.height() < opt.window || a.width() < opt.window) {
    throw std::invalid_argument("ssim: image smaller than the " +
                                std::to_string(opt.window) + "x" +
                                std::to_string(opt.window) + " window");
  }
  const double c1 = (opt.k1 * peak) * (opt.k1 * peak);
  const double c2 = (opt.k2 * peak) * (opt.k2 * peak);
  const auto taps = gaussian_taps(opt.window, opt.sigma);
  const int h = a.height();
  const int w = a.width();
  const std::size_t n = a.pixels();

  double total = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    std::vector<double> x(a.plane(c).begin(), a.plane(c).end());
    std::vector<double> y(b.plane(c).begin(), b.plane(c).end());
    std::vector<double> xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
      xx[i] = x[i] * x[i];
      yy[i] = y[i] * y[i];
      xy[i] = x[i] * y[i];
    }
    const auto mx = filter_valid(x, h, w, taps);
    const auto my = filter_valid(y, h, w, taps);
    const auto sxx = filter_valid(xx, h, w, taps);
    const auto syy = filter_valid(yy, h, w, taps);
    const auto sxy = filter_valid(xy, h, w, taps);
    double acc = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
      const double vx = sxx[i] - mx[i] * mx[i];
      const double vy = syy[i] - my[i] * my[i];
      const double cov = sxy[i] - mx[i] * my[i];
      acc += ((2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
    total += acc / static_cast<double>(mx.size());
  }
  return total / a.channels();
}

void MetricReport::add(std::string id, double p, double s) {
  image_ids.push_back(std::move(id));
  psnr_db.push_back(p);
  ssim.push_back(s);
}

double MetricReport::mean_psnr() const {
  if (psnr_db.empty()) return 0.0;
  return std::accumulate(psnr_db.begin(), psnr_db.end(), 0.0) / psnr_db.size();
}

double MetricReport::mean_ssim() const {
  if (ssim.empty()) return 0.0;
  return std::accumulate(ssim.begin(), ssim.end(), 0.0) / ssim.size();
}

void MetricReport::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "image_id,psnr_db,ssim\n";
  for (std::size_t i = 0; i < count(); ++i) {
    out << image_ids[i] << ',' << format_metric(psnr_db[i]) << ','
        << format_metric(ssim[i]) << '\n';
  }
  out << "mean," << format_metric(mean_psnr()) << ',' << format_metric(mean_ssim()) << '\n';
}

double psnr_8bit(const Image& a, const Image& b) {
  return psnr(to_storage_levels(a), to_storage_levels(b), 255.0);
}

double ssim_8bit(const Image& a, const Image& b) {
  return ssim(to_storage_levels(a), to_storage_levels(b), 255.0);
}

namespace {

std::set<std::string> png_names(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error("not a directory: " + dir.string());
  }
  std::set<std::string> names;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".png") {
      names.insert(e.path().filename().string());
    }
  }
  return names;
}

}  // namespace

MetricReport evaluate_directories(const std::filesystem::path& denoised_dir,
                                  const std::filesystem::path& clean_dir) {
  const auto den = png_names(denoised_dir);
  const auto ref = png_names(clean_dir);
  std::string unmatched;
  for (const auto& n : den)
    if (!ref.count(n)) unmatched += "\n  " + n + " (no clean counterpart)";
  for (const auto& n : ref)
    if (!den.count(n)) unmatched += "\n  " + n + " (no denoised counterpart)";
  if (!unmatched.empty()) throw std::runtime_error("unmatched files:" + unmatched);
  if (den.empty()) throw std::runtime_error("no PNG files in " + denoised_dir.string());

  MetricReport rep;
  for (const auto& n : den) {
    const Image a = read_png(denoised_dir / n);
    const Image b = read_png(clean_dir / n);
    if (!a.same_shape(b)) {
      throw std::runtime_error("shape mismatch for " + n + ": " + a.shape_string() + " vs " +
                               b.shape_string());
    }
    rep.add(std::filesystem::path(n).stem().string(), psnr_8bit(a, b), ssim_8bit(a, b));
  }
  return rep;
}

}  // namespace bsgd
