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

#include "bsgd/plot.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "bsgd/image.hpp"
#include "bsgd/image_io.hpp"

namespace bsgd {

namespace {

// 5x7 glyphs, one byte per row, bit 4 = leftmost column.
struct Glyph {
  char ch;
  std::uint8_t rows[7];
};

constexpr Glyph kFont[] = {
    {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}}, {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}}, {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}}, {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}}, {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}}, {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {'A', {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}}, {'B', {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}},
    {'C', {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}}, {'D', {0x1C, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1C}},
    {'E', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}}, {'F', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}},
    {'G', {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F}}, {'H', {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'I', {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}}, {'J', {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C}},
    {'K', {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}}, {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}},
    {'M', {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}}, {'N', {0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11}},
    {'O', {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}}, {'P', {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}},
    {'Q', {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}}, {'R', {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}},
    {'S', {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}}, {'T', {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
    {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}}, {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}},
    {'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A}}, {'X', {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}},
    {'Y', {0x11, 0x11, 0x11, 0x0A, 0x04, 0x04, 0x04}}, {'Z', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F}},
    {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}}, {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
    {'+', {0x00, 0x04, 0x04, 0x1F, 0x04, 0x04, 0x00}}, {':', {0x00, 0x0C, 0x0C, 0x00, 0x0C, 0x0C, 0x00}},
    {'(', {0x02, 0x04, 0x08, 0x08, 0x08, 0x04, 0x02}}, {')', {0x08, 0x04, 0x02, 0x02, 0x02, 0x04, 0x08}},
    {'/', {0x00, 0x01, 0x02, 0x04, 0x08, 0x10, 0x00}}, {'=', {0x00, 0x00, 0x1F, 0x00, 0x1F, 0x00, 0x00}},
    {'_', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x1F}}, {',', {0x00, 0x00, 0x00, 0x00, 0x0C, 0x04, 0x08}},
};

const Glyph* glyph(char c) {
  const char u = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (const auto& g : kFont)
    if (g.ch == u) return &g;
  return nullptr;
}

using Rgb = std::array<std::uint8_t, 3>;

class Canvas {
 public:
  Canvas(int w, int h) : w_(w), h_(h), px_(static_cast<std::size_t>(w) * h, Rgb{255, 255, 255}) {}

  void set(int x, int y, Rgb c) {
    if (x >= 0 && y >= 0 && x < w_ && y < h_) px_[static_cast<std::size_t>(y) * w_ + x] = c;
  }
  void fill(int x0, int y0, int x1, int y1, Rgb c) {
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) set(x, y, c);
  }
  void line(int x0, int y0, int x1, int y1, Rgb c, int thick = 1) {
    const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
      fill(x0 - thick / 2, y0 - thick / 2, x0 + (thick - 1) / 2, y0 + (thick - 1) / 2, c);
      if (x0 == x1 && y0 == y1) break;
      const int e2 = 2 * err;
      if (e2 >= dy) { err += dy; x0 += sx; }
      if (e2 <= dx) { err += dx; y0 += sy; }
    }
  }
  // Top-left anchored; returns the advance in pixels.
  int text(int x, int y, const std::string& s, Rgb c, bool vertical = false) {
    int pen = 0;
    for (char ch : s) {
      if (const Glyph* g = glyph(ch)) {
        for (int r = 0; r < 7; ++r)
          for (int k = 0; k < 5; ++k)
            if (g->rows[r] & (0x10 >> k)) {
              if (vertical) set(x + r, y - pen - k, c);
              else set(x + pen + k, y + r, c);
            }
      }
      pen += 6;
    }
    return pen;
  }
  static int text_width(const std::string& s) { return static_cast<int>(s.size()) * 6; }

  Image to_image() const {
    Image img(h_, w_, 3);
    for (int y = 0; y < h_; ++y)
      for (int x = 0; x < w_; ++x)
        for (int c = 0; c < 3; ++c)
          img.at(y, x, c) = storage_to_internal(px_[static_cast<std::size_t>(y) * w_ + x][c]);
    return img;
  }

 private:
  int w_, h_;
  std::vector<Rgb> px_;
};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) { lo = 0.0; hi = 1.0; }
    if (hi - lo < 1e-12) {
      const double pad = std::max(std::abs(lo) * 0.05, 1e-3);
      lo -= pad;
      hi += pad;
    }
    const double m = 0.05 * (hi - lo);
    lo -= m;
    hi += m;
  }
};

std::vector<double> nice_ticks(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) { step = m * mag; break; }
  std::vector<double> out;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) {
    out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

void write_line_plot(const std::filesystem::path& path, const std::vector<PlotPanel>& panels,
                     const PlotOptions& opt) {
  if (panels.empty()) throw std::invalid_argument("plot: no panels");
  const int left = 72, right = 16, top = 28, bottom = 40;
  const int W = opt.width;
  const int H = top + static_cast<int>(panels.size()) * opt.panel_height;
  Canvas cv(W, H);
  const Rgb black{0, 0, 0}, grid{225, 225, 225};

  cv.text((W - Canvas::text_width(opt.title)) / 2, 8, opt.title, black);

  Range xr;
  for (const auto& p : panels)
    for (const auto& s : p.series)
      for (double v : s.x) xr.add(v);
  xr.finish();

  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const auto& panel = panels[pi];
    const int y0 = top + static_cast<int>(pi) * opt.panel_height + 6;
    const int y1 = y0 + opt.panel_height - bottom - 6;
    const int x0 = left, x1 = W - right;
    Range yr;
    for (const auto& s : panel.series)
      for (double v : s.y) yr.add(v);
    yr.finish();
    auto px = [&](double x) { return x0 + static_cast<int>(std::lround((x - xr.lo) / (xr.hi - xr.lo) * (x1 - x0))); };
    auto py = [&](double y) { return y1 - static_cast<int>(std::lround((y - yr.lo) / (yr.hi - yr.lo) * (y1 - y0))); };

    for (double t : nice_ticks(yr.lo, yr.hi)) {
      const int y = py(t);
      cv.line(x0, y, x1, y, grid);
      const std::string s = fmt(t);
      cv.text(x0 - 6 - Canvas::text_width(s), y - 3, s, black);
    }
    for (double t : nice_ticks(xr.lo, xr.hi)) {
      const int x = px(t);
      cv.line(x, y0, x, y1, grid);
      const std::string s = fmt(t);
      cv.text(x - Canvas::text_width(s) / 2, y1 + 6, s, black);
    }
    cv.line(x0, y0, x0, y1, black);
    cv.line(x0, y1, x1, y1, black);
    cv.line(x1, y0, x1, y1, black);
    cv.line(x0, y0, x1, y0, black);
    cv.text(6, (y0 + y1) / 2 + Canvas::text_width(panel.y_label) / 2, panel.y_label, black, true);
    cv.text((x0 + x1 - Canvas::text_width(opt.x_label)) / 2, y1 + 20, opt.x_label, black);

    int legend_y = y0 + 6;
    for (const auto& s : panel.series) {
      if (s.x.size() != s.y.size()) throw std::invalid_argument("plot: x/y length mismatch");
      int prev_x = 0, prev_y = 0;
      bool have_prev = false;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
          have_prev = false;
          continue;
        }
        const int x = px(s.x[i]), y = py(s.y[i]);
        if (have_prev) cv.line(prev_x, prev_y, x, y, s.color, 2);
        cv.fill(x - 3, y - 3, x + 3, y + 3, s.color);
        prev_x = x;
        prev_y = y;
        have_prev = true;
      }
      if (!s.label.empty()) {
        const int lx = x1 - 12 - Canvas::text_width(s.label) - 14;
        cv.fill(lx, legend_y + 1, lx + 9, legend_y + 5, s.color);
        cv.text(lx + 14, legend_y, s.label, black);
        legend_y += 11;
      }
    }
  }
  write_png(cv.to_image(), path);
}

}  // namespace bsgd
