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

#ifndef BSGD_PLOT_HPP_
#define BSGD_PLOT_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace bsgd {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::array<std::uint8_t, 3> color{31, 119, 180};
};

// One axes box; all its series share the y range.
struct PlotPanel {
  std::string y_label;
  std::vector<PlotSeries> series;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  int width = 640;
  int panel_height = 260;
};

// Static line plot as an 8-bit RGB PNG, panels stacked vertically with a
// shared x axis. Non-finite points are skipped.
void write_line_plot(const std::filesystem::path& path, const std::vector<PlotPanel>& panels,
                     const PlotOptions& opt);

}  // namespace bsgd

#endif  // BSGD_PLOT_HPP_
