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

#ifndef BSGD_TESTS_TEST_UTIL_HPP_
#define BSGD_TESTS_TEST_UTIL_HPP_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>

#include "bsgd/image.hpp"
#include "bsgd/rng.hpp"

namespace bsgd::test {

inline Image random_image(int h, int w, int c, std::uint64_t seed, double scale = 0.5) {
  Rng rng(seed);
  Image img = rng.normal_image(h, w, c);
  for (double& v : img.values()) v *= scale;
  return img;
}

inline Image constant_image(int h, int w, int c, double v) {
  Image img(h, w, c);
  for (double& x : img.values()) x = v;
  return img;
}

inline double max_abs_diff(const Image& a, const Image& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Fresh empty directory under the system temp folder.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("bsgd_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace bsgd::test

#endif  // BSGD_TESTS_TEST_UTIL_HPP_
