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

#ifndef BSGD_IMAGE_IO_HPP_
#define BSGD_IMAGE_IO_HPP_

#include <filesystem>

#include "bsgd/image.hpp"

namespace bsgd {

// 8-bit PNG, 1 or 3 channels. Palette, 16-bit and alpha inputs are reduced
// to 8-bit gray or RGB. Values are mapped into the internal range.
Image read_png(const std::filesystem::path& path);

// Clips to the internal range and quantizes to 8 bits.
void write_png(const Image& image, const std::filesystem::path& path);

// Converts between 1 and 3 channels (replicate gray / BT.601 luma).
Image convert_channels(const Image& image, int channels);

}  // namespace bsgd

#endif  // BSGD_IMAGE_IO_HPP_
