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

#ifndef BSGD_ERRORS_HPP_
#define BSGD_ERRORS_HPP_

#include <stdexcept>

namespace bsgd {

// File or folder could not be read or written.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A loss or estimate went non-finite.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bsgd

#endif  // BSGD_ERRORS_HPP_
