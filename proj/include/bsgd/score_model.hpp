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

#ifndef BSGD_SCORE_MODEL_HPP_
#define BSGD_SCORE_MODEL_HPP_

#include <cstddef>

#include "bsgd/image.hpp"

namespace bsgd {

// Predictor contract shared by the blind-spot branch, the plain branch and
// the analytic oracle. Prediction is deterministic and read-only.
class ScoreModel {
 public:
  virtual ~ScoreModel() = default;

  // x0 estimate with the same shape as x_t. `cond` is the reference image for
  // conditional branches and ignored by unconditional ones.
  virtual Image predict_x0(const Image& x_t, int t, const Image* cond) const = 0;
  virtual bool blind_spot() const = 0;
  virtual std::size_t parameter_count() const = 0;
};

}  // namespace bsgd

#endif  // BSGD_SCORE_MODEL_HPP_
