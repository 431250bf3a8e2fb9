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

#ifndef BSGD_MODELS_HPP_
#define BSGD_MODELS_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "bsgd/nn.hpp"
#include "bsgd/score_model.hpp"

namespace bsgd {

// Sinusoidal embedding followed by Linear + SiLU; shared by every FiLM layer
// of a network.
class TimeMlp {
 public:
  struct Cache {
    std::vector<float> sinusoid;
    std::vector<float> pre;
  };

  TimeMlp() = default;
  TimeMlp(const std::string& name, int dim, Rng& rng);
  std::vector<float> forward(int t, Cache* cache) const;
  void backward(std::vector<float> d_emb, const Cache& cache);
  int dim() const { return dim_; }
  void collect(std::vector<nn::Param*>& out) { proj_.collect(out); }

 private:
  int dim_ = 0;
  nn::Linear proj_;
};

struct BlindSpotNetConfig {
  int channels = 1;        // image channels; the net sees 2x (cond, x_t)
  int base_channels = 32;
  int num_blocks = 4;
  std::vector<int> dilations;  // one per block; empty = all 2. Must be even.
  int temb_dim = 64;
  std::uint64_t seed = 7;

  int dilation(int block) const { return dilations.empty() ? 2 : dilations.at(block); }
  void validate() const;
  std::map<std::string, std::string> echo() const;
  static BlindSpotNetConfig from_echo(const std::map<std::string, std::string>& kv);
};

// Time-conditioned blind-spot network: center-masked 3x3 entry convolution
// over [cond, x_t], then residual blocks of even-dilation 3x3 convolutions and
// 1x1 mixing. Output pixel p never depends on input pixel p of either input.
class BlindSpotNet final : public ScoreModel {
 public:
  struct BlockCache {
    nn::ConvCache conv_a;
    nn::Tensor film_pre;
    std::vector<float> ss;
    nn::Tensor silu_pre;
    nn::ConvCache conv_b;
  };
  struct Cache {
    TimeMlp::Cache time;
    std::vector<float> emb;
    nn::ConvCache entry;
    nn::Tensor entry_pre;
    std::vector<BlockCache> blocks;
    nn::ConvCache tail;
    nn::Tensor tail_pre;
    nn::ConvCache head;
  };

  explicit BlindSpotNet(const BlindSpotNetConfig& cfg);

  Image predict_x0(const Image& x_t, int t, const Image* cond) const override;
  bool blind_spot() const override { return true; }
  std::size_t parameter_count() const override;

  static nn::Tensor pack_input(const Image& x_t, const Image* cond);
  nn::Tensor forward(const nn::Tensor& input, int t, Cache* cache) const;
  void backward(const nn::Tensor& d_out, const Cache& cache);

  std::vector<nn::Param*> parameters();
  const BlindSpotNetConfig& config() const { return cfg_; }

 private:
  struct Block {
    nn::Conv2d conv_a;
    nn::Linear film;
    nn::Conv2d conv_b;
  };

  BlindSpotNetConfig cfg_;
  TimeMlp time_;
  nn::Conv2d entry_;
  std::vector<Block> blocks_;
  nn::Conv2d tail_;
  nn::Conv2d head_;
};

struct PlainNetConfig {
  int channels = 1;
  int base_channels = 32;
  int temb_dim = 64;
  std::uint64_t seed = 11;

  void validate() const;
  std::map<std::string, std::string> echo() const;
  static PlainNetConfig from_echo(const std::map<std::string, std::string>& kv);
};

// Two-level time-conditioned U-Net with an unrestricted receptive field.
// Height and width must be even.
class PlainNet final : public ScoreModel {
 public:
  struct StageCache {
    nn::ConvCache conv_a;
    nn::Tensor film_pre;
    std::vector<float> ss;
    nn::Tensor silu_a_pre;
    nn::ConvCache conv_b;
    nn::Tensor silu_b_pre;
  };
  struct Cache {
    TimeMlp::Cache time;
    std::vector<float> emb;
    StageCache enc1, enc2, dec1;
    nn::ConvCache head;
  };

  explicit PlainNet(const PlainNetConfig& cfg);

  Image predict_x0(const Image& x_t, int t, const Image* cond) const override;
  bool blind_spot() const override { return false; }
  std::size_t parameter_count() const override;

  static nn::Tensor pack_input(const Image& x_t);
  nn::Tensor forward(const nn::Tensor& input, int t, Cache* cache) const;
  void backward(const nn::Tensor& d_out, const Cache& cache);

  std::vector<nn::Param*> parameters();
  const PlainNetConfig& config() const { return cfg_; }

 private:
  struct Stage {
    nn::Conv2d conv_a;
    nn::Linear film;
    nn::Conv2d conv_b;
  };
  nn::Tensor stage_forward(const Stage& s, const nn::Tensor& x,
                           const std::vector<float>& emb, StageCache* c) const;
  nn::Tensor stage_backward(Stage& s, nn::Tensor d, const std::vector<float>& emb,
                            const StageCache& c, std::vector<float>& d_emb);

  PlainNetConfig cfg_;
  TimeMlp time_;
  Stage enc1_, enc2_, dec1_;
  nn::Conv2d head_;
};

// Both branches. Either may be absent (guidance endpoints only need one).
struct ModelPair {
  std::unique_ptr<BlindSpotNet> blind;
  std::unique_ptr<PlainNet> plain;
};

// Max |change of output at p| when both inputs are perturbed by +delta at p,
// over `trials` random inputs and positions. 0 for trials == 0.
double verify_blind_spot(const ScoreModel& model, int height, int width,
                         int channels, int t, int trials, std::uint64_t seed,
                         double delta = 0.5);

nn::Tensor image_to_tensor(const Image& img);
Image tensor_to_image(const nn::Tensor& t);

// ---------------------------------------------------------------------------
// Checkpoint container. Byte layout is documented in docs/checkpoint_format.md.

enum class BranchKind : std::uint32_t { kBlind = 1, kPlain = 2 };

struct CheckpointParam {
  std::string name;
  std::vector<int> shape;
  std::vector<float> value;
  std::vector<float> adam_m;
  std::vector<float> adam_v;
};

struct Checkpoint {
  BranchKind kind = BranchKind::kBlind;
  std::uint64_t iteration = 0;   // optimizer updates applied to this branch
  std::uint64_t loop_iteration = 0;  // shared training-loop counter
  std::map<std::string, std::string> config;  // model + training echo
  std::string rng_state;          // shared training RNG
  std::vector<CheckpointParam> params;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Snapshot / restore parameter values (optimizer state handled by caller).
std::vector<CheckpointParam> snapshot_params(const std::vector<nn::Param*>& params);
void restore_params(const std::vector<CheckpointParam>& saved,
                    const std::vector<nn::Param*>& params);

std::unique_ptr<BlindSpotNet> blind_from_checkpoint(const Checkpoint& ckpt);
std::unique_ptr<PlainNet> plain_from_checkpoint(const Checkpoint& ckpt);

// Digest over parameter values, for determinism checks.
std::string parameter_digest(const std::vector<nn::Param*>& params);

}  // namespace bsgd

#endif  // BSGD_MODELS_HPP_
