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

#include "bsgd/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "bsgd/errors.hpp"
#include "bsgd/rng.hpp"

namespace bsgd {
namespace {

int echo_int(const std::map<std::string, std::string>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw std::runtime_error("checkpoint config lacks key " + key);
  return std::stoi(it->second);
}

std::uint64_t echo_u64(const std::map<std::string, std::string>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw std::runtime_error("checkpoint config lacks key " + key);
  return std::stoull(it->second);
}

std::size_t count_params(const std::vector<nn::Param*>& ps) {
  std::size_t n = 0;
  for (const auto* p : ps) n += p->size();
  return n;
}

}  // namespace

nn::Tensor image_to_tensor(const Image& img) {
  nn::Tensor t(img.channels(), img.height(), img.width());
  auto src = img.values();
  for (std::size_t i = 0; i < src.size(); ++i) t.v[i] = static_cast<float>(src[i]);
  return t;
}

Image tensor_to_image(const nn::Tensor& t) {
  Image img(t.h, t.w, t.c);
  auto dst = img.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = t.v[i];
  return img;
}

// ---------------------------------------------------------------------------

TimeMlp::TimeMlp(const std::string& name, int dim, Rng& rng)
    : dim_(dim), proj_(name + ".proj", dim, dim, rng) {}

std::vector<float> TimeMlp::forward(int t, Cache* cache) const {
  auto s = nn::timestep_embedding(static_cast<double>(t), dim_);
  auto e = proj_.forward(s);
  if (cache) {
    cache->sinusoid = s;
    nn::silu_inplace(e, &cache->pre);
  } else {
    nn::silu_inplace(e, nullptr);
  }
  return e;
}

void TimeMlp::backward(std::vector<float> d_emb, const Cache& cache) {
  nn::silu_backward_inplace(d_emb, cache.pre);
  proj_.backward(d_emb, cache.sinusoid);
}

// ---------------------------------------------------------------------------

void BlindSpotNetConfig::validate() const {
  if (channels != 1 && channels != 3) throw std::invalid_argument("bsn: channels must be 1 or 3");
  if (base_channels < 1 || num_blocks < 0 || temb_dim < 2 || temb_dim % 2) {
    throw std::invalid_argument("bsn: invalid sizes");
  }
  if (!dilations.empty() && static_cast<int>(dilations.size()) != num_blocks) {
    throw std::invalid_argument("bsn: need one dilation per block");
  }
  for (int d : dilations) {
    // Odd dilations let the ring of the masked entry layer reach back to the
    // center pixel.
    if (d < 2 || d % 2) throw std::invalid_argument("bsn: block dilations must be even");
  }
}

std::map<std::string, std::string> BlindSpotNetConfig::echo() const {
  std::string ladder;
  for (std::size_t i = 0; i < dilations.size(); ++i) {
    ladder += (i ? "," : "") + std::to_string(dilations[i]);
  }
  return {{"channels", std::to_string(channels)},
          {"bsn_channels", std::to_string(base_channels)},
          {"bsn_blocks", std::to_string(num_blocks)},
          {"bsn_dilations", ladder},
          {"temb_dim", std::to_string(temb_dim)},
          {"bsn_seed", std::to_string(seed)}};
}

BlindSpotNetConfig BlindSpotNetConfig::from_echo(const std::map<std::string, std::string>& kv) {
  BlindSpotNetConfig c;
  c.channels = echo_int(kv, "channels");
  c.base_channels = echo_int(kv, "bsn_channels");
  c.num_blocks = echo_int(kv, "bsn_blocks");
  c.temb_dim = echo_int(kv, "temb_dim");
  c.seed = echo_u64(kv, "bsn_seed");
  if (auto it = kv.find("bsn_dilations"); it != kv.end() && !it->second.empty()) {
    std::size_t pos = 0;
    const std::string& s = it->second;
    while (pos <= s.size()) {
      const std::size_t comma = std::min(s.find(',', pos), s.size());
      c.dilations.push_back(std::stoi(s.substr(pos, comma - pos)));
      pos = comma + 1;
    }
  }
  c.validate();
  return c;
}

BlindSpotNet::BlindSpotNet(const BlindSpotNetConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(derive_seed(cfg.seed, 0xb5));
  const int f = cfg.base_channels;
  time_ = TimeMlp("bsn.time", cfg.temb_dim, rng);
  entry_ = nn::Conv2d("bsn.entry", 2 * cfg.channels, f, 3, 1, /*center_masked=*/true, rng);
  for (int b = 0; b < cfg.num_blocks; ++b) {
    const std::string name = "bsn.block" + std::to_string(b);
    blocks_.push_back(Block{
        nn::Conv2d(name + ".conv_a", f, f, 3, cfg.dilation(b), false, rng),
        nn::Linear(name + ".film", cfg.temb_dim, 2 * f, rng),
        nn::Conv2d(name + ".conv_b", f, f, 1, 1, false, rng)});
  }
  tail_ = nn::Conv2d("bsn.tail", f, f, 1, 1, false, rng);
  head_ = nn::Conv2d("bsn.head", f, cfg.channels, 1, 1, false, rng);
}

nn::Tensor BlindSpotNet::pack_input(const Image& x_t, const Image* cond) {
  if (!cond) throw std::invalid_argument("blind-spot branch requires a conditioning image");
  require_same_shape(x_t, *cond, "blind-spot input");
  return nn::concat_channels(image_to_tensor(*cond), image_to_tensor(x_t));
}

Image BlindSpotNet::predict_x0(const Image& x_t, int t, const Image* cond) const {
  if (x_t.channels() != cfg_.channels) {
    throw std::invalid_argument("blind-spot branch: channel mismatch");
  }
  return tensor_to_image(forward(pack_input(x_t, cond), t, nullptr));
}

nn::Tensor BlindSpotNet::forward(const nn::Tensor& input, int t, Cache* cache) const {
  const auto emb = time_.forward(t, cache ? &cache->time : nullptr);
  if (cache) {
    cache->emb = emb;
    cache->blocks.resize(blocks_.size());
  }
  nn::Tensor h = entry_.forward(input, cache ? &cache->entry : nullptr);
  nn::silu_inplace(h, cache ? &cache->entry_pre : nullptr);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const Block& blk = blocks_[b];
    BlockCache* bc = cache ? &cache->blocks[b] : nullptr;
    nn::Tensor a = blk.conv_a.forward(h, bc ? &bc->conv_a : nullptr);
    auto ss = blk.film.forward(emb);
    nn::film_inplace(a, ss, bc ? &bc->film_pre : nullptr);
    nn::silu_inplace(a, bc ? &bc->silu_pre : nullptr);
    nn::add_inplace(h, blk.conv_b.forward(a, bc ? &bc->conv_b : nullptr));
    if (bc) bc->ss = std::move(ss);
  }
  nn::Tensor g = tail_.forward(h, cache ? &cache->tail : nullptr);
  nn::silu_inplace(g, cache ? &cache->tail_pre : nullptr);
  return head_.forward(g, cache ? &cache->head : nullptr);
}

void BlindSpotNet::backward(const nn::Tensor& d_out, const Cache& cache) {
  std::vector<float> d_emb(cfg_.temb_dim, 0.0f);
  nn::Tensor dg = head_.backward(d_out, cache.head, true);
  nn::silu_backward_inplace(dg, cache.tail_pre);
  nn::Tensor dh = tail_.backward(dg, cache.tail, true);
  for (std::size_t i = blocks_.size(); i-- > 0;) {
    Block& blk = blocks_[i];
    const BlockCache& bc = cache.blocks[i];
    nn::Tensor da = blk.conv_b.backward(dh, bc.conv_b, true);
    nn::silu_backward_inplace(da, bc.silu_pre);
    auto dss = nn::film_backward_inplace(da, bc.ss, bc.film_pre);
    auto de = blk.film.backward(dss, cache.emb);
    for (int k = 0; k < cfg_.temb_dim; ++k) d_emb[k] += de[k];
    nn::add_inplace(dh, blk.conv_a.backward(da, bc.conv_a, true));
  }
  nn::silu_backward_inplace(dh, cache.entry_pre);
  entry_.backward(dh, cache.entry, false);
  time_.backward(std::move(d_emb), cache.time);
}

std::vector<nn::Param*> BlindSpotNet::parameters() {
  std::vector<nn::Param*> out;
  time_.collect(out);
  entry_.collect(out);
  for (auto& blk : blocks_) {
    blk.conv_a.collect(out);
    blk.film.collect(out);
    blk.conv_b.collect(out);
  }
  tail_.collect(out);
  head_.collect(out);
  return out;
}

std::size_t BlindSpotNet::parameter_count() const {
  return count_params(const_cast<BlindSpotNet*>(this)->parameters());
}

// ---------------------------------------------------------------------------

void PlainNetConfig::validate() const {
  if (channels != 1 && channels != 3) throw std::invalid_argument("unet: channels must be 1 or 3");
  if (base_channels < 1 || temb_dim < 2 || temb_dim % 2) {
    throw std::invalid_argument("unet: invalid sizes");
  }
}

std::map<std::string, std::string> PlainNetConfig::echo() const {
  return {{"channels", std::to_string(channels)},
          {"unet_channels", std::to_string(base_channels)},
          {"temb_dim", std::to_string(temb_dim)},
          {"unet_seed", std::to_string(seed)}};
}

PlainNetConfig PlainNetConfig::from_echo(const std::map<std::string, std::string>& kv) {
  PlainNetConfig c;
  c.channels = echo_int(kv, "channels");
  c.base_channels = echo_int(kv, "unet_channels");
  c.temb_dim = echo_int(kv, "temb_dim");
  c.seed = echo_u64(kv, "unet_seed");
  c.validate();
  return c;
}

PlainNet::PlainNet(const PlainNetConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(derive_seed(cfg.seed, 0x0e7));
  const int f = cfg.base_channels;
  const int d = cfg.temb_dim;
  time_ = TimeMlp("unet.time", d, rng);
  enc1_ = Stage{nn::Conv2d("unet.enc1.conv_a", cfg.channels, f, 3, 1, false, rng),
                nn::Linear("unet.enc1.film", d, 2 * f, rng),
                nn::Conv2d("unet.enc1.conv_b", f, f, 3, 1, false, rng)};
  enc2_ = Stage{nn::Conv2d("unet.enc2.conv_a", f, 2 * f, 3, 1, false, rng),
                nn::Linear("unet.enc2.film", d, 4 * f, rng),
                nn::Conv2d("unet.enc2.conv_b", 2 * f, 2 * f, 3, 1, false, rng)};
  dec1_ = Stage{nn::Conv2d("unet.dec1.conv_a", 3 * f, f, 3, 1, false, rng),
                nn::Linear("unet.dec1.film", d, 2 * f, rng),
                nn::Conv2d("unet.dec1.conv_b", f, f, 3, 1, false, rng)};
  head_ = nn::Conv2d("unet.head", f, cfg.channels, 1, 1, false, rng);
}

nn::Tensor PlainNet::pack_input(const Image& x_t) { return image_to_tensor(x_t); }

Image PlainNet::predict_x0(const Image& x_t, int t, const Image*) const {
  if (x_t.channels() != cfg_.channels) throw std::invalid_argument("plain branch: channel mismatch");
  if (x_t.height() % 2 || x_t.width() % 2) {
    throw std::invalid_argument("plain branch: height and width must be even");
  }
  return tensor_to_image(forward(pack_input(x_t), t, nullptr));
}

nn::Tensor PlainNet::stage_forward(const Stage& s, const nn::Tensor& x,
                                   const std::vector<float>& emb, StageCache* c) const {
  nn::Tensor a = s.conv_a.forward(x, c ? &c->conv_a : nullptr);
  auto ss = s.film.forward(emb);
  nn::film_inplace(a, ss, c ? &c->film_pre : nullptr);
  nn::silu_inplace(a, c ? &c->silu_a_pre : nullptr);
  nn::Tensor b = s.conv_b.forward(a, c ? &c->conv_b : nullptr);
  nn::silu_inplace(b, c ? &c->silu_b_pre : nullptr);
  if (c) c->ss = std::move(ss);
  return b;
}

nn::Tensor PlainNet::stage_backward(Stage& s, nn::Tensor d, const std::vector<float>& emb,
                                    const StageCache& c, std::vector<float>& d_emb) {
  nn::silu_backward_inplace(d, c.silu_b_pre);
  nn::Tensor da = s.conv_b.backward(d, c.conv_b, true);
  nn::silu_backward_inplace(da, c.silu_a_pre);
  auto dss = nn::film_backward_inplace(da, c.ss, c.film_pre);
  auto de = s.film.backward(dss, emb);
  for (std::size_t k = 0; k < d_emb.size(); ++k) d_emb[k] += de[k];
  return s.conv_a.backward(da, c.conv_a, true);
}

nn::Tensor PlainNet::forward(const nn::Tensor& input, int t, Cache* cache) const {
  const auto emb = time_.forward(t, cache ? &cache->time : nullptr);
  if (cache) cache->emb = emb;
  nn::Tensor s1 = stage_forward(enc1_, input, emb, cache ? &cache->enc1 : nullptr);
  nn::Tensor s2 = stage_forward(enc2_, nn::avg_pool2(s1), emb, cache ? &cache->enc2 : nullptr);
  nn::Tensor cat = nn::concat_channels(nn::upsample2(s2), s1);
  nn::Tensor d = stage_forward(dec1_, cat, emb, cache ? &cache->dec1 : nullptr);
  return head_.forward(d, cache ? &cache->head : nullptr);
}

void PlainNet::backward(const nn::Tensor& d_out, const Cache& cache) {
  std::vector<float> d_emb(cfg_.temb_dim, 0.0f);
  nn::Tensor dd = head_.backward(d_out, cache.head, true);
  nn::Tensor dcat = stage_backward(dec1_, std::move(dd), cache.emb, cache.dec1, d_emb);
  nn::Tensor du, ds1;
  nn::split_channels(dcat, 2 * cfg_.base_channels, du, ds1);
  nn::Tensor dp = stage_backward(enc2_, nn::upsample2_backward(du), cache.emb, cache.enc2, d_emb);
  nn::add_inplace(ds1, nn::avg_pool2_backward(dp));
  stage_backward(enc1_, std::move(ds1), cache.emb, cache.enc1, d_emb);
  time_.backward(std::move(d_emb), cache.time);
}

std::vector<nn::Param*> PlainNet::parameters() {
  std::vector<nn::Param*> out;
  time_.collect(out);
  for (Stage* s : {&enc1_, &enc2_, &dec1_}) {
    s->conv_a.collect(out);
    s->film.collect(out);
    s->conv_b.collect(out);
  }
  head_.collect(out);
  return out;
}

std::size_t PlainNet::parameter_count() const {
  return count_params(const_cast<PlainNet*>(this)->parameters());
}

// ---------------------------------------------------------------------------

double verify_blind_spot(const ScoreModel& model, int height, int width, int channels,
                         int t, int trials, std::uint64_t seed, double delta) {
  double worst = 0.0;
  for (int k = 0; k < trials; ++k) {
    Rng rng(derive_seed(seed, k, 0xb11d));
    Image x = rng.normal_image(height, width, channels);
    Image cond = rng.normal_image(height, width, channels);
    const int py = rng.uniform_int(0, height - 1);
    const int px = rng.uniform_int(0, width - 1);
    const Image before = model.predict_x0(x, t, &cond);
    for (int c = 0; c < channels; ++c) {
      x.at(py, px, c) += delta;
      cond.at(py, px, c) += delta;
    }
    const Image after = model.predict_x0(x, t, &cond);
    for (int c = 0; c < channels; ++c) {
      worst = std::max(worst, std::abs(after.at(py, px, c) - before.at(py, px, c)));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'B', 'S', 'G', 'D', 'C', 'K', 'P', 'T'};

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}
  template <typename T>
  void pod(const T& v) {
    bytes(&v, sizeof(T));
  }
  void str(const std::string& s) {
    pod<std::uint64_t>(s.size());
    bytes(s.data(), s.size());
  }
  void floats(const std::vector<float>& v) { bytes(v.data(), v.size() * sizeof(float)); }
  void bytes(const void* p, std::size_t n) {
    os_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    digest_.append(static_cast<const char*>(p), n);
  }
  const std::string& written() const { return digest_; }

 private:
  std::ostream& os_;
  std::string digest_;
};

class Reader {
 public:
  Reader(const std::string& buf, const std::string& path) : buf_(buf), path_(path) {}
  template <typename T>
  T pod() {
    T v;
    bytes(&v, sizeof(T));
    return v;
  }
  std::string str() {
    const auto n = pod<std::uint64_t>();
    need(n);
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::vector<float> floats(std::size_t n) {
    std::vector<float> v(n);
    bytes(v.data(), n * sizeof(float));
    return v;
  }
  void bytes(void* p, std::size_t n) {
    need(n);
    std::memcpy(p, buf_.data() + pos_, n);
    pos_ += n;
  }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > buf_.size()) throw std::runtime_error("checkpoint truncated: " + path_);
  }
  const std::string& buf_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot write checkpoint " + tmp);
    Writer w(os);
    w.bytes(kMagic, sizeof(kMagic));
    w.pod<std::uint32_t>(kCheckpointVersion);
    w.pod<std::uint32_t>(static_cast<std::uint32_t>(ckpt.kind));
    w.pod<std::uint64_t>(ckpt.iteration);
    w.pod<std::uint64_t>(ckpt.loop_iteration);
    std::string echo;
    for (const auto& [k, v] : ckpt.config) echo += k + "=" + v + "\n";
    w.str(echo);
    w.str(ckpt.rng_state);
    w.pod<std::uint32_t>(static_cast<std::uint32_t>(ckpt.params.size()));
    for (const auto& p : ckpt.params) {
      w.str(p.name);
      w.pod<std::uint32_t>(static_cast<std::uint32_t>(p.shape.size()));
      for (int d : p.shape) w.pod<std::int32_t>(d);
      const std::size_t n = p.value.size();
      if (p.adam_m.size() != n || p.adam_v.size() != n) {
        throw std::invalid_argument("checkpoint param " + p.name + ": optimizer state size");
      }
      w.floats(p.value);
      w.floats(p.adam_m);
      w.floats(p.adam_v);
    }
    const std::string digest = fnv1a_hex(w.written());
    os.write(digest.data(), static_cast<std::streamsize>(digest.size()));
    if (!os) throw IoError("write failed for checkpoint " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint " + path.string());
  const std::string buf((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (buf.size() < sizeof(kMagic) + 16 || std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("not a checkpoint file: " + path.string());
  }
  const std::string body = buf.substr(0, buf.size() - 16);
  if (fnv1a_hex(body) != buf.substr(buf.size() - 16)) {
    throw std::runtime_error("checkpoint digest mismatch: " + path.string());
  }
  Reader r(body, path.string());
  char magic[8];
  r.bytes(magic, sizeof(magic));
  const auto version = r.pod<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  const auto kind = r.pod<std::uint32_t>();
  if (kind != 1 && kind != 2) throw std::runtime_error("unknown checkpoint branch kind");
  ckpt.kind = static_cast<BranchKind>(kind);
  ckpt.iteration = r.pod<std::uint64_t>();
  ckpt.loop_iteration = r.pod<std::uint64_t>();
  const std::string echo = r.str();
  std::size_t pos = 0;
  while (pos < echo.size()) {
    const std::size_t nl = echo.find('\n', pos);
    const std::string line = echo.substr(pos, nl - pos);
    const std::size_t eq = line.find('=');
    if (eq != std::string::npos) ckpt.config[line.substr(0, eq)] = line.substr(eq + 1);
    pos = nl == std::string::npos ? echo.size() : nl + 1;
  }
  ckpt.rng_state = r.str();
  const auto count = r.pod<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    CheckpointParam p;
    p.name = r.str();
    const auto rank = r.pod<std::uint32_t>();
    std::size_t n = 1;
    for (std::uint32_t k = 0; k < rank; ++k) {
      p.shape.push_back(r.pod<std::int32_t>());
      n *= static_cast<std::size_t>(p.shape.back());
    }
    p.value = r.floats(n);
    p.adam_m = r.floats(n);
    p.adam_v = r.floats(n);
    ckpt.params.push_back(std::move(p));
  }
  if (r.pos() != body.size()) throw std::runtime_error("trailing bytes in checkpoint " + path.string());
  return ckpt;
}

std::vector<CheckpointParam> snapshot_params(const std::vector<nn::Param*>& params) {
  std::vector<CheckpointParam> out;
  for (const auto* p : params) {
    out.push_back({p->name, p->shape, {p->value.begin(), p->value.end()}, std::vector<float>(p->size(), 0.0f),
                   std::vector<float>(p->size(), 0.0f)});
  }
  return out;
}

void restore_params(const std::vector<CheckpointParam>& saved,
                    const std::vector<nn::Param*>& params) {
  if (saved.size() != params.size()) {
    throw std::runtime_error("checkpoint has " + std::to_string(saved.size()) +
                             " parameter arrays, model expects " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (saved[i].name != params[i]->name || saved[i].shape != params[i]->shape) {
      throw std::runtime_error("checkpoint parameter " + saved[i].name +
                               " does not match model parameter " + params[i]->name);
    }
    params[i]->value.assign(saved[i].value.begin(), saved[i].value.end());
    params[i]->apply_mask();
  }
}

std::unique_ptr<BlindSpotNet> blind_from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.kind != BranchKind::kBlind) throw std::runtime_error("checkpoint is not a blind-spot branch");
  auto net = std::make_unique<BlindSpotNet>(BlindSpotNetConfig::from_echo(ckpt.config));
  restore_params(ckpt.params, net->parameters());
  return net;
}

std::unique_ptr<PlainNet> plain_from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.kind != BranchKind::kPlain) throw std::runtime_error("checkpoint is not a plain branch");
  auto net = std::make_unique<PlainNet>(PlainNetConfig::from_echo(ckpt.config));
  restore_params(ckpt.params, net->parameters());
  return net;
}

std::string parameter_digest(const std::vector<nn::Param*>& params) {
  std::string bytes;
  for (const auto* p : params) {
    bytes.append(reinterpret_cast<const char*>(p->value.data()), p->size() * sizeof(float));
  }
  return fnv1a_hex(bytes);
}

}  // namespace bsgd
