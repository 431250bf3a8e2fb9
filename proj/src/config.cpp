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

#include "bsgd/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bsgd/errors.hpp"

namespace bsgd {

namespace {

using K = KeyType;

ConfigKey key(std::string name, KeyType type, std::string def, std::optional<double> lo,
              std::optional<double> hi, std::string help, std::vector<std::string> choices = {}) {
  return ConfigKey{std::move(name), type, std::move(def), lo, hi, std::move(choices),
                   std::move(help)};
}

std::vector<ConfigKey> build_registry() {
  const std::optional<double> none;
  return {
      // schedule
      key("t_train", K::kInt, "100", 1, 100000, "diffusion steps T"),
      key("beta_start", K::kDouble, "1e-4", 0.0, 1.0, "first beta"),
      key("beta_end", K::kDouble, "0.02", 0.0, 1.0, "last beta"),
      // data
      key("data_source", K::kChoice, "synthetic", none, none, "synthetic or folder",
          {"synthetic", "folder"}),
      key("data_dir", K::kString, "", none, none, "PNG folder when data_source=folder"),
      key("num_train", K::kInt, "2000", 1, 1e8, "synthetic training patches"),
      key("patch_size", K::kInt, "32", 4, 4096, "training patch side"),
      key("channels", K::kInt, "1", 1, 3, "image channels (1 or 3)"),
      key("patches_per_image", K::kInt, "16", 1, 1e6, "random crops per folder image"),
      key("crop_seed", K::kUInt, "5", none, none, "folder crop seed"),
      key("scene_seed", K::kUInt, "1", none, none, "synthetic scene seed"),
      key("rectangles", K::kInt, "3", 0, 1000, "rectangles per scene"),
      key("discs", K::kInt, "3", 0, 1000, "discs per scene"),
      key("field_amplitude", K::kDouble, "0.3", 0.0, 1.0, "smooth background amplitude"),
      key("noise_sigma", K::kDouble, "25", 0.0, 255.0, "noise std in 8-bit units"),
      key("noise_kernel", K::kInt, "3", 1, 31, "odd box kernel side; 1 = white"),
      key("noise_seed", K::kUInt, "2", none, none, "synthetic noise seed"),
      // models
      key("bsn_channels", K::kInt, "32", 1, 1024, "blind-spot net width"),
      key("bsn_blocks", K::kInt, "4", 1, 64, "blind-spot residual blocks"),
      key("bsn_dilations", K::kIntList, "", none, none, "comma list of even dilations"),
      key("bsn_seed", K::kUInt, "7", none, none, "blind-spot init seed"),
      key("unet_channels", K::kInt, "32", 1, 1024, "plain net width"),
      key("unet_seed", K::kUInt, "11", none, none, "plain net init seed"),
      key("temb_dim", K::kInt, "64", 2, 4096, "timestep embedding width (even)"),
      // training
      key("batch_size", K::kInt, "8", 1, 4096, "batch size"),
      key("learning_rate", K::kDouble, "8e-5", 0.0, 1.0, "Adam step size"),
      key("iters_blind", K::kInt, "5000", 0, 1e9, "blind-spot branch iterations"),
      key("iters_plain", K::kInt, "10000", 0, 1e9, "plain branch iterations"),
      key("cond_dropout", K::kDouble, "0.1", 0.0, 1.0, "probability the reference is zeroed"),
      key("loss", K::kChoice, "l1", none, none, "l1 or l2", {"l1", "l2"}),
      key("grad_clip", K::kDouble, "1.0", 0.0, 1e9, "global-norm clip; 0 disables"),
      key("train_seed", K::kUInt, "3", none, none, "training stream seed"),
      key("log_interval", K::kInt, "100", 1, 1e9, "loss log cadence"),
      key("checkpoint_interval", K::kInt, "0", 0, 1e9, "0 = final checkpoint only"),
      key("bsn_train_pd_factor", K::kInt, "2", 1, 16, "blind-branch training shuffle factor"),
      key("bsn_train_pd_prob", K::kDouble, "1", 0.0, 1.0,
          "probability a blind-branch sample is shuffled"),
      // sampling
      key("w", K::kDouble, "0.7", 0.0, 1.0, "guidance weight on the blind-spot branch"),
      key("steps", K::kInt, "8", 1, 100000, "steps per round"),
      key("rounds", K::kInt, "8", 1, 100000, "sampling rounds"),
      key("t_start", K::kInt, "30", 1, 100000, "first timestep"),
      key("p_replace", K::kDouble, "0.25", 0.0, 1.0, "replacement probability"),
      key("pd_factor", K::kInt, "2", 1, 16, "first-step shuffle factor; 1 disables"),
      key("eta", K::kDouble, "0", 0.0, 1.0, "DDIM stochasticity"),
      key("init_mode", K::kChoice, "renoise", none, none, "renoise or pure_noise",
          {"renoise", "pure_noise"}),
      key("seed", K::kUInt, "0", none, none, "sampling seed"),
      // evaluation
      key("eval_count", K::kInt, "100", 1, 1e7, "held-out synthetic images"),
      key("eval_first_index", K::kUInt, "1000000", none, none, "first held-out scene index"),
      key("eval_size", K::kInt, "32", 4, 4096, "held-out image side"),
      // oracle
      key("oracle_mean", K::kDouble, "0", -1e6, 1e6, "Gaussian world mean"),
      key("oracle_std", K::kDouble, "1", 1e-12, 1e6, "Gaussian world std"),
      key("oracle_runs", K::kInt, "1000", 1, 1e8, "independent sampling runs"),
      key("oracle_size", K::kInt, "8", 1, 4096, "oracle image side"),
      key("oracle_steps", K::kInt, "8", 1, 100000, "oracle steps"),
      key("oracle_t_start", K::kInt, "30", 1, 100000, "oracle first timestep"),
      key("oracle_w", K::kDouble, "0.5", 0.0, 1.0, "oracle guidance weight"),
      key("oracle_seed", K::kUInt, "2024", none, none, "oracle seed"),
      key("oracle_bias", K::kDouble, "0", -1e6, 1e6, "test hook: bias added to predictions"),
  };
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size() && std::isfinite(out);
}

bool parse_int(const std::string& s, long long& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtoll(s.c_str(), &end, 10);
  return errno == 0 && end == s.c_str() + s.size();
}

bool parse_uint(const std::string& s, std::uint64_t& out) {
  if (s.empty() || s[0] == '-') return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtoull(s.c_str(), &end, 10);
  return errno == 0 && end == s.c_str() + s.size();
}

std::vector<int> parse_int_list(const std::string& s, bool& ok) {
  std::vector<int> out;
  ok = true;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    long long v = 0;
    if (!parse_int(trim(item), v)) {
      ok = false;
      return {};
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

// Empty string on success, otherwise a reason.
std::string check_value(const ConfigKey& k, const std::string& v) {
  double num = 0.0;
  switch (k.type) {
    case K::kInt: {
      long long i = 0;
      if (!parse_int(v, i)) return "expected an integer";
      num = static_cast<double>(i);
      break;
    }
    case K::kUInt: {
      std::uint64_t u = 0;
      if (!parse_uint(v, u)) return "expected a non-negative integer";
      return "";
    }
    case K::kDouble:
      if (!parse_double(v, num)) return "expected a number";
      break;
    case K::kString:
      return "";
    case K::kChoice:
      if (std::find(k.choices.begin(), k.choices.end(), v) == k.choices.end()) {
        std::string all;
        for (const auto& c : k.choices) all += (all.empty() ? "" : "|") + c;
        return "expected one of " + all;
      }
      return "";
    case K::kIntList: {
      bool ok = true;
      parse_int_list(v, ok);
      return ok ? "" : "expected a comma-separated integer list";
    }
  }
  std::ostringstream why;
  if (k.min && num < *k.min) {
    why << "must be >= " << *k.min;
    return why.str();
  }
  if (k.max && num > *k.max) {
    why << "must be <= " << *k.max;
    return why.str();
  }
  return "";
}

[[noreturn]] void fail(const std::vector<std::string>& problems, const std::vector<std::string>& keys) {
  std::string msg = "configuration error";
  for (const auto& p : problems) msg += "\n  " + p;
  throw ConfigError(msg, keys);
}

}  // namespace

const std::vector<ConfigKey>& config_registry() {
  static const std::vector<ConfigKey> reg = build_registry();
  return reg;
}

const ConfigKey* find_config_key(const std::string& name) {
  for (const auto& k : config_registry())
    if (k.name == name) return &k;
  return nullptr;
}

Config::Config() {
  for (const auto& k : config_registry()) values_[k.name] = k.default_value;
}

void Config::set(const std::string& key, const std::string& value) { set_all({{key, value}}); }

void Config::set_all(const std::map<std::string, std::string>& kv) {
  std::vector<std::string> problems, keys;
  for (const auto& [k, raw] : kv) {
    const std::string v = trim(raw);
    const ConfigKey* spec = find_config_key(k);
    if (!spec) {
      problems.push_back("unknown key '" + k + "'");
      keys.push_back(k);
      continue;
    }
    const std::string why = check_value(*spec, v);
    if (!why.empty()) {
      problems.push_back(k + " = '" + v + "': " + why);
      keys.push_back(k);
    }
  }
  if (!problems.empty()) fail(problems, keys);
  for (const auto& [k, raw] : kv) values_[k] = trim(raw);
}

Config Config::parse_text(const std::string& text) {
  Config c;
  std::vector<std::string> problems, keys;
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      problems.push_back("line " + std::to_string(lineno) + ": expected key = value");
      keys.push_back(line);
      continue;
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  try {
    c.set_all(kv);
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    problems.push_back(msg.substr(msg.find('\n') + 3));
    keys.insert(keys.end(), e.keys().begin(), e.keys().end());
  }
  if (!problems.empty()) fail(problems, keys);
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

const std::string& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown key '" + key + "'", {key});
  return it->second;
}

long long Config::get_int(const std::string& key) const {
  long long v = 0;
  parse_int(get(key), v);
  return v;
}

std::uint64_t Config::get_uint(const std::string& key) const {
  std::uint64_t v = 0;
  parse_uint(get(key), v);
  return v;
}

double Config::get_double(const std::string& key) const {
  double v = 0.0;
  parse_double(get(key), v);
  return v;
}

std::vector<int> Config::get_int_list(const std::string& key) const {
  bool ok = true;
  return parse_int_list(get(key), ok);
}

std::string Config::to_text() const {
  std::string out;
  for (const auto& k : config_registry()) out += k.name + " = " + values_.at(k.name) + "\n";
  return out;
}

void Config::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_text();
}

// ---------------------------------------------------------------------------

namespace {

// Re-throws a struct validation failure as a ConfigError naming `keys`.
template <class F>
auto named(const std::vector<std::string>& keys, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    std::string names;
    for (const auto& k : keys) names += (names.empty() ? "" : ", ") + k;
    throw ConfigError("configuration error (" + names + "): " + e.what(), keys);
  }
}

}  // namespace

NoiseSchedule schedule_from(const Config& c) {
  return named({"t_train", "beta_start", "beta_end"}, [&] {
    return make_linear_schedule(static_cast<int>(c.get_int("t_train")), c.get_double("beta_start"),
                                c.get_double("beta_end"));
  });
}

SceneConfig scene_from(const Config& c) {
  SceneConfig s;
  s.patch_size = static_cast<int>(c.get_int("patch_size"));
  s.channels = static_cast<int>(c.get_int("channels"));
  s.rectangles = static_cast<int>(c.get_int("rectangles"));
  s.discs = static_cast<int>(c.get_int("discs"));
  s.field_amplitude = c.get_double("field_amplitude");
  s.seed = c.get_uint("scene_seed");
  return s;
}

NoiseConfig noise_from(const Config& c) {
  return named({"noise_sigma", "noise_kernel"}, [&] {
    NoiseConfig n = NoiseConfig::box(c.get_double("noise_sigma"),
                                     static_cast<int>(c.get_int("noise_kernel")),
                                     c.get_uint("noise_seed"));
    n.validate();
    return n;
  });
}

BlindSpotNetConfig blind_config_from(const Config& c) {
  return named({"bsn_channels", "bsn_blocks", "bsn_dilations", "temb_dim"}, [&] {
    BlindSpotNetConfig b;
    b.channels = static_cast<int>(c.get_int("channels"));
    b.base_channels = static_cast<int>(c.get_int("bsn_channels"));
    b.num_blocks = static_cast<int>(c.get_int("bsn_blocks"));
    b.dilations = c.get_int_list("bsn_dilations");
    b.temb_dim = static_cast<int>(c.get_int("temb_dim"));
    b.seed = c.get_uint("bsn_seed");
    b.validate();
    return b;
  });
}

PlainNetConfig plain_config_from(const Config& c) {
  return named({"unet_channels", "temb_dim"}, [&] {
    PlainNetConfig p;
    p.channels = static_cast<int>(c.get_int("channels"));
    p.base_channels = static_cast<int>(c.get_int("unet_channels"));
    p.temb_dim = static_cast<int>(c.get_int("temb_dim"));
    p.seed = c.get_uint("unet_seed");
    p.validate();
    return p;
  });
}

TrainConfig train_config_from(const Config& c) {
  return named({"batch_size", "learning_rate", "iters_blind", "iters_plain",
                "bsn_train_pd_factor"},
               [&] {
                 TrainConfig t;
                 t.batch_size = static_cast<int>(c.get_int("batch_size"));
                 t.learning_rate = c.get_double("learning_rate");
                 t.iters_blind = static_cast<int>(c.get_int("iters_blind"));
                 t.iters_plain = static_cast<int>(c.get_int("iters_plain"));
                 t.cond_dropout = c.get_double("cond_dropout");
                 t.loss = c.get("loss") == "l2" ? LossKind::kL2 : LossKind::kL1;
                 t.grad_clip = c.get_double("grad_clip");
                 t.seed = c.get_uint("train_seed");
                 t.log_interval = static_cast<int>(c.get_int("log_interval"));
                 t.checkpoint_interval = static_cast<int>(c.get_int("checkpoint_interval"));
                 t.bsn_pd_factor = static_cast<int>(c.get_int("bsn_train_pd_factor"));
                 t.bsn_pd_prob = c.get_double("bsn_train_pd_prob");
                 t.validate();
                 return t;
               });
}

SamplerConfig sampler_config_from(const Config& c) {
  SamplerConfig s;
  s.w = c.get_double("w");
  s.steps = static_cast<int>(c.get_int("steps"));
  s.rounds = static_cast<int>(c.get_int("rounds"));
  s.t_start = static_cast<int>(c.get_int("t_start"));
  s.p_replace = c.get_double("p_replace");
  s.pd_factor = static_cast<int>(c.get_int("pd_factor"));
  s.eta = c.get_double("eta");
  s.init_mode = c.get("init_mode") == "pure_noise" ? InitMode::kPureNoise : InitMode::kRenoise;
  s.seed = c.get_uint("seed");
  const NoiseSchedule sched = schedule_from(c);
  named({"steps", "t_start"}, [&] {
    s.validate(sched);
    return 0;
  });
  return s;
}

GaussianWorld oracle_world_from(const Config& c) {
  return GaussianWorld{c.get_double("oracle_mean"), c.get_double("oracle_std")};
}

OracleOptions oracle_options_from(const Config& c) {
  OracleOptions o;
  o.n_samples = static_cast<int>(c.get_int("oracle_runs"));
  o.image_size = static_cast<int>(c.get_int("oracle_size"));
  o.steps = static_cast<int>(c.get_int("oracle_steps"));
  o.t_start = static_cast<int>(c.get_int("oracle_t_start"));
  o.w = c.get_double("oracle_w");
  o.seed = c.get_uint("oracle_seed");
  o.bias = c.get_double("oracle_bias");
  if (o.t_start > c.get_int("t_train") || o.steps > o.t_start) {
    throw ConfigError("configuration error: need oracle_steps <= oracle_t_start <= t_train",
                      {"oracle_steps", "oracle_t_start"});
  }
  return o;
}

PatchDataset dataset_from(const Config& c) {
  const int patch = static_cast<int>(c.get_int("patch_size"));
  if (c.get("data_source") == "synthetic") {
    return synthetic_dataset(scene_from(c), noise_from(c), static_cast<int>(c.get_int("num_train")));
  }
  const std::string dir = c.get("data_dir");
  if (dir.empty()) {
    throw ConfigError("configuration error: data_dir is required when data_source = folder",
                      {"data_dir"});
  }
  if (!std::filesystem::is_directory(dir)) {
    throw ConfigError("configuration error: data_dir '" + dir + "' is not a directory",
                      {"data_dir"});
  }
  try {
    return ingest_folder(dir, patch, static_cast<int>(c.get_int("patches_per_image")),
                         c.get_uint("crop_seed"), static_cast<int>(c.get_int("channels")));
  } catch (const std::runtime_error& e) {
    throw ConfigError(std::string("configuration error: data_dir: ") + e.what(), {"data_dir"});
  }
}

}  // namespace bsgd
