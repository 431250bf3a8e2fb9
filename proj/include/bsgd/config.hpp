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

#ifndef BSGD_CONFIG_HPP_
#define BSGD_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsgd/models.hpp"
#include "bsgd/oracle.hpp"
#include "bsgd/sampler.hpp"
#include "bsgd/schedule.hpp"
#include "bsgd/synth_data.hpp"
#include "bsgd/trainer.hpp"

namespace bsgd {

// Carries every offending key so callers can print them all at once.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::vector<std::string> keys)
      : std::runtime_error(what), keys_(std::move(keys)) {}
  const std::vector<std::string>& keys() const { return keys_; }

 private:
  std::vector<std::string> keys_;
};

enum class KeyType { kInt, kUInt, kDouble, kString, kChoice, kIntList };

struct ConfigKey {
  std::string name;
  KeyType type;
  std::string default_value;
  std::optional<double> min;
  std::optional<double> max;
  std::vector<std::string> choices;  // kChoice only
  std::string help;
};

// Every recognized key, in file order. Defaults are the desk preset.
const std::vector<ConfigKey>& config_registry();
const ConfigKey* find_config_key(const std::string& name);

// Flat key=value configuration. '#' starts a comment; later lines win.
class Config {
 public:
  Config();  // all defaults

  static Config parse_text(const std::string& text);
  static Config load(const std::filesystem::path& path);

  // Throws ConfigError naming the key on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  // Applies several overrides and reports every bad one together.
  void set_all(const std::map<std::string, std::string>& kv);

  const std::string& get(const std::string& key) const;
  long long get_int(const std::string& key) const;
  std::uint64_t get_uint(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::vector<int> get_int_list(const std::string& key) const;

  // Resolved configuration, one "key = value" line per registry entry.
  std::string to_text() const;
  void save(const std::filesystem::path& path) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

NoiseSchedule schedule_from(const Config& c);
SceneConfig scene_from(const Config& c);
NoiseConfig noise_from(const Config& c);
BlindSpotNetConfig blind_config_from(const Config& c);
PlainNetConfig plain_config_from(const Config& c);
TrainConfig train_config_from(const Config& c);
SamplerConfig sampler_config_from(const Config& c);
GaussianWorld oracle_world_from(const Config& c);
OracleOptions oracle_options_from(const Config& c);

// Training patches per data_source. Errors name data_dir when the folder is
// missing or holds no usable image.
PatchDataset dataset_from(const Config& c);

}  // namespace bsgd

#endif  // BSGD_CONFIG_HPP_
