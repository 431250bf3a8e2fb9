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

// Command-line front end. Links only the C API.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bsgd/bsgd.h"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kUsage = 1, kRuntime = 2, kViolation = 3 };

// Raised with the exit code a failing C call maps to.
struct CliError {
  int code;
  std::string message;
};

int exit_for(bsgd_status s) {
  switch (s) {
    case BSGD_OK: return kOk;
    case BSGD_ERR_CONFIG:
    case BSGD_ERR_INCOMPATIBLE:
    case BSGD_ERR_INVALID_ARGUMENT: return kUsage;
    default: return kRuntime;
  }
}

void check(bsgd_status s, const std::string& context = "") {
  if (s == BSGD_OK) return;
  std::string msg = bsgd_last_error();
  if (!context.empty()) msg = context + ": " + msg;
  throw CliError{exit_for(s), msg};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ConfigPtr = std::unique_ptr<bsgd_config, Deleter<bsgd_config, bsgd_config_free>>;
using ImagePtr = std::unique_ptr<bsgd_image, Deleter<bsgd_image, bsgd_image_free>>;
using ModelsPtr = std::unique_ptr<bsgd_models, Deleter<bsgd_models, bsgd_models_free>>;
using RunPtr = std::unique_ptr<bsgd_run, Deleter<bsgd_run, bsgd_run_free>>;

template <class F>
std::string read_string(F&& f) {
  size_t needed = 0;
  check(f(nullptr, 0, &needed));
  std::string s(needed, '\0');
  check(f(s.data(), s.size(), &needed));
  s.resize(needed - 1);
  return s;
}

std::string config_get(const bsgd_config* c, const std::string& key) {
  return read_string([&](char* b, size_t n, size_t* k) { return bsgd_config_get(c, key.c_str(), b, n, k); });
}

std::string config_text(const bsgd_config* c) {
  return read_string([&](char* b, size_t n, size_t* k) { return bsgd_config_to_text(c, b, n, k); });
}

std::string file_digest(const fs::path& p) {
  return read_string([&](char* b, size_t n, size_t* k) { return bsgd_file_digest(p.c_str(), b, n, k); });
}

ConfigPtr clone(const bsgd_config* c) {
  bsgd_config* out = nullptr;
  check(bsgd_config_clone(c, &out));
  return ConfigPtr(out);
}

ImagePtr load_png(const fs::path& p, int channels = 0) {
  bsgd_image* img = nullptr;
  check(bsgd_image_load_png(p.c_str(), channels, &img), p.string());
  return ImagePtr(img);
}

ModelsPtr load_models(const std::string& blind, const std::string& plain) {
  bsgd_models* m = nullptr;
  check(bsgd_models_load(blind.c_str(), plain.c_str(), &m), "loading checkpoints");
  return ModelsPtr(m);
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string absolute(const std::string& p) {
  return p.empty() ? p : fs::absolute(p).lexically_normal().string();
}

std::vector<fs::path> png_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(in))
        if (e.is_regular_file() && e.path().extension() == ".png") found.push_back(e.path());
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(in)) {
      files.emplace_back(in);
    } else {
      throw CliError{kUsage, "input not found: " + in};
    }
  }
  if (files.empty()) throw CliError{kUsage, "no PNG inputs"};
  return files;
}

// ---------------------------------------------------------------------------
// Run manifests

// Arguments a command needs beyond the configuration. Stored verbatim in the
// manifest so `rerun` can rebuild the invocation.
using Args = std::map<std::string, std::vector<std::string>>;

struct Output {
  std::string path;          // relative to the output directory
  bool deterministic = true;  // false for files carrying wall-clock times
};

struct Manifest {
  std::string command;
  std::string code_digest;
  std::string seed;
  std::string start, end;
  Args args;
  std::string config_text;
  std::vector<Output> outputs;
  std::map<std::string, std::string> digests;

  void write(const fs::path& out_dir) {
    std::ofstream f(out_dir / "manifest.txt");
    if (!f) throw CliError{kRuntime, "cannot write manifest in " + out_dir.string()};
    f << "# bsgd run manifest\n";
    f << "command = " << command << "\n";
    f << "version = " << bsgd_version() << "\n";
    f << "code_digest = " << code_digest << "\n";
    f << "seed = " << seed << "\n";
    f << "start = " << start << "\n";
    f << "end = " << end << "\n";
    f << "[args]\n";
    for (const auto& [k, vs] : args)
      for (const auto& v : vs) f << k << " = " << v << "\n";
    f << "[config]\n" << config_text;
    f << "[outputs]\n";
    for (const auto& o : outputs) {
      if (o.deterministic) {
        f << o.path << " = " << file_digest(out_dir / o.path) << "\n";
      } else {
        f << o.path << " = nondeterministic\n";
      }
    }
  }

  static Manifest read(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw CliError{kUsage, "cannot read manifest " + path.string()};
    Manifest m;
    std::string line, section;
    while (std::getline(f, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (line.front() == '[') {
        section = line;
        continue;
      }
      const auto eq = line.find(" = ");
      const std::string k = eq == std::string::npos ? line : line.substr(0, eq);
      const std::string v = eq == std::string::npos ? "" : line.substr(eq + 3);
      if (section.empty()) {
        if (k == "command") m.command = v;
        else if (k == "code_digest") m.code_digest = v;
        else if (k == "seed") m.seed = v;
      } else if (section == "[args]") {
        m.args[k].push_back(v);
      } else if (section == "[config]") {
        m.config_text += line + "\n";
      } else if (section == "[outputs]") {
        m.outputs.push_back({k, v != "nondeterministic"});
        if (v != "nondeterministic") m.digests[k] = v;
      }
    }
    if (m.command.empty()) throw CliError{kUsage, "manifest lacks a command: " + path.string()};
    return m;
  }
};

std::string arg1(const Args& a, const std::string& key, const std::string& def = "") {
  auto it = a.find(key);
  return it == a.end() || it->second.empty() ? def : it->second.front();
}

// ---------------------------------------------------------------------------
// Commands. Each takes the resolved config, its arguments and an output
// directory, and returns the outputs to list in the manifest.

struct Context {
  const bsgd_config* cfg;
  const Args& args;
  fs::path out;
  int exit_code = kOk;
};

std::vector<Output> run_train(Context& ctx) {
  check(bsgd_train(ctx.cfg, ctx.out.c_str()), "training");
  std::cout << "checkpoints: " << (ctx.out / "blind.ckpt").string() << " "
            << (ctx.out / "plain.ckpt").string() << "\n";
  return {{"blind.ckpt"}, {"plain.ckpt"}, {"dataset_manifest.csv"}, {"train_log.csv", false}};
}

std::vector<Output> run_denoise(Context& ctx) {
  const auto models = load_models(arg1(ctx.args, "blind"), arg1(ctx.args, "plain"));
  check(bsgd_models_check(models.get(), ctx.cfg));
  const auto files = png_inputs(ctx.args.count("input") ? ctx.args.at("input") : std::vector<std::string>{});
  const bool dump = arg1(ctx.args, "dump_steps", "0") == "1";
  const int channels = std::stoi(config_get(ctx.cfg, "channels"));

  // Every input is decoded and checked before any sampling starts.
  std::vector<ImagePtr> images;
  for (const auto& f : files) {
    images.push_back(load_png(f, channels));
    check(bsgd_denoise_check(models.get(), ctx.cfg, images.back().get()), f.string());
  }
  std::vector<Output> outs;
  for (std::size_t i = 0; i < files.size(); ++i) {
    bsgd_image* y = nullptr;
    bsgd_run* rec = nullptr;
    check(bsgd_denoise(models.get(), ctx.cfg, images[i].get(), &y, dump ? &rec : nullptr),
          files[i].string());
    ImagePtr out(y);
    RunPtr record(rec);
    const std::string name = files[i].filename().string();
    check(bsgd_image_save_png(out.get(), (ctx.out / name).c_str()));
    outs.push_back({name});
    if (record) {
      const fs::path rdir = ctx.out / "records" / files[i].stem();
      check(bsgd_run_save(record.get(), rdir.c_str()));
    }
    std::cout << name << "\n";
  }
  return outs;
}

std::vector<Output> run_evaluate(Context& ctx) {
  double p = 0, s = 0;
  const fs::path csv = ctx.out / "metrics.csv";
  check(bsgd_evaluate_dirs(arg1(ctx.args, "denoised").c_str(), arg1(ctx.args, "clean").c_str(),
                           csv.c_str(), &p, &s),
        "evaluate");
  std::printf("mean PSNR %.4f dB, mean SSIM %.4f\n", p, s);
  return {{"metrics.csv"}};
}

struct EvalPair {
  std::string id;
  ImagePtr clean, noisy;
};

std::vector<EvalPair> eval_pairs(const bsgd_config* cfg, const Args& args) {
  std::vector<EvalPair> pairs;
  const std::string nd = arg1(args, "noisy_dir"), cd = arg1(args, "clean_dir");
  const int channels = std::stoi(config_get(cfg, "channels"));
  if (!nd.empty() || !cd.empty()) {
    if (nd.empty() || cd.empty()) throw CliError{kUsage, "--noisy-dir and --clean-dir go together"};
    for (const auto& f : png_inputs({nd})) {
      const fs::path c = fs::path(cd) / f.filename();
      if (!fs::exists(c)) throw CliError{kUsage, "no clean counterpart for " + f.filename().string()};
      pairs.push_back({f.stem().string(), load_png(c, channels), load_png(f, channels)});
    }
    return pairs;
  }
  const int n = std::stoi(config_get(cfg, "eval_count"));
  for (int i = 0; i < n; ++i) {
    bsgd_image *c = nullptr, *y = nullptr;
    check(bsgd_synth_pair(cfg, static_cast<uint64_t>(i), &c, &y));
    pairs.push_back({std::to_string(i), ImagePtr(c), ImagePtr(y)});
  }
  return pairs;
}

std::vector<Output> run_make_data(Context& ctx) {
  const auto pairs = eval_pairs(ctx.cfg, {});
  fs::create_directories(ctx.out / "clean");
  fs::create_directories(ctx.out / "noisy");
  std::vector<Output> outs;
  char name[32];
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    std::snprintf(name, sizeof name, "%05zu.png", i);
    check(bsgd_image_save_png(pairs[i].clean.get(), (ctx.out / "clean" / name).c_str()));
    check(bsgd_image_save_png(pairs[i].noisy.get(), (ctx.out / "noisy" / name).c_str()));
    outs.push_back({std::string("clean/") + name});
    outs.push_back({std::string("noisy/") + name});
  }
  std::cout << pairs.size() << " pairs in " << ctx.out.string() << "\n";
  return outs;
}

std::vector<Output> run_sweep(Context& ctx) {
  static const std::map<std::string, std::string> kAxes = {
      {"w", "w"}, {"steps", "steps"}, {"rounds", "rounds"}, {"p", "p_replace"}};
  const std::string axis = arg1(ctx.args, "axis");
  const auto ax = kAxes.find(axis);
  if (ax == kAxes.end()) throw CliError{kUsage, "unknown sweep axis '" + axis + "' (w, steps, rounds, p)"};

  std::vector<std::pair<double, std::string>> values;
  std::stringstream ss(arg1(ctx.args, "values"));
  for (std::string v; std::getline(ss, v, ',');) {
    try {
      values.emplace_back(std::stod(v), v);
    } catch (const std::exception&) {
      throw CliError{kUsage, "sweep value '" + v + "' is not a number"};
    }
  }
  if (values.empty()) throw CliError{kUsage, "--values is empty"};
  std::stable_sort(values.begin(), values.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  const auto models = load_models(arg1(ctx.args, "blind"), arg1(ctx.args, "plain"));
  check(bsgd_models_check(models.get(), ctx.cfg));
  const auto pairs = eval_pairs(ctx.cfg, ctx.args);

  const std::string csv_name = "sweep_" + axis + ".csv";
  const std::string plot_name = "sweep_" + axis + ".png";
  std::ofstream csv(ctx.out / csv_name);
  csv << ax->second << ",mean_psnr,mean_ssim,status\n";
  std::vector<double> xs, ps, ssims;
  for (const auto& [x, text] : values) {
    double p = NAN, s = NAN;
    std::string status = "ok";
    try {
      const ConfigPtr cell = clone(ctx.cfg);
      check(bsgd_config_set(cell.get(), ax->second.c_str(), text.c_str()));
      double sp = 0, sv = 0;
      for (const auto& pair : pairs) {
        bsgd_image* y = nullptr;
        check(bsgd_denoise(models.get(), cell.get(), pair.noisy.get(), &y, nullptr));
        ImagePtr out(y);
        double a = 0, b = 0;
        check(bsgd_psnr(out.get(), pair.clean.get(), &a));
        check(bsgd_ssim(out.get(), pair.clean.get(), &b));
        sp += a;
        sv += b;
      }
      p = sp / static_cast<double>(pairs.size());
      s = sv / static_cast<double>(pairs.size());
    } catch (const CliError& e) {
      // A failed cell is recorded and the sweep moves on.
      status = "failed: " + e.message;
      std::replace(status.begin(), status.end(), ',', ';');
      std::replace(status.begin(), status.end(), '\n', ' ');
    }
    char row[128];
    std::snprintf(row, sizeof row, "%s,%.6f,%.6f,", text.c_str(), p, s);
    csv << row << status << "\n";
    std::printf("%s = %s: PSNR %.4f SSIM %.4f (%s)\n", ax->second.c_str(), text.c_str(), p, s,
                status.c_str());
    std::fflush(stdout);
    xs.push_back(x);
    ps.push_back(p);
    ssims.push_back(s);
  }
  csv.close();
  const double* ys[] = {ps.data(), ssims.data()};
  const char* labels[] = {"PSNR (dB)", "SSIM"};
  const std::string title = "Sweep over " + ax->second;
  check(bsgd_plot_lines((ctx.out / plot_name).c_str(), title.c_str(), ax->second.c_str(),
                        xs.data(), xs.size(), ys, labels, 2));
  return {{csv_name}, {plot_name}};
}

std::vector<Output> run_oracle(Context& ctx) {
  bsgd_oracle_report r{};
  check(bsgd_oracle_check(ctx.cfg, (ctx.out / "oracle.csv").c_str(), &r), "oracle");
  const auto verdict = [](int ok) { return ok ? "pass" : "FAIL"; };
  std::printf("runs %d (%llu values)\n", r.runs, static_cast<unsigned long long>(r.values));
  std::printf("mean              %.6f  %s\n", r.mean, verdict(r.mean_ok));
  if (r.variance_defined) {
    std::printf("variance          %.6f  %s\n", r.variance, verdict(r.variance_ok));
  } else {
    std::printf("variance          undefined (one run)\n");
  }
  std::printf("guidance neutral  %s\n", verdict(r.guidance_neutral));
  std::printf("refinement rms    %.6f  %s (max %.6f)\n", r.refinement_delta,
              verdict(r.refinement_ok), r.refinement_max);
  if (!r.passed) {
    std::string which;
    if (!r.mean_ok) which += " mean";
    if (r.variance_defined && !r.variance_ok) which += " variance";
    if (!r.guidance_neutral) which += " guidance-neutrality";
    if (!r.refinement_ok) which += " refinement";
    std::fprintf(stderr, "oracle violation:%s\n", which.c_str());
    ctx.exit_code = kViolation;
  }
  return {{"oracle.csv"}};
}

using Runner = std::vector<Output> (*)(Context&);

Runner runner_for(const std::string& command) {
  if (command == "train") return run_train;
  if (command == "denoise") return run_denoise;
  if (command == "evaluate") return run_evaluate;
  if (command == "sweep") return run_sweep;
  if (command == "oracle") return run_oracle;
  if (command == "make-data") return run_make_data;
  throw CliError{kUsage, "unknown command in manifest: " + command};
}

// Executes one command into out_dir and writes its manifest.
int execute(const std::string& command, const bsgd_config* cfg, const Args& args,
            const fs::path& out_dir) {
  fs::create_directories(out_dir);
  Manifest m;
  m.command = command;
  m.code_digest = bsgd_code_digest();
  m.seed = config_get(cfg, command == "train" ? "train_seed" : command == "oracle" ? "oracle_seed" : "seed");
  m.start = utc_now();
  m.args = args;
  m.config_text = config_text(cfg);
  Context ctx{cfg, args, out_dir};
  m.outputs = runner_for(command)(ctx);
  m.end = utc_now();
  m.write(out_dir);
  return ctx.exit_code;
}

int rerun(const fs::path& manifest_path, const fs::path& out_dir, bool verify) {
  const Manifest m = Manifest::read(manifest_path);
  bsgd_config* raw = nullptr;
  check(bsgd_config_parse(m.config_text.c_str(), &raw), "manifest config");
  ConfigPtr cfg(raw);
  if (m.code_digest != bsgd_code_digest()) {
    std::fprintf(stderr, "warning: manifest written by code %s, running %s\n", m.code_digest.c_str(),
                 bsgd_code_digest());
  }
  int code = execute(m.command, cfg.get(), m.args, out_dir);
  if (!verify) return code;
  int mismatches = 0;
  for (const auto& [path, digest] : m.digests) {
    const fs::path p = out_dir / path;
    const std::string now = fs::exists(p) ? file_digest(p) : "missing";
    if (now != digest) {
      std::fprintf(stderr, "mismatch: %s (%s vs %s)\n", path.c_str(), digest.c_str(), now.c_str());
      ++mismatches;
    }
  }
  std::printf("verified %zu outputs, %d mismatched\n", m.digests.size(), mismatches);
  return mismatches ? kViolation : code;
}

// Adds --config, --set and one flag per configuration key to a subcommand.
struct ConfigFlags {
  std::string config_path;
  std::vector<std::string> sets;
  std::map<std::string, std::string> values;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "flat key = value configuration file");
    app->add_option("--set", sets, "override as key=value (repeatable)");
    for (size_t i = 0; i < bsgd_config_key_count(); ++i) {
      const std::string key = bsgd_config_key_name(i);
      std::string flag = "--" + key;
      std::replace(flag.begin() + 2, flag.end(), '_', '-');
      app->add_option_function<std::string>(
             flag, [this, key](const std::string& v) { values[key] = v; },
             std::string(bsgd_config_key_help(i)) + " [" + bsgd_config_key_default(i) + "]")
          ->group("Configuration keys");
    }
  }

  ConfigPtr resolve() const {
    bsgd_config* raw = nullptr;
    if (config_path.empty()) {
      check(bsgd_config_new(&raw));
    } else {
      // An unreadable --config is a usage problem, not a runtime one.
      if (bsgd_config_load(config_path.c_str(), &raw) != BSGD_OK) {
        throw CliError{kUsage, bsgd_last_error()};
      }
    }
    ConfigPtr cfg(raw);
    std::map<std::string, std::string> all;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw CliError{kUsage, "--set expects key=value, got '" + s + "'"};
      all[s.substr(0, eq)] = s.substr(eq + 1);
    }
    for (const auto& [k, v] : values) all[k] = v;  // flags win over --set
    std::string errors;
    for (const auto& [k, v] : all) {
      if (bsgd_config_set(cfg.get(), k.c_str(), v.c_str()) != BSGD_OK) {
        std::string msg = bsgd_last_error();
        const std::string prefix = "configuration error\n  ";
        if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
        errors += "\n  " + msg;
      }
    }
    if (!errors.empty()) throw CliError{kUsage, "configuration error" + errors};
    return cfg;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blind-spot guided diffusion denoiser"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bsgd_version()) + " (" + bsgd_code_digest() + ")");

  std::string out_dir;
  std::string blind, plain, denoised, clean, noisy_dir, clean_dir, axis, values, manifest;
  std::vector<std::string> inputs;
  bool dump_steps = false, verify = false;

  ConfigFlags flags[6];
  auto* train = app.add_subcommand("train", "train both branches");
  auto* denoise = app.add_subcommand("denoise", "denoise PNG files or folders");
  auto* evaluate = app.add_subcommand("evaluate", "PSNR/SSIM of same-named PNGs");
  auto* sweep = app.add_subcommand("sweep", "ablation over one sampling knob");
  auto* oracle = app.add_subcommand("oracle", "Gaussian oracle self-check (no checkpoints)");
  auto* make_data = app.add_subcommand("make-data", "write held-out synthetic clean/noisy pairs");
  auto* rerun_cmd = app.add_subcommand("rerun", "re-execute a run from its manifest");
  CLI::App* with_config[] = {train, denoise, evaluate, sweep, oracle, make_data};
  for (int i = 0; i < 6; ++i) {
    flags[i].attach(with_config[i]);
    with_config[i]->add_option("--out", out_dir, "output directory")->required();
  }
  for (auto* c : {denoise, sweep}) {
    c->add_option("--blind", blind, "blind-spot branch checkpoint")->required();
    c->add_option("--plain", plain, "plain branch checkpoint")->required();
  }
  denoise->add_option("inputs", inputs, "PNG files or folders")->required();
  denoise->add_flag("--dump-steps", dump_steps, "save every step's estimate and mask");
  evaluate->add_option("--denoised", denoised, "folder of denoised PNGs")->required();
  evaluate->add_option("--clean", clean, "folder of clean PNGs")->required();
  sweep->add_option("--axis", axis, "w, steps, rounds or p")->required();
  sweep->add_option("--values", values, "comma-separated values")->required();
  sweep->add_option("--noisy-dir", noisy_dir, "evaluation inputs (default: synthetic held-out set)");
  sweep->add_option("--clean-dir", clean_dir, "evaluation references");
  rerun_cmd->add_option("manifest", manifest, "manifest.txt of an earlier run")->required();
  rerun_cmd->add_option("--out", out_dir, "output directory")->required();
  rerun_cmd->add_flag("--verify", verify, "compare output digests with the manifest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (rerun_cmd->parsed()) return rerun(manifest, out_dir, verify);
    for (int i = 0; i < 6; ++i) {
      if (!with_config[i]->parsed()) continue;
      const ConfigPtr cfg = flags[i].resolve();
      Args args;
      if (!blind.empty()) args["blind"] = {absolute(blind)};
      if (!plain.empty()) args["plain"] = {absolute(plain)};
      for (const auto& in : inputs) args["input"].push_back(absolute(in));
      if (dump_steps) args["dump_steps"] = {"1"};
      if (!denoised.empty()) args["denoised"] = {absolute(denoised)};
      if (!clean.empty()) args["clean"] = {absolute(clean)};
      if (!axis.empty()) args["axis"] = {axis};
      if (!values.empty()) args["values"] = {values};
      if (!noisy_dir.empty()) args["noisy_dir"] = {absolute(noisy_dir)};
      if (!clean_dir.empty()) args["clean_dir"] = {absolute(clean_dir)};
      return execute(with_config[i]->get_name(), cfg.get(), args, out_dir);
    }
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return e.code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntime;
  }
  return kUsage;
}
