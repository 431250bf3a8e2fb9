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

/* C interface to the BSGD core. Every call returns a bsgd_status; on failure
 * bsgd_last_error() holds a message for the calling thread. Handles are
 * opaque and owned by the caller, who releases them with the matching
 * *_free function (which accepts NULL). */
#ifndef BSGD_BSGD_H_
#define BSGD_BSGD_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define BSGD_API __declspec(dllexport)
#else
#define BSGD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bsgd_status {
  BSGD_OK = 0,
  BSGD_ERR_INVALID_ARGUMENT = 1,
  BSGD_ERR_CONFIG = 2,       /* unknown key or bad value; message lists the keys */
  BSGD_ERR_IO = 3,           /* unreadable/unwritable file or folder */
  BSGD_ERR_INCOMPATIBLE = 4, /* checkpoints do not fit the config or input */
  BSGD_ERR_NUMERIC = 5,      /* non-finite values; message carries the RNG state */
  BSGD_ERR_RUNTIME = 6
} bsgd_status;

typedef struct bsgd_config bsgd_config;
typedef struct bsgd_image bsgd_image;
typedef struct bsgd_models bsgd_models;
typedef struct bsgd_run bsgd_run;

BSGD_API const char* bsgd_last_error(void);
BSGD_API const char* bsgd_status_name(bsgd_status status);
BSGD_API const char* bsgd_version(void);
BSGD_API const char* bsgd_code_digest(void);

/* Strings are returned through (buf, cap); *needed receives the full length
 * including the terminator. A NULL buf only queries the length. */

/* ---- configuration ---- */
BSGD_API bsgd_status bsgd_config_new(bsgd_config** out);
BSGD_API bsgd_status bsgd_config_load(const char* path, bsgd_config** out);
BSGD_API bsgd_status bsgd_config_parse(const char* text, bsgd_config** out);
BSGD_API bsgd_status bsgd_config_clone(const bsgd_config* cfg, bsgd_config** out);
BSGD_API bsgd_status bsgd_config_set(bsgd_config* cfg, const char* key, const char* value);
BSGD_API bsgd_status bsgd_config_get(const bsgd_config* cfg, const char* key, char* buf,
                                     size_t cap, size_t* needed);
BSGD_API bsgd_status bsgd_config_to_text(const bsgd_config* cfg, char* buf, size_t cap,
                                         size_t* needed);
BSGD_API void bsgd_config_free(bsgd_config* cfg);

/* Registry of recognized keys, for building command-line flags. */
BSGD_API size_t bsgd_config_key_count(void);
BSGD_API const char* bsgd_config_key_name(size_t index);
BSGD_API const char* bsgd_config_key_default(size_t index);
BSGD_API const char* bsgd_config_key_help(size_t index);

/* ---- images: planar doubles in [-1, 1], channel-major ---- */
BSGD_API bsgd_status bsgd_image_new(int height, int width, int channels, bsgd_image** out);
/* channels = 0 keeps the file's channel count. */
BSGD_API bsgd_status bsgd_image_load_png(const char* path, int channels, bsgd_image** out);
BSGD_API bsgd_status bsgd_image_save_png(const bsgd_image* img, const char* path);
BSGD_API bsgd_status bsgd_image_shape(const bsgd_image* img, int* height, int* width,
                                      int* channels);
BSGD_API double* bsgd_image_data(bsgd_image* img);
BSGD_API const double* bsgd_image_const_data(const bsgd_image* img);
BSGD_API void bsgd_image_free(bsgd_image* img);

/* Held-out synthetic pair number `index` (clean scene and its noisy copy,
 * quantized to 8 bits as if read from disk), sized eval_size. */
BSGD_API bsgd_status bsgd_synth_pair(const bsgd_config* cfg, uint64_t index, bsgd_image** clean,
                                     bsgd_image** noisy);

/* ---- training ---- */
/* Trains both branches and writes blind.ckpt, plain.ckpt, train_log.csv and
 * dataset_manifest.csv into out_dir. */
BSGD_API bsgd_status bsgd_train(const bsgd_config* cfg, const char* out_dir);

/* ---- models and sampling ---- */
BSGD_API bsgd_status bsgd_models_load(const char* blind_ckpt, const char* plain_ckpt,
                                      bsgd_models** out);
/* Rejects checkpoints whose channels or schedule length disagree with cfg. */
BSGD_API bsgd_status bsgd_models_check(const bsgd_models* models, const bsgd_config* cfg);
BSGD_API bsgd_status bsgd_models_digest(const bsgd_models* models, char* buf, size_t cap,
                                        size_t* needed);
BSGD_API void bsgd_models_free(bsgd_models* models);

/* Validates checkpoints, config and input shape without sampling. */
BSGD_API bsgd_status bsgd_denoise_check(const bsgd_models* models, const bsgd_config* cfg,
                                        const bsgd_image* noisy);
/* Full guided sampler. `record` may be NULL; otherwise it receives every
 * step's estimate and mask for bsgd_run_save. */
BSGD_API bsgd_status bsgd_denoise(const bsgd_models* models, const bsgd_config* cfg,
                                  const bsgd_image* noisy, bsgd_image** out, bsgd_run** record);
BSGD_API bsgd_status bsgd_run_save(const bsgd_run* record, const char* dir);
BSGD_API void bsgd_run_free(bsgd_run* record);

/* ---- metrics ---- */
BSGD_API bsgd_status bsgd_psnr(const bsgd_image* a, const bsgd_image* b, double* out_db);
BSGD_API bsgd_status bsgd_ssim(const bsgd_image* a, const bsgd_image* b, double* out);
/* Scores same-named PNGs; writes the per-image CSV when csv_path != NULL. */
BSGD_API bsgd_status bsgd_evaluate_dirs(const char* denoised_dir, const char* clean_dir,
                                        const char* csv_path, double* mean_psnr,
                                        double* mean_ssim);

/* ---- Gaussian oracle ---- */
typedef struct bsgd_oracle_report {
  int runs;
  uint64_t values;
  double mean;
  double variance;
  int variance_defined;
  int mean_ok;
  int variance_ok;
  int guidance_neutral;
  double refinement_delta;
  double refinement_max;
  int refinement_ok;
  int passed;
} bsgd_oracle_report;

BSGD_API bsgd_status bsgd_oracle_check(const bsgd_config* cfg, const char* csv_path,
                                       bsgd_oracle_report* out);

/* ---- plots and files ---- */
/* One panel per y array, all against the same x values. */
BSGD_API bsgd_status bsgd_plot_lines(const char* path, const char* title, const char* x_label,
                                     const double* x, size_t n, const double* const* ys,
                                     const char* const* y_labels, size_t panels);
/* FNV-1a digest of a file's bytes as 16 hex digits. */
BSGD_API bsgd_status bsgd_file_digest(const char* path, char* buf, size_t cap, size_t* needed);

#ifdef __cplusplus
}
#endif

#endif /* BSGD_BSGD_H_ */
