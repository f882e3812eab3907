/*
 * Copyright 2026 The MAP-SNN Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface of the MAP-SNN engine.
 *
 * Every function returns a mapsnn_status. On failure a one-line message is
 * available from mapsnn_last_error() until the next call on the same thread.
 * Handles are opaque and owned by the caller, who releases them with the
 * matching *_free function. Output directories are created as needed.
 */

#ifndef MAPSNN_MAPSNN_H_
#define MAPSNN_MAPSNN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(MAPSNN_BUILDING_LIBRARY)
#define MAPSNN_API __declspec(dllexport)
#else
#define MAPSNN_API __declspec(dllimport)
#endif
#else
#define MAPSNN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mapsnn_status {
  MAPSNN_OK = 0,
  MAPSNN_ERR_INVALID_ARGUMENT = 1, /* null pointer, bad enum value */
  MAPSNN_ERR_CONFIG = 2,           /* invalid configuration or shape mismatch */
  MAPSNN_ERR_IO = 3,
  MAPSNN_ERR_FORMAT = 4,           /* malformed event file or checkpoint */
  MAPSNN_ERR_NUMERIC = 5,          /* non-finite value in a pass */
  MAPSNN_ERR_INTERNAL = 6,
  MAPSNN_ERR_BUFFER_TOO_SMALL = 7
} mapsnn_status;

typedef enum mapsnn_mode {
  MAPSNN_MODE_SFA = 0,
  MAPSNN_MODE_LINEAR = 1,
  MAPSNN_MODE_SSP = 2
} mapsnn_mode;

typedef enum mapsnn_pattern { MAPSNN_PATTERN_MSP = 0, MAPSNN_PATTERN_SSP = 1 } mapsnn_pattern;

typedef enum mapsnn_format {
  MAPSNN_FORMAT_NMNIST = 0,
  MAPSNN_FORMAT_PORTABLE = 1
} mapsnn_format;

MAPSNN_API const char* mapsnn_version(void);
MAPSNN_API const char* mapsnn_status_name(mapsnn_status status);
/* Message of the last failed call on this thread, or "". */
MAPSNN_API const char* mapsnn_last_error(void);

/* ---- Experiment configuration ---------------------------------------- */

typedef struct mapsnn_config mapsnn_config;

/* Relative data paths resolve against the file's directory. */
MAPSNN_API mapsnn_status mapsnn_config_load(const char* path, mapsnn_config** out);
/* `base_dir` may be NULL (current directory). */
MAPSNN_API mapsnn_status mapsnn_config_parse(const char* json, const char* base_dir,
                                             mapsnn_config** out);
MAPSNN_API void mapsnn_config_free(mapsnn_config* config);
MAPSNN_API mapsnn_status mapsnn_config_set_seed(mapsnn_config* config, uint64_t seed);
MAPSNN_API mapsnn_status mapsnn_config_set_threads(mapsnn_config* config, int threads);
/* Canonical JSON with defaults filled in. `*needed` receives the size
 * including the terminating NUL; BUFFER_TOO_SMALL if `capacity` is short. */
MAPSNN_API mapsnn_status mapsnn_config_to_json(const mapsnn_config* config, char* buffer,
                                               size_t capacity, size_t* needed);

/* ---- Experiments ------------------------------------------------------ */

typedef struct mapsnn_run_options {
  const char* out_dir; /* NULL means "." */
  int verbose;         /* nonzero: progress lines on stderr */
} mapsnn_run_options;

typedef struct mapsnn_train_result {
  double final_error;
  double final_loss;
  double best_test_error;
  int start_epoch;
  int end_epoch;
} mapsnn_train_result;

/* Writes the metrics CSV and the best-so-far checkpoint named in the config. */
MAPSNN_API mapsnn_status mapsnn_train(const mapsnn_config* config,
                                      const mapsnn_run_options* run,
                                      mapsnn_train_result* result);

/* Evaluates a checkpoint on the configured test split; writes eval.csv. */
MAPSNN_API mapsnn_status mapsnn_eval(const mapsnn_config* config, const char* checkpoint,
                                     const mapsnn_run_options* run, double* error_rate,
                                     double* loss);

typedef struct mapsnn_sweep_cell {
  double dt;
  mapsnn_pattern pattern;
  mapsnn_mode mode;
  int steps;
  double final_error;
  double final_loss;
} mapsnn_sweep_cell;

/* Two cells per dt. `dts` may be NULL to use {1, 2, 4, 8}. `cells` may be
 * NULL when `capacity` is 0; `*count` always receives the cell count. */
MAPSNN_API mapsnn_status mapsnn_sweep_dt(const mapsnn_config* config, const double* dts,
                                         size_t num_dts, int parallel,
                                         const mapsnn_run_options* run,
                                         mapsnn_sweep_cell* cells, size_t capacity,
                                         size_t* count);

typedef struct mapsnn_sfa_result {
  double sfa_error;
  double linear_error;
  double sfa_spikes;
  double linear_spikes;
  double ratio; /* linear / sfa */
} mapsnn_sfa_result;

MAPSNN_API mapsnn_status mapsnn_compare_sfa(const mapsnn_config* config,
                                            const mapsnn_run_options* run,
                                            mapsnn_sfa_result* result);

typedef struct mapsnn_plasticity_result {
  int half_epoch;
  double trainable_loss_half;
  double frozen_loss_half;
  double trainable_loss_final;
  double frozen_loss_final;
  double trainable_error;
  double frozen_error;
} mapsnn_plasticity_result;

MAPSNN_API mapsnn_status mapsnn_compare_plasticity(const mapsnn_config* config,
                                                   const mapsnn_run_options* run,
                                                   mapsnn_plasticity_result* result);

typedef struct mapsnn_trace_options {
  mapsnn_mode mode;
  double dt;        /* ms */
  double window_ms;
  const char* schedule; /* "VALUE@DURATION_MS,..."; NULL or "" is zero input */
  double v_threshold;
  double tau_decay;
  double q;
  int s_max;
  double kernel_a;
  double kernel_b;
  double kernel_delay;
  int kernel_size;
} mapsnn_trace_options;

MAPSNN_API void mapsnn_trace_options_default(mapsnn_trace_options* options);
/* Writes trace.csv (t,I,v,n_star,s,u,o). */
MAPSNN_API mapsnn_status mapsnn_trace_neuron(const mapsnn_trace_options* options,
                                             const mapsnn_run_options* run,
                                             double* total_spikes);

/* Checks `count` random micro-networks; writes gradcheck.csv. `*passed` is 1
 * when every report passed. */
MAPSNN_API mapsnn_status mapsnn_gradcheck(uint64_t seed, int count,
                                          const mapsnn_run_options* run, int* passed,
                                          double* max_rel_error);

/* Parses every file and writes convert_check.csv; a file that fails to
 * parse is counted in `*failures`, not reported as an error status. */
MAPSNN_API mapsnn_status mapsnn_convert_check(const char* const* files, size_t num_files,
                                              mapsnn_format format, int merge_polarity,
                                              const mapsnn_run_options* run,
                                              size_t* failures);
/* Same, for every file listed in a "filename,label" manifest. */
MAPSNN_API mapsnn_status mapsnn_convert_check_manifest(const char* manifest,
                                                       mapsnn_format format,
                                                       int merge_polarity,
                                                       const mapsnn_run_options* run,
                                                       size_t* checked, size_t* failures);

/* ---- Trained models ---------------------------------------------------- */

typedef struct mapsnn_model mapsnn_model;

MAPSNN_API mapsnn_status mapsnn_model_load(const char* checkpoint, mapsnn_model** out);
MAPSNN_API void mapsnn_model_free(mapsnn_model* model);
MAPSNN_API mapsnn_status mapsnn_model_shape(const mapsnn_model* model, int* input_width,
                                            int* steps, int* num_classes);
/* `counts` is the binned input, row-major [steps][input_width]. Writes
 * num_classes logits and, if `predicted` is non-NULL, the predicted class. */
MAPSNN_API mapsnn_status mapsnn_model_forward(const mapsnn_model* model,
                                              const int32_t* counts, size_t num_counts,
                                              double* logits, size_t capacity,
                                              int* predicted);

#ifdef __cplusplus
}
#endif

#endif /* MAPSNN_MAPSNN_H_ */
