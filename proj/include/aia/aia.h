// Copyright 2026 The AIA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef AIA_AIA_H_
#define AIA_AIA_H_

/*
 * C interface to the attribute inference toolkit.
 *
 * Every call that can fail returns an aia_status. On failure the context
 * keeps a message retrievable with aia_last_error() until the next call on
 * the same context. Stage runners take a JSON options document and, on
 * success, leave a JSON summary in aia_last_result(). Strings returned by
 * the library are owned by the context (or handle) and stay valid until the
 * next call on it.
 *
 * A context is not thread safe; use one per thread.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(AIA_BUILDING_LIBRARY)
#define AIA_API __attribute__((visibility("default")))
#else
#define AIA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aia_status {
  AIA_OK = 0,
  AIA_ERR_INVALID_ARGUMENT = 1,
  AIA_ERR_NOT_FOUND = 2,
  AIA_ERR_RATE_LIMITED = 3,
  AIA_ERR_SCHEMA = 4,
  AIA_ERR_IO = 5,
  AIA_ERR_DEGENERATE_INPUT = 6,
  AIA_ERR_DOMAIN = 7,
  AIA_ERR_CONFIG = 8,
  AIA_ERR_INSUFFICIENT_MATCHES = 9,
  AIA_ERR_NO_POSITIVES = 10,
  AIA_ERR_ATTRIBUTE_ARITY = 11,
  AIA_ERR_MISSING_PAIR = 12,
  AIA_ERR_SCHEMA_MISMATCH = 13,
  AIA_ERR_SLOT_NOT_FOUND = 14,
  AIA_ERR_EMPTY_INPUT = 15,
  AIA_ERR_OUT_OF_RANGE = 16,
  AIA_ERR_LENGTH_MISMATCH = 17,
  AIA_ERR_INTERNAL = 18,
} aia_status;

typedef struct aia_context aia_context;
typedef struct aia_matrix aia_matrix;
typedef struct aia_model aia_model;

AIA_API const char* aia_version(void);
/* Stable name such as "InvalidArgument"; "Ok" for AIA_OK. */
AIA_API const char* aia_status_name(aia_status status);

AIA_API aia_status aia_context_create(aia_context** out);
AIA_API void aia_context_destroy(aia_context* ctx);
/* Worker threads for parallel stages; 0 selects the number of cores.
 * Results do not depend on this value. */
AIA_API aia_status aia_context_set_jobs(aia_context* ctx, unsigned jobs);
AIA_API unsigned aia_context_jobs(const aia_context* ctx);
AIA_API const char* aia_last_error(const aia_context* ctx);
AIA_API const char* aia_last_result(const aia_context* ctx);

/* Statistics. */
AIA_API aia_status aia_spearman(aia_context* ctx, const double* x, const double* y, size_t n,
                                double* rho, double* p_value);
AIA_API aia_status aia_cramers_v(aia_context* ctx, const int64_t* x, const int64_t* y, size_t n,
                                 int bias_corrected, double* v, double* p_value);
AIA_API aia_status aia_required_sample_size(aia_context* ctx, double confidence, double margin,
                                            double proportion, uint64_t population,
                                            uint64_t* out);
/* Two-sample t-test from summary statistics; welch != 0 selects unequal
 * variances, otherwise the pooled-variance Student test. */
AIA_API aia_status aia_two_sample_ttest(aia_context* ctx, double mean_a, double std_a, size_t n_a,
                                        double mean_b, double std_b, size_t n_b, int welch,
                                        double* t, double* df, double* p_value);
/* `probs` is n_matches rows of n_classes probabilities. Writes the column
 * means to `average` (n_classes values) and the argmax to `predicted`. */
AIA_API aia_status aia_average_probabilities(aia_context* ctx, const double* probs,
                                             size_t n_matches, size_t n_classes, double* average,
                                             size_t* predicted);

/* Feature matrices saved by the featurize stage. */
AIA_API aia_status aia_matrix_load(aia_context* ctx, const char* csv_path, aia_matrix** out);
AIA_API void aia_matrix_destroy(aia_matrix* m);
AIA_API size_t aia_matrix_rows(const aia_matrix* m);
AIA_API size_t aia_matrix_cols(const aia_matrix* m);
/* NULL when col is out of range. */
AIA_API const char* aia_matrix_column_name(const aia_matrix* m, size_t col);
AIA_API const char* aia_matrix_schema_hash(const aia_matrix* m);

/* Trains one classifier on a matrix against one attribute of a labels CSV.
 * options_json: {"algorithm": "random_forest", "attribute": "age",
 * "params": {...}, "resampling": true, "seed": 1}. */
AIA_API aia_status aia_model_train(aia_context* ctx, const aia_matrix* features,
                                   const char* labels_csv, const char* options_json,
                                   aia_model** out);
AIA_API void aia_model_destroy(aia_model* model);
AIA_API size_t aia_model_classes(const aia_model* model);
/* Class probabilities for each row of `features`, row-major into `out`
 * (rows * classes values; out_len must be at least that). */
AIA_API aia_status aia_model_predict_proba(aia_context* ctx, const aia_model* model,
                                           const aia_matrix* features, double* out,
                                           size_t out_len);

/* Pipeline stages. Each takes a JSON object; see README for the keys. */
AIA_API aia_status aia_run_ingest(aia_context* ctx, const char* options_json);
AIA_API aia_status aia_run_labels(aia_context* ctx, const char* options_json);
AIA_API aia_status aia_run_featurize(aia_context* ctx, const char* options_json);
AIA_API aia_status aia_run_correlate(aia_context* ctx, const char* options_json);
AIA_API aia_status aia_run_attack(aia_context* ctx, const char* options_json);
AIA_API aia_status aia_run_validate(aia_context* ctx, const char* options_json);
AIA_API aia_status aia_run_synth(aia_context* ctx, const char* options_json);
AIA_API aia_status aia_reproduce_table8(aia_context* ctx, const char* options_json);

#ifdef __cplusplus
}
#endif

#endif  /* AIA_AIA_H_ */
