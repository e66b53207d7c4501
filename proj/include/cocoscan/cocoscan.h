/* cocoscan C API: opaque handles, integer status codes, library-owned
 * strings released with cocoscan_string_free. */
#ifndef COCOSCAN_H
#define COCOSCAN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(COCOSCAN_BUILDING_LIBRARY)
#    define COCOSCAN_API __declspec(dllexport)
#  else
#    define COCOSCAN_API __declspec(dllimport)
#  endif
#else
#  define COCOSCAN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cocoscan_status {
  COCOSCAN_OK = 0,
  COCOSCAN_INVALID_INPUT = 1,    /* malformed or inconsistent inputs */
  COCOSCAN_MISSING_RESOURCE = 2, /* file not found or unreadable */
  COCOSCAN_NUMERIC_FAILURE = 3   /* solver did not converge, singular system */
} cocoscan_status;

typedef struct cocoscan_dataset cocoscan_dataset;
typedef struct cocoscan_config cocoscan_config;
typedef struct cocoscan_model cocoscan_model;

/* Message of the last failed call on this thread; "" when none. */
COCOSCAN_API const char* cocoscan_last_error(void);
COCOSCAN_API const char* cocoscan_version(void);
COCOSCAN_API void cocoscan_string_free(char* s);

/* ---- datasets ---- */

COCOSCAN_API cocoscan_status cocoscan_dataset_load_csv(const char* path, cocoscan_dataset** out);
COCOSCAN_API cocoscan_status cocoscan_dataset_parse_csv(const char* text, cocoscan_dataset** out);
COCOSCAN_API cocoscan_status cocoscan_dataset_to_csv(const cocoscan_dataset* ds, char** out);
COCOSCAN_API cocoscan_status cocoscan_dataset_shape(const cocoscan_dataset* ds, size_t* samples,
                                                    size_t* bands, size_t* classes);
COCOSCAN_API cocoscan_status cocoscan_dataset_window(const cocoscan_dataset* ds, double lo_nm,
                                                     double hi_nm, cocoscan_dataset** out);
COCOSCAN_API void cocoscan_dataset_free(cocoscan_dataset* ds);

typedef struct cocoscan_synth_options {
  size_t n_per_class;
  double axis_lo_nm;
  double axis_hi_nm;
  size_t axis_points;
  double peak_center_nm;
  double peak_width_nm;
  double base_amplitude;
  double water_gain;
  double noise_sd;
  uint64_t seed;
} cocoscan_synth_options;

/* Fills the defaults: 14 per class, 2500-4000 nm over 729 points, classes
 * authentic / adulterated10 / adulterated20 at 0, 0.1 and 0.2 water. */
COCOSCAN_API void cocoscan_synth_defaults(cocoscan_synth_options* options);
COCOSCAN_API cocoscan_status cocoscan_synth_generate(const cocoscan_synth_options* options,
                                                     cocoscan_dataset** out);

/* ---- pipeline configuration ---- */

COCOSCAN_API cocoscan_status cocoscan_config_new(cocoscan_config** out);
COCOSCAN_API void cocoscan_config_free(cocoscan_config* cfg);
COCOSCAN_API cocoscan_status cocoscan_config_load_file(cocoscan_config* cfg, const char* path);
COCOSCAN_API cocoscan_status cocoscan_config_apply_text(cocoscan_config* cfg, const char* text);
/* Dotted key, e.g. "classifier.k". */
COCOSCAN_API cocoscan_status cocoscan_config_set(cocoscan_config* cfg, const char* key,
                                                 const char* value);
/* "FEATURE+CLASSIFIER", e.g. "lda+knn". */
COCOSCAN_API cocoscan_status cocoscan_config_set_pipeline(cocoscan_config* cfg, const char* spec);
COCOSCAN_API cocoscan_status cocoscan_config_to_text(const cocoscan_config* cfg, char** out);

/* ---- evaluation ---- */

/* Cross-validates one pipeline. Any output pointer may be NULL. */
COCOSCAN_API cocoscan_status cocoscan_evaluate(const cocoscan_dataset* ds,
                                               const cocoscan_config* cfg,
                                               double* balanced_accuracy, char** csv,
                                               char** text);
/* 3 x 3 grid of feature methods and classifiers on shared folds. */
COCOSCAN_API cocoscan_status cocoscan_evaluate_grid(const cocoscan_dataset* ds,
                                                    const cocoscan_config* cfg, char** csv,
                                                    char** text);
/* KNN accuracy for k = 1..k_max; CSV `k,balanced_accuracy`. */
COCOSCAN_API cocoscan_status cocoscan_sweep_k(const cocoscan_dataset* ds,
                                              const cocoscan_config* cfg, size_t k_max,
                                              char** csv);
/* method "pca" or "lda"; CSV `component1,component2,label`. */
COCOSCAN_API cocoscan_status cocoscan_project(const cocoscan_dataset* ds,
                                              const cocoscan_config* cfg, const char* method,
                                              char** csv);

/* ---- preprocessing ---- */

/* Paired t-tests of group_a rows in `a` against group_b rows in `b`
 * (b may equal a). NULL or "" takes every row. */
COCOSCAN_API cocoscan_status cocoscan_ttest(const cocoscan_dataset* a, const char* group_a,
                                            const cocoscan_dataset* b, const char* group_b,
                                            char** csv, char** text);
/* Backward elimination scored by the configured pipeline's CV accuracy. */
COCOSCAN_API cocoscan_status cocoscan_bfe(const cocoscan_dataset* ds, const cocoscan_config* cfg,
                                          size_t min_features, double tolerance, char** csv,
                                          char** text);
COCOSCAN_API cocoscan_status cocoscan_window_search(const cocoscan_dataset* ds,
                                                    const cocoscan_config* cfg, size_t grid_step,
                                                    size_t min_width, char** csv, char** text);

/* ---- trained models ---- */

COCOSCAN_API cocoscan_status cocoscan_model_train(const cocoscan_dataset* ds,
                                                  const cocoscan_config* cfg,
                                                  cocoscan_model** out);
COCOSCAN_API cocoscan_status cocoscan_model_save(const cocoscan_model* model, const char* path);
COCOSCAN_API cocoscan_status cocoscan_model_load(const char* path, cocoscan_model** out);
COCOSCAN_API cocoscan_status cocoscan_model_to_text(const cocoscan_model* model, char** out);
COCOSCAN_API cocoscan_status cocoscan_model_parse(const char* text, cocoscan_model** out);
/* Classifies every row of a sample CSV (header of wavelengths, optional
 * label column). Writes one class name per line. */
COCOSCAN_API cocoscan_status cocoscan_model_predict_csv(const cocoscan_model* model,
                                                        const char* samples_csv, char** labels);
COCOSCAN_API void cocoscan_model_free(cocoscan_model* model);

#ifdef __cplusplus
}
#endif

#endif
