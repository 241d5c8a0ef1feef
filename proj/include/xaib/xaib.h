/*
 * Copyright 2026 The xaib Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef XAIB_XAIB_H_
#define XAIB_XAIB_H_

/* C interface to the xaib library. Objects are opaque handles owned by the
 * caller and released with the matching _free function. Every fallible call
 * returns an xaib_status; on failure xaib_last_error() describes the problem
 * for the calling thread until its next failing call. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32) && defined(XAIB_BUILDING_LIBRARY)
#define XAIB_API __declspec(dllexport)
#elif defined(_WIN32)
#define XAIB_API __declspec(dllimport)
#elif defined(XAIB_BUILDING_LIBRARY)
#define XAIB_API __attribute__((visibility("default")))
#else
#define XAIB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum xaib_status {
  XAIB_OK = 0,
  XAIB_ERR_INVALID_ARGUMENT = 1,
  XAIB_ERR_OUT_OF_RANGE = 2,
  XAIB_ERR_ALL_BACKGROUND = 3,
  XAIB_ERR_INVALID_GAMMA = 4,
  XAIB_ERR_NON_SQUARE = 5,
  XAIB_ERR_TOO_FEW_SAMPLES = 6,
  XAIB_ERR_SHAPE_MISMATCH = 7,
  XAIB_ERR_EMPTY_DATASET = 8,
  XAIB_ERR_BAD_MAGIC = 9,
  XAIB_ERR_BAD_VERSION = 10,
  XAIB_ERR_SHAPE_OVERFLOW = 11,
  XAIB_ERR_TRUNCATED_FILE = 12,
  XAIB_ERR_LENGTH_MISMATCH = 13,
  XAIB_ERR_DEGENERATE_SAMPLES = 14,
  XAIB_ERR_TOO_MANY_SEGMENTS = 15,
  XAIB_ERR_RULE_MISMATCH = 16,
  XAIB_ERR_EMPTY_LIST = 17,
  XAIB_ERR_EMPTY_MASK = 18,
  XAIB_ERR_NO_ROIS = 19,
  XAIB_ERR_MISSING_FILE = 20,
  XAIB_ERR_BAD_LABEL = 21,
  XAIB_ERR_DIMENSION_MISMATCH = 22,
  XAIB_ERR_IO = 23,
  XAIB_ERR_CONFIG = 24,
  XAIB_ERR_INTERNAL = 25
} xaib_status;

typedef enum xaib_label { XAIB_BENIGN = 0, XAIB_MALIGNANT = 1 } xaib_label;

typedef struct xaib_image xaib_image;
typedef struct xaib_mask xaib_mask;
typedef struct xaib_heatmap xaib_heatmap;
typedef struct xaib_model xaib_model;
typedef struct xaib_attribution xaib_attribution;

XAIB_API const char* xaib_version(void);
XAIB_API const char* xaib_status_name(xaib_status status);
/* Message of the calling thread's most recent failure; never NULL. */
XAIB_API const char* xaib_last_error(void);

/* Strings returned through char** out-parameters. */
XAIB_API void xaib_string_free(char* s);

/* Runs a subcommand ("synth", "preprocess", "split", "augment", "train",
 * "explain", "evaluate-hausdorff", "evaluate-stability",
 * "evaluate-consistency", "run-all") with options given as a JSON object.
 * On success *result_json holds a JSON summary. */
XAIB_API xaib_status xaib_cmd_run(const char* command, const char* options_json,
                                  char** result_json);

/* Validates a run report; *errors_json receives a JSON array of messages,
 * empty when the report conforms. */
XAIB_API xaib_status xaib_report_validate(const char* report_json, char** errors_json);

/* ---- images: row-major, values in [0,1] */
XAIB_API xaib_status xaib_image_create(int height, int width, const double* data,
                                       xaib_image** out);
XAIB_API xaib_status xaib_image_load_png(const char* path, xaib_image** out);
XAIB_API xaib_status xaib_image_save_png(const xaib_image* image, const char* path);
XAIB_API int xaib_image_height(const xaib_image* image);
XAIB_API int xaib_image_width(const xaib_image* image);
/* Copies height*width values into `out`, which must hold `capacity`. */
XAIB_API xaib_status xaib_image_data(const xaib_image* image, double* out, size_t capacity);
XAIB_API void xaib_image_free(xaib_image* image);

/* ---- masks */
XAIB_API xaib_status xaib_mask_create(int height, int width, const uint8_t* data,
                                      xaib_mask** out);
XAIB_API xaib_status xaib_mask_load_png(const char* path, xaib_mask** out);
XAIB_API size_t xaib_mask_count(const xaib_mask* mask);
XAIB_API xaib_status xaib_mask_data(const xaib_mask* mask, uint8_t* out, size_t capacity);
XAIB_API void xaib_mask_free(xaib_mask* mask);

XAIB_API xaib_status xaib_directed_hausdorff(const xaib_mask* a, const xaib_mask* b,
                                             double* distance);
XAIB_API xaib_status xaib_iou(const xaib_mask* a, const xaib_mask* b, double* iou);

/* ---- heatmaps */
XAIB_API int xaib_heatmap_height(const xaib_heatmap* heatmap);
XAIB_API int xaib_heatmap_width(const xaib_heatmap* heatmap);
XAIB_API xaib_status xaib_heatmap_data(const xaib_heatmap* heatmap, double* out,
                                       size_t capacity);
/* strategy: "fraction_of_max" (uses tau) or "otsu". */
XAIB_API xaib_status xaib_heatmap_to_mask(const xaib_heatmap* heatmap, const char* strategy,
                                          double tau, xaib_mask** out);
XAIB_API void xaib_heatmap_free(xaib_heatmap* heatmap);

/* ---- preprocessing with default settings */
XAIB_API xaib_status xaib_preprocess(const xaib_image* image, xaib_image** out);

/* ---- models */
XAIB_API xaib_status xaib_model_load(const char* path, xaib_model** out);
XAIB_API xaib_status xaib_model_save(const xaib_model* model, const char* path);
XAIB_API int xaib_model_input_size(const xaib_model* model);
/* probs[0] = benign, probs[1] = malignant. */
XAIB_API xaib_status xaib_model_predict(const xaib_model* model, const xaib_image* image,
                                        double probs[2]);
XAIB_API void xaib_model_free(xaib_model* model);

/* ---- explanations */
XAIB_API xaib_status xaib_gradcam(const xaib_model* model, const xaib_image* image,
                                  xaib_label target, xaib_heatmap** out);
XAIB_API xaib_status xaib_lime(const xaib_model* model, const xaib_image* image,
                               xaib_label target, int segments, int num_samples, int k,
                               uint64_t seed, xaib_attribution** out);
/* Exact when segments <= 12, otherwise permutation sampling. */
XAIB_API xaib_status xaib_shap(const xaib_model* model, const xaib_image* image,
                               xaib_label target, int segments, int permutations,
                               uint64_t seed, xaib_attribution** out);

/* Value of a coalition z (d entries, 0 or 1). */
typedef double (*xaib_coalition_fn)(const uint8_t* z, size_t d, void* user);

/* Exact Shapley values of an arbitrary coalition game over the players set
 * in `active` (d <= 12). */
XAIB_API xaib_status xaib_shap_exact_fn(xaib_coalition_fn fn, void* user,
                                        const uint8_t* active, size_t d,
                                        xaib_attribution** out);

XAIB_API size_t xaib_attribution_size(const xaib_attribution* a);
XAIB_API double xaib_attribution_base_value(const xaib_attribution* a);
XAIB_API xaib_status xaib_attribution_values(const xaib_attribution* a, double* out,
                                             size_t capacity);
/* LIME's selected segments; *count receives how many there are. */
XAIB_API xaib_status xaib_attribution_selected(const xaib_attribution* a, int* out,
                                               size_t capacity, size_t* count);
/* Pixel mask under "selected", "positive" or "top_k" (uses k); only valid
 * for attributions computed on an image. */
XAIB_API xaib_status xaib_attribution_mask(const xaib_attribution* a, const char* rule, int k,
                                           xaib_mask** out);
XAIB_API void xaib_attribution_free(xaib_attribution* a);

#ifdef __cplusplus
}
#endif

#endif /* XAIB_XAIB_H_ */
