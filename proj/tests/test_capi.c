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

/* Exercises the shared library through its C header only. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "xaib/xaib.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

/* v(S) = 1 when players 0, 1 and 2 are all present. */
static double and_game(const uint8_t* z, size_t d, void* user) {
  (void)d;
  ++*(int*)user;
  return z[0] && z[1] && z[2] ? 1.0 : 0.0;
}

static void test_shapley(void) {
  const uint8_t active[4] = {1, 1, 1, 0};
  int calls = 0;
  xaib_attribution* a = NULL;
  EXPECT(xaib_shap_exact_fn(and_game, &calls, active, 4, &a) == XAIB_OK);
  EXPECT(calls == 8);
  EXPECT(xaib_attribution_size(a) == 4);
  double phi[4];
  EXPECT(xaib_attribution_values(a, phi, 4) == XAIB_OK);
  for (int i = 0; i < 3; ++i) EXPECT(fabs(phi[i] - 1.0 / 3.0) < 1e-15);
  EXPECT(phi[3] == 0.0);
  EXPECT(xaib_attribution_base_value(a) == 0.0);
  xaib_mask* m = NULL;
  EXPECT(xaib_attribution_mask(a, "positive", 0, &m) != XAIB_OK);
  xaib_attribution_free(a);

  uint8_t many[13];
  memset(many, 1, sizeof many);
  EXPECT(xaib_shap_exact_fn(and_game, &calls, many, 13, &a) == XAIB_ERR_TOO_MANY_SEGMENTS);
  EXPECT(strlen(xaib_last_error()) > 0);
}

static void test_masks(void) {
  uint8_t a_bits[400] = {0}, b_bits[400] = {0};
  a_bits[0] = 1;
  a_bits[10] = 1;
  b_bits[0] = 1;
  xaib_mask *a = NULL, *b = NULL, *empty = NULL;
  EXPECT(xaib_mask_create(20, 20, a_bits, &a) == XAIB_OK);
  EXPECT(xaib_mask_create(20, 20, b_bits, &b) == XAIB_OK);
  double d = -1.0;
  EXPECT(xaib_directed_hausdorff(a, b, &d) == XAIB_OK && d == 10.0);
  EXPECT(xaib_directed_hausdorff(b, a, &d) == XAIB_OK && d == 0.0);
  double iou = 0.0;
  EXPECT(xaib_iou(a, b, &iou) == XAIB_OK && fabs(iou - 0.5) < 1e-15);
  uint8_t zero[400] = {0};
  EXPECT(xaib_mask_create(20, 20, zero, &empty) == XAIB_OK);
  EXPECT(xaib_directed_hausdorff(empty, b, &d) == XAIB_ERR_EMPTY_MASK);
  EXPECT(xaib_mask_count(a) == 2);
  EXPECT(xaib_mask_create(0, 20, zero, &empty) != XAIB_OK);
  xaib_mask_free(a);
  xaib_mask_free(b);
  xaib_mask_free(empty);
}

static void test_images(void) {
  double px[16];
  for (int i = 0; i < 16; ++i) px[i] = i / 15.0;
  xaib_image* img = NULL;
  EXPECT(xaib_image_create(4, 4, px, &img) == XAIB_OK);
  EXPECT(xaib_image_height(img) == 4 && xaib_image_width(img) == 4);
  double back[16];
  EXPECT(xaib_image_data(img, back, 16) == XAIB_OK && back[15] == 1.0);
  EXPECT(xaib_image_data(img, back, 3) != XAIB_OK);
  xaib_image_free(img);
  px[0] = 2.0;
  EXPECT(xaib_image_create(4, 4, px, &img) == XAIB_ERR_OUT_OF_RANGE);
  EXPECT(xaib_image_load_png("/nonexistent/x.png", &img) == XAIB_ERR_MISSING_FILE);
}

static void test_commands(void) {
  char* result = NULL;
  EXPECT(xaib_cmd_run("nope", "{}", &result) == XAIB_ERR_INVALID_ARGUMENT);
  EXPECT(xaib_cmd_run("synth", "not json", &result) == XAIB_ERR_CONFIG);
  EXPECT(xaib_report_validate("{}", &result) == XAIB_OK);
  EXPECT(result != NULL && strcmp(result, "[]") != 0);
  xaib_string_free(result);
  EXPECT(strcmp(xaib_status_name(XAIB_OK), "ok") == 0);
  EXPECT(strlen(xaib_version()) > 0);
}

int main(void) {
  test_shapley();
  test_masks();
  test_images();
  test_commands();
  if (failures) {
    fprintf(stderr, "%d failure(s)\n", failures);
    return 1;
  }
  puts("capi: all checks passed");
  return 0;
}
