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

#include "xaib/xaib.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "xaib/app.hpp"
#include "xaib/explain.hpp"
#include "xaib/image_io.hpp"
#include "xaib/maskeval.hpp"
#include "xaib/model.hpp"
#include "xaib/preprocess.hpp"

struct xaib_image {
  xaib::GrayImage value;
};
struct xaib_mask {
  xaib::BinaryMask value;
};
struct xaib_heatmap {
  xaib::Heatmap value;
};
struct xaib_model {
  xaib::model::MicroCnn value;
};
struct xaib_attribution {
  xaib::explain::Attribution value;
  std::optional<xaib::Segmentation> segmentation;
};

static_assert(static_cast<int>(xaib::ErrorCode::kInvalidArgument) == XAIB_ERR_INVALID_ARGUMENT);
static_assert(static_cast<int>(xaib::ErrorCode::kDegenerateSamples) == XAIB_ERR_DEGENERATE_SAMPLES);
static_assert(static_cast<int>(xaib::ErrorCode::kInternal) == XAIB_ERR_INTERNAL);

namespace {

thread_local std::string g_last_error;

xaib_status Record(xaib_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `body`, translating exceptions into a status.
template <typename F>
xaib_status Guard(F&& body) {
  try {
    body();
    return XAIB_OK;
  } catch (const xaib::Error& e) {
    return Record(static_cast<xaib_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Record(XAIB_ERR_INTERNAL, "out of memory");
  } catch (const nlohmann::json::exception& e) {
    return Record(XAIB_ERR_CONFIG, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return Record(XAIB_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return Record(XAIB_ERR_INTERNAL, e.what());
  } catch (...) {
    return Record(XAIB_ERR_INTERNAL, "unknown failure");
  }
}

void Require(bool ok, const char* what) {
  if (!ok) xaib::Fail(xaib::ErrorCode::kInvalidArgument, what);
}

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename T, typename U>
void CopyOut(std::span<const T> from, U* out, std::size_t capacity) {
  Require(out != nullptr, "output buffer is NULL");
  if (capacity < from.size()) {
    xaib::Fail(xaib::ErrorCode::kLengthMismatch,
               "output buffer holds " + std::to_string(capacity) + " values, need " +
                   std::to_string(from.size()));
  }
  for (std::size_t i = 0; i < from.size(); ++i) out[i] = static_cast<U>(from[i]);
}

xaib::Label ToLabel(xaib_label label) {
  if (label != XAIB_BENIGN && label != XAIB_MALIGNANT) {
    xaib::Fail(xaib::ErrorCode::kBadLabel, "label must be XAIB_BENIGN or XAIB_MALIGNANT");
  }
  return static_cast<xaib::Label>(label);
}

xaib::Segmentation SegmentFor(const xaib::GrayImage& image, int segments) {
  xaib::explain::SlicConfig sc;
  sc.num_segments = segments;
  return xaib::explain::Segment(image, sc);
}

}  // namespace

extern "C" {

const char* xaib_version(void) { return xaib::app::kVersion.data(); }

const char* xaib_status_name(xaib_status status) {
  if (status == XAIB_OK) return "ok";
  if (status < XAIB_ERR_INVALID_ARGUMENT || status > XAIB_ERR_INTERNAL) return "unknown";
  return xaib::ErrorCodeName(static_cast<xaib::ErrorCode>(status)).data();
}

const char* xaib_last_error(void) { return g_last_error.c_str(); }

void xaib_string_free(char* s) { std::free(s); }

xaib_status xaib_cmd_run(const char* command, const char* options_json, char** result_json) {
  return Guard([&] {
    Require(command && result_json, "command and result_json must not be NULL");
    *result_json = nullptr;
    nlohmann::json options = nlohmann::json::object();
    if (options_json && *options_json) {
      try {
        options = nlohmann::json::parse(options_json);
      } catch (const nlohmann::json::exception& e) {
        xaib::Fail(xaib::ErrorCode::kConfig, std::string("options: ") + e.what());
      }
    }
    *result_json = Dup(xaib::app::RunCommand(command, options).dump());
  });
}

xaib_status xaib_report_validate(const char* report_json, char** errors_json) {
  return Guard([&] {
    Require(report_json && errors_json, "arguments must not be NULL");
    *errors_json = nullptr;
    nlohmann::json report;
    try {
      report = nlohmann::json::parse(report_json);
    } catch (const nlohmann::json::exception& e) {
      xaib::Fail(xaib::ErrorCode::kConfig, std::string("report: ") + e.what());
    }
    *errors_json = Dup(nlohmann::json(xaib::app::ValidateReport(report)).dump());
  });
}

xaib_status xaib_image_create(int height, int width, const double* data, xaib_image** out) {
  return Guard([&] {
    Require(data && out, "data and out must not be NULL");
    Require(height > 0 && width > 0, "dimensions must be positive");
    const std::size_t n = static_cast<std::size_t>(height) * width;
    *out = new xaib_image{xaib::GrayImage(height, width, std::vector<double>(data, data + n))};
  });
}

xaib_status xaib_image_load_png(const char* path, xaib_image** out) {
  return Guard([&] {
    Require(path && out, "path and out must not be NULL");
    *out = new xaib_image{xaib::io::LoadGrayPng(path)};
  });
}

xaib_status xaib_image_save_png(const xaib_image* image, const char* path) {
  return Guard([&] {
    Require(image && path, "image and path must not be NULL");
    xaib::io::SaveGrayPng(image->value, path);
  });
}

int xaib_image_height(const xaib_image* image) { return image ? image->value.height() : 0; }
int xaib_image_width(const xaib_image* image) { return image ? image->value.width() : 0; }

xaib_status xaib_image_data(const xaib_image* image, double* out, size_t capacity) {
  return Guard([&] {
    Require(image != nullptr, "image is NULL");
    CopyOut(image->value.data(), out, capacity);
  });
}

void xaib_image_free(xaib_image* image) { delete image; }

xaib_status xaib_mask_create(int height, int width, const uint8_t* data, xaib_mask** out) {
  return Guard([&] {
    Require(data && out, "data and out must not be NULL");
    Require(height > 0 && width > 0, "dimensions must be positive");
    const std::size_t n = static_cast<std::size_t>(height) * width;
    std::vector<std::uint8_t> bits(n);
    for (std::size_t i = 0; i < n; ++i) bits[i] = data[i] ? 1 : 0;
    *out = new xaib_mask{xaib::BinaryMask(height, width, std::move(bits))};
  });
}

xaib_status xaib_mask_load_png(const char* path, xaib_mask** out) {
  return Guard([&] {
    Require(path && out, "path and out must not be NULL");
    *out = new xaib_mask{xaib::io::LoadMaskPng(path)};
  });
}

size_t xaib_mask_count(const xaib_mask* mask) { return mask ? mask->value.Count() : 0; }

xaib_status xaib_mask_data(const xaib_mask* mask, uint8_t* out, size_t capacity) {
  return Guard([&] {
    Require(mask != nullptr, "mask is NULL");
    CopyOut(mask->value.data(), out, capacity);
  });
}

void xaib_mask_free(xaib_mask* mask) { delete mask; }

xaib_status xaib_directed_hausdorff(const xaib_mask* a, const xaib_mask* b, double* distance) {
  return Guard([&] {
    Require(a && b && distance, "arguments must not be NULL");
    *distance = xaib::maskeval::DirectedHausdorff(a->value, b->value);
  });
}

xaib_status xaib_iou(const xaib_mask* a, const xaib_mask* b, double* iou) {
  return Guard([&] {
    Require(a && b && iou, "arguments must not be NULL");
    *iou = xaib::maskeval::Iou(a->value, b->value);
  });
}

int xaib_heatmap_height(const xaib_heatmap* h) { return h ? h->value.height() : 0; }
int xaib_heatmap_width(const xaib_heatmap* h) { return h ? h->value.width() : 0; }

xaib_status xaib_heatmap_data(const xaib_heatmap* h, double* out, size_t capacity) {
  return Guard([&] {
    Require(h != nullptr, "heatmap is NULL");
    CopyOut(h->value.data(), out, capacity);
  });
}

xaib_status xaib_heatmap_to_mask(const xaib_heatmap* h, const char* strategy, double tau,
                                 xaib_mask** out) {
  return Guard([&] {
    Require(h && strategy && out, "arguments must not be NULL");
    const xaib::maskeval::MaskStrategy s{xaib::maskeval::ParseThreshold(strategy), tau};
    *out = new xaib_mask{xaib::maskeval::HeatmapToMask(h->value, s)};
  });
}

void xaib_heatmap_free(xaib_heatmap* h) { delete h; }

xaib_status xaib_preprocess(const xaib_image* image, xaib_image** out) {
  return Guard([&] {
    Require(image && out, "image and out must not be NULL");
    *out = new xaib_image{xaib::preprocess::PreprocessImage(image->value, {})};
  });
}

xaib_status xaib_model_load(const char* path, xaib_model** out) {
  return Guard([&] {
    Require(path && out, "path and out must not be NULL");
    *out = new xaib_model{xaib::model::LoadModel(path)};
  });
}

xaib_status xaib_model_save(const xaib_model* model, const char* path) {
  return Guard([&] {
    Require(model && path, "model and path must not be NULL");
    xaib::model::SaveModel(model->value, path);
  });
}

int xaib_model_input_size(const xaib_model* model) {
  return model ? model->value.config().input_size : 0;
}

xaib_status xaib_model_predict(const xaib_model* model, const xaib_image* image,
                               double probs[2]) {
  return Guard([&] {
    Require(model && image && probs, "arguments must not be NULL");
    const auto p = model->value.PredictProba(image->value);
    probs[0] = p[0];
    probs[1] = p[1];
  });
}

void xaib_model_free(xaib_model* model) { delete model; }

xaib_status xaib_gradcam(const xaib_model* model, const xaib_image* image, xaib_label target,
                         xaib_heatmap** out) {
  return Guard([&] {
    Require(model && image && out, "arguments must not be NULL");
    const auto bundle = model->value.Bundle(image->value, ToLabel(target));
    *out = new xaib_heatmap{xaib::explain::GradCam(bundle, image->value.shape())};
  });
}

xaib_status xaib_lime(const xaib_model* model, const xaib_image* image, xaib_label target,
                      int segments, int num_samples, int k, uint64_t seed,
                      xaib_attribution** out) {
  return Guard([&] {
    Require(model && image && out, "arguments must not be NULL");
    xaib::Segmentation seg = SegmentFor(image->value, segments);
    xaib::explain::LimeConfig cfg;
    cfg.num_samples = num_samples;
    cfg.k = k;
    cfg.seed = seed;
    auto r = xaib::explain::LimeExplain(model->value, image->value, seg, ToLabel(target), cfg);
    *out = new xaib_attribution{std::move(r.attribution), std::move(seg)};
  });
}

xaib_status xaib_shap(const xaib_model* model, const xaib_image* image, xaib_label target,
                      int segments, int permutations, uint64_t seed, xaib_attribution** out) {
  return Guard([&] {
    Require(model && image && out, "arguments must not be NULL");
    xaib::Segmentation seg = SegmentFor(image->value, segments);
    const auto inst = xaib::explain::InterpretableInstance::Make(image->value, seg);
    auto a = inst.size() <= xaib::explain::kMaxExactSegments
                 ? xaib::explain::ShapExact(model->value, inst, ToLabel(target))
                 : xaib::explain::ShapSampled(model->value, inst, ToLabel(target), permutations, seed);
    *out = new xaib_attribution{std::move(a), std::move(seg)};
  });
}

xaib_status xaib_shap_exact_fn(xaib_coalition_fn fn, void* user, const uint8_t* active,
                               size_t d, xaib_attribution** out) {
  return Guard([&] {
    Require(fn && active && out, "arguments must not be NULL");
    const xaib::explain::CoalitionFn game = [&](std::span<const std::uint8_t> z) {
      return fn(z.data(), z.size(), user);
    };
    auto a = xaib::explain::ShapExactValues(game, std::span<const std::uint8_t>(active, d));
    *out = new xaib_attribution{std::move(a), std::nullopt};
  });
}

size_t xaib_attribution_size(const xaib_attribution* a) { return a ? a->value.values.size() : 0; }

double xaib_attribution_base_value(const xaib_attribution* a) {
  return a ? a->value.base_value : 0.0;
}

xaib_status xaib_attribution_values(const xaib_attribution* a, double* out, size_t capacity) {
  return Guard([&] {
    Require(a != nullptr, "attribution is NULL");
    CopyOut(std::span<const double>(a->value.values), out, capacity);
  });
}

xaib_status xaib_attribution_selected(const xaib_attribution* a, int* out, size_t capacity,
                                      size_t* count) {
  return Guard([&] {
    Require(a && count, "attribution and count must not be NULL");
    *count = a->value.selected.size();
    if (*count > 0) CopyOut(std::span<const int>(a->value.selected), out, capacity);
  });
}

xaib_status xaib_attribution_mask(const xaib_attribution* a, const char* rule, int k,
                                  xaib_mask** out) {
  return Guard([&] {
    Require(a && rule && out, "arguments must not be NULL");
    if (!a->segmentation) {
      xaib::Fail(xaib::ErrorCode::kInvalidArgument, "attribution was not computed on an image");
    }
    xaib::maskeval::AttributionMaskRule r;
    const std::string name(rule);
    if (name == "selected") {
      r.rule = xaib::maskeval::SegmentRule::kSelected;
    } else if (name == "positive") {
      r.rule = xaib::maskeval::SegmentRule::kPositive;
    } else if (name == "top_k") {
      r.rule = xaib::maskeval::SegmentRule::kTopK;
    } else {
      xaib::Fail(xaib::ErrorCode::kConfig, "unknown mask rule '" + name + "'");
    }
    r.k = k;
    *out = new xaib_mask{xaib::maskeval::AttributionToMask(a->value, *a->segmentation, r)};
  });
}

void xaib_attribution_free(xaib_attribution* a) { delete a; }

}  // extern "C"
