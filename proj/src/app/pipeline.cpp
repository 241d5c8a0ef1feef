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

#include <algorithm>
#include <cmath>

#include "internal.hpp"
#include "xaib/image_io.hpp"
#include "xaib/preprocess.hpp"

namespace xaib::app::detail {

namespace {

// Positive part of the rendered segment values, scaled to unit maximum.
Heatmap SegmentHeatmap(const Segmentation& seg, const std::vector<double>& values) {
  std::vector<double> px = explain::RenderSegmentValues(seg, values);
  for (double& v : px) v = std::max(v, 0.0);
  return Heatmap::FromNonnegative(seg.height(), seg.width(), std::move(px));
}

Segmentation SegmentFor(const GrayImage& image, const RunConfig& config, int segments) {
  explain::SlicConfig sc;
  sc.num_segments = segments;
  sc.compactness = config.compactness;
  return explain::Segment(image, sc);
}

}  // namespace

std::string Explanation::MethodLabel() const {
  return is_gradcam ? "gradcam" : std::string(explain::MethodName(method));
}

Explanation ExplainGradCamBundle(const model::ActivationBundle& bundle, Shape output,
                                 const MaskSettings& masks) {
  Heatmap h = explain::GradCam(bundle, output);
  BinaryMask m = maskeval::HeatmapToMask(h, masks.heatmap);
  return Explanation{.is_gradcam = true,
                     .target = bundle.target_class,
                     .heatmap = std::move(h),
                     .mask = std::move(m)};
}

Explanation ExplainGradCam(const model::MicroCnn& model, const GrayImage& image,
                           Label target, const MaskSettings& masks) {
  return ExplainGradCamBundle(model.Bundle(image, target), image.shape(), masks);
}

Explanation ExplainLime(const model::MicroCnn& model, const GrayImage& image, Label target,
                        const RunConfig& config, std::uint64_t seed, int jobs) {
  Segmentation seg = SegmentFor(image, config, config.lime.segments);
  explain::LimeConfig lc = config.lime.config;
  lc.seed = seed;
  lc.jobs = jobs;
  explain::LimeResult r = explain::LimeExplain(model, image, seg, target, lc);
  BinaryMask m = maskeval::AttributionToMask(r.attribution, seg, config.mask.lime);
  Heatmap h = SegmentHeatmap(seg, r.attribution.values);
  return Explanation{.method = explain::Method::kLime,
                     .target = target,
                     .heatmap = std::move(h),
                     .mask = std::move(m),
                     .segmentation = std::move(seg),
                     .attribution = std::move(r.attribution),
                     .lime_lambda = r.lambda};
}

Explanation ExplainShap(const model::MicroCnn& model, const GrayImage& image, Label target,
                        const RunConfig& config, int segments, std::uint64_t seed, int jobs) {
  Segmentation seg = SegmentFor(image, config, segments);
  const auto instance = explain::InterpretableInstance::Make(image, seg);
  explain::Attribution a =
      instance.size() <= explain::kMaxExactSegments
          ? explain::ShapExact(model, instance, target, jobs)
          : explain::ShapSampled(model, instance, target, config.shap.permutations, seed, jobs);
  BinaryMask m = maskeval::AttributionToMask(a, seg, config.mask.shap);
  Heatmap h = SegmentHeatmap(seg, a.values);
  const explain::Method method = a.method;
  return Explanation{.method = method,
                     .target = target,
                     .heatmap = std::move(h),
                     .mask = std::move(m),
                     .segmentation = std::move(seg),
                     .attribution = std::move(a)};
}

void SaveExplanation(const Explanation& e, const GrayImage& image, const std::string& id,
                     const std::filesystem::path& dir) {
  io::SaveHeatmapPng(e.heatmap, dir / (id + ".heatmap.png"));
  io::SaveRgbPng(image.height(), image.width(), io::RenderOverlay(image, e.heatmap),
                 dir / (id + ".overlay.png"));
  io::SaveMaskPng(e.mask, dir / (id + ".mask.png"));
  if (e.attribution) {
    Json j = AttributionJson(*e.attribution);
    j["id"] = id;
    if (e.segmentation) j["num_segments"] = e.segmentation->num_segments();
    if (e.method == explain::Method::kLime) j["lambda"] = Number(e.lime_lambda);
    io::WriteText(dir / (id + ".attribution.json"), j.dump(2) + "\n");
  }
}

Json Number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json AttributionJson(const explain::Attribution& a) {
  Json values = Json::array();
  for (double v : a.values) values.push_back(Number(v));
  return Json{{"method", std::string(explain::MethodName(a.method))},
              {"target_class", std::string(LabelName(a.target_class))},
              {"base_value", Number(a.base_value)},
              {"values", values},
              {"selected", a.selected},
              {"seed", a.seed}};
}

Json HausdorffJson(const maskeval::HausdorffReport& r) {
  Json per = Json::array();
  for (const auto& e : r.per_sample) {
    Json row = {{"id", e.id}, {"skipped", e.skipped}};
    if (e.skipped) {
      row["reason"] = e.reason;
    } else {
      row["distance"] = Number(e.distance);
      row["reverse"] = Number(e.reverse);
      row["symmetric"] = Number(e.symmetric);
    }
    per.push_back(row);
  }
  Json j = {{"method", r.method}, {"scored", r.scored}, {"per_sample", per}};
  if (r.scored > 0) {
    j["mean"] = Number(r.mean);
    j["min"] = Number(r.min);
    j["max"] = Number(r.max);
  } else {
    j["mean"] = nullptr;
    j["min"] = nullptr;
    j["max"] = nullptr;
  }
  return j;
}

Json StabilityJson(const maskeval::StabilityReport& r) {
  auto matrix = [](const std::vector<std::vector<double>>& m) {
    Json out = Json::array();
    for (const auto& row : m) {
      Json jr = Json::array();
      for (double v : row) jr.push_back(Number(v));
      out.push_back(jr);
    }
    return out;
  };
  return Json{{"runs", r.runs},
              {"seeds", r.seeds},
              {"deterministic", r.deterministic},
              {"distinct_masks", r.distinct_masks},
              {"mean_pairwise_iou", Number(r.mean_pairwise_iou)},
              {"pairwise_iou", matrix(r.pairwise_iou)},
              {"pairwise_hausdorff", matrix(r.pairwise_hausdorff)}};
}

Json ConsistencyJson(const std::vector<maskeval::ConsistencyEntry>& entries) {
  Json pairs = Json::array();
  double sum = 0.0;
  for (const auto& e : entries) {
    pairs.push_back({{"first", e.first},
                     {"second", e.second},
                     {"iou", Number(e.iou)},
                     {"hausdorff", Number(e.hausdorff)}});
    sum += e.iou;
  }
  Json j = {{"pairs", pairs}, {"count", entries.size()}};
  j["mean_iou"] = entries.empty() ? Json(nullptr) : Number(sum / entries.size());
  return j;
}

GrayImage ShiftRight(const GrayImage& image, int dx) {
  const int h = image.height();
  const int w = image.width();
  std::vector<double> out(image.shape().size(), 0.0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int src = c - dx;
      if (src >= 0 && src < w) out[static_cast<std::size_t>(r) * w + c] = image.at(r, src);
    }
  }
  return GrayImage(h, w, std::move(out));
}

std::uint64_t StageSeed(std::uint64_t master, std::string_view stage) {
  return DeriveSeed(master, stage, 0);
}

GrayImage FitToModel(const GrayImage& image, const model::MicroCnn& model) {
  const int n = model.config().input_size;
  if (image.height() == n && image.width() == n) return image;
  return preprocess::Resize(image, {n, n});
}

}  // namespace xaib::app::detail
