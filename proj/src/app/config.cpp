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

#include <cstdlib>
#include <set>

#include "xaib/app.hpp"
#include "xaib/image_io.hpp"

namespace xaib::app {

namespace {

// Reads known keys from one JSON object and rejects everything else.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) Fail(ErrorCode::kConfig, Where("") + " must be an object");
  }

  template <typename T>
  void Get(const std::string& key, T& out) {
    const Json* v = Take(key);
    if (!v) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v->is_boolean()) throw std::invalid_argument("expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v->is_number_integer()) throw std::invalid_argument("expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (!v->is_number_unsigned() && v->get<std::int64_t>() < 0) throw std::invalid_argument("expected a nonnegative integer");
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v->is_number()) throw std::invalid_argument("expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v->is_string()) throw std::invalid_argument("expected a string");
      }
      out = v->get<T>();
    } catch (const std::exception& e) {
      Fail(ErrorCode::kConfig, Where(key) + ": " + e.what());
    }
  }

  void GetDoubles(const std::string& key, std::vector<double>& out) {
    const Json* v = Take(key);
    if (!v) return;
    if (!v->is_array()) Fail(ErrorCode::kConfig, Where(key) + ": expected an array of numbers");
    out.clear();
    for (const auto& e : *v) {
      if (!e.is_number()) Fail(ErrorCode::kConfig, Where(key) + ": expected an array of numbers");
      out.push_back(e.get<double>());
    }
  }

  const Json* Child(const std::string& key) { return Take(key); }
  std::string ChildPath(const std::string& key) const { return Where(key); }

  void Finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) Fail(ErrorCode::kConfig, "unknown config key '" + Where(key) + "'");
    }
  }

 private:
  const Json* Take(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  std::string Where(const std::string& key) const {
    if (path_.empty()) return key.empty() ? "config" : key;
    return key.empty() ? path_ : path_ + "." + key;
  }

  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

maskeval::SegmentRule ParseRule(const std::string& text, const std::string& where) {
  if (text == "selected") return maskeval::SegmentRule::kSelected;
  if (text == "positive") return maskeval::SegmentRule::kPositive;
  if (text == "top_k") return maskeval::SegmentRule::kTopK;
  Fail(ErrorCode::kConfig, where + ": unknown rule '" + text + "'");
}

std::string RuleName(maskeval::SegmentRule rule) {
  switch (rule) {
    case maskeval::SegmentRule::kSelected:
      return "selected";
    case maskeval::SegmentRule::kPositive:
      return "positive";
    case maskeval::SegmentRule::kTopK:
      return "top_k";
  }
  return "selected";
}

void ReadRule(ObjectReader& parent, const std::string& key,
              maskeval::AttributionMaskRule& rule) {
  const Json* j = parent.Child(key);
  if (!j) return;
  ObjectReader r(*j, parent.ChildPath(key));
  std::string name = RuleName(rule.rule);
  r.Get("rule", name);
  rule.rule = ParseRule(name, parent.ChildPath(key) + ".rule");
  r.Get("k", rule.k);
  r.Finish();
}

}  // namespace

void RunConfig::Validate() const {
  preprocess.Validate();
  if (preprocess.target_height != preprocess.target_width) {
    Fail(ErrorCode::kConfig, "preprocess target size must be square for the classifier");
  }
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) Fail(ErrorCode::kConfig, "split.ratio must lie in (0,1)");
  if (train.epochs < 0) Fail(ErrorCode::kConfig, "train.epochs must be >= 0");
  if (!(train.learning_rate >= 0.0)) Fail(ErrorCode::kConfig, "train.learning_rate must be >= 0");
  if (!(compactness > 0.0)) Fail(ErrorCode::kConfig, "segmentation.compactness must be > 0");
  if (lime.segments < 2) Fail(ErrorCode::kConfig, "lime.segments must be >= 2");
  if (lime.config.num_samples < 2 || lime.config.k < 1 || !(lime.config.kernel_width > 0.0)) {
    Fail(ErrorCode::kConfig, "lime: num_samples >= 2, k >= 1 and kernel_width > 0 required");
  }
  if (shap.segments < 2) Fail(ErrorCode::kConfig, "shap.segments must be >= 2");
  if (shap.permutations < 1) Fail(ErrorCode::kConfig, "shap.permutations must be >= 1");
  if (!(mask.heatmap.tau >= 0.0 && mask.heatmap.tau <= 1.0)) Fail(ErrorCode::kConfig, "mask.tau must lie in [0,1]");
  if (mask.lime.k < 0 || mask.shap.k < 0) Fail(ErrorCode::kConfig, "mask rule k must be >= 0");
  if (mask.shap.rule == maskeval::SegmentRule::kSelected) {
    Fail(ErrorCode::kConfig, "mask.shap.rule cannot be 'selected' (LIME only)");
  }
  if (evaluation.stability_runs < 2) Fail(ErrorCode::kConfig, "evaluation.stability_runs must be >= 2");
  if (evaluation.stability_shap_segments < 2 ||
      evaluation.stability_shap_segments > explain::kMaxExactSegments) {
    Fail(ErrorCode::kConfig, "evaluation.stability_shap_segments must lie in [2,12]");
  }
  if (evaluation.max_explained < 0) Fail(ErrorCode::kConfig, "evaluation.max_explained must be >= 0");
  if (jobs < 0) Fail(ErrorCode::kConfig, "jobs must be >= 0");
}

RunConfig RunConfigFromJson(const Json& j) {
  RunConfig c;
  ObjectReader root(j, "");
  root.Get("master_seed", c.master_seed);
  root.Get("jobs", c.jobs);
  if (const Json* p = root.Child("preprocess")) {
    ObjectReader r(*p, "preprocess");
    auto& pc = c.preprocess;
    r.Get("binarize_threshold", pc.binarize_threshold);
    r.Get("opening_radius", pc.opening_radius);
    r.Get("gamma", pc.gamma);
    r.Get("clahe_clip_limit", pc.clahe_clip_limit);
    r.Get("clahe_tile_rows", pc.clahe_tile_rows);
    r.Get("clahe_tile_cols", pc.clahe_tile_cols);
    r.GetDoubles("gabor_orientations_deg", pc.gabor_orientations_deg);
    r.Get("gabor_wavelength", pc.gabor_wavelength);
    r.Get("border_band", pc.border_band);
    r.Get("target_height", pc.target_height);
    r.Get("target_width", pc.target_width);
    r.Finish();
  }
  if (const Json* p = root.Child("split")) {
    ObjectReader r(*p, "split");
    r.Get("ratio", c.split_ratio);
    r.Finish();
  }
  if (const Json* p = root.Child("train")) {
    ObjectReader r(*p, "train");
    r.Get("epochs", c.train.epochs);
    r.Get("learning_rate", c.train.learning_rate);
    r.Get("calibrate", c.train.calibrate);
    r.Finish();
  }
  if (const Json* p = root.Child("segmentation")) {
    ObjectReader r(*p, "segmentation");
    r.Get("compactness", c.compactness);
    r.Finish();
  }
  if (const Json* p = root.Child("lime")) {
    ObjectReader r(*p, "lime");
    r.Get("segments", c.lime.segments);
    r.Get("num_samples", c.lime.config.num_samples);
    r.Get("k", c.lime.config.k);
    r.Get("kernel_width", c.lime.config.kernel_width);
    r.GetDoubles("lasso_lambda_grid", c.lime.config.lasso_lambda_grid);
    r.Finish();
  }
  if (const Json* p = root.Child("shap")) {
    ObjectReader r(*p, "shap");
    r.Get("segments", c.shap.segments);
    r.Get("permutations", c.shap.permutations);
    r.Finish();
  }
  if (const Json* p = root.Child("mask")) {
    ObjectReader r(*p, "mask");
    std::string strategy(maskeval::ThresholdName(c.mask.heatmap.kind));
    r.Get("strategy", strategy);
    c.mask.heatmap.kind = maskeval::ParseThreshold(strategy);
    r.Get("tau", c.mask.heatmap.tau);
    ReadRule(r, "lime", c.mask.lime);
    ReadRule(r, "shap", c.mask.shap);
    r.Finish();
  }
  if (const Json* p = root.Child("evaluation")) {
    ObjectReader r(*p, "evaluation");
    r.Get("stability_runs", c.evaluation.stability_runs);
    r.Get("stability_shap_segments", c.evaluation.stability_shap_segments);
    r.Get("max_explained", c.evaluation.max_explained);
    r.Get("consistency", c.evaluation.consistency);
    r.Finish();
  }
  if (const Json* p = root.Child("paths")) {
    ObjectReader r(*p, "paths");
    r.Get("manifest", c.paths.manifest);
    r.Get("out_dir", c.paths.out_dir);
    r.Finish();
  }
  root.Finish();
  c.Validate();
  return c;
}

Json RunConfigToJson(const RunConfig& c) {
  const auto& pc = c.preprocess;
  return Json{
      {"master_seed", c.master_seed},
      {"jobs", c.jobs},
      {"preprocess",
       {{"binarize_threshold", pc.binarize_threshold},
        {"opening_radius", pc.opening_radius},
        {"gamma", pc.gamma},
        {"clahe_clip_limit", pc.clahe_clip_limit},
        {"clahe_tile_rows", pc.clahe_tile_rows},
        {"clahe_tile_cols", pc.clahe_tile_cols},
        {"gabor_orientations_deg", pc.gabor_orientations_deg},
        {"gabor_wavelength", pc.gabor_wavelength},
        {"border_band", pc.border_band},
        {"target_height", pc.target_height},
        {"target_width", pc.target_width}}},
      {"split", {{"ratio", c.split_ratio}}},
      {"train",
       {{"epochs", c.train.epochs},
        {"learning_rate", c.train.learning_rate},
        {"calibrate", c.train.calibrate}}},
      {"segmentation", {{"compactness", c.compactness}}},
      {"lime",
       {{"segments", c.lime.segments},
        {"num_samples", c.lime.config.num_samples},
        {"k", c.lime.config.k},
        {"kernel_width", c.lime.config.kernel_width},
        {"lasso_lambda_grid", c.lime.config.lasso_lambda_grid}}},
      {"shap", {{"segments", c.shap.segments}, {"permutations", c.shap.permutations}}},
      {"mask",
       {{"strategy", std::string(maskeval::ThresholdName(c.mask.heatmap.kind))},
        {"tau", c.mask.heatmap.tau},
        {"lime", {{"rule", RuleName(c.mask.lime.rule)}, {"k", c.mask.lime.k}}},
        {"shap", {{"rule", RuleName(c.mask.shap.rule)}, {"k", c.mask.shap.k}}}}},
      {"evaluation",
       {{"stability_runs", c.evaluation.stability_runs},
        {"stability_shap_segments", c.evaluation.stability_shap_segments},
        {"max_explained", c.evaluation.max_explained},
        {"consistency", c.evaluation.consistency}}},
      {"paths", {{"manifest", c.paths.manifest}, {"out_dir", c.paths.out_dir}}}};
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    Fail(ErrorCode::kMissingFile, "config file not found: " + path.string());
  }
  Json j;
  try {
    j = Json::parse(io::ReadText(path));
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kConfig, "config " + path.string() + ": " + e.what());
  }
  return RunConfigFromJson(j);
}

int ResolveJobs(int jobs) {
  if (jobs > 0) return jobs;
  if (const char* env = std::getenv("XAIB_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v <= 1024) return static_cast<int>(v);
    Fail(ErrorCode::kConfig, std::string("XAIB_JOBS must be a positive integer, got '") + env + "'");
  }
  return 1;
}

}  // namespace xaib::app
