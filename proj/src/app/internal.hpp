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

#pragma once

// Helpers shared by the run-all driver and the individual subcommands.

#include <filesystem>
#include <optional>
#include <string>

#include "xaib/app.hpp"
#include "xaib/model.hpp"

namespace xaib::app::detail {

struct Explanation {
  explain::Method method = explain::Method::kLime;
  bool is_gradcam = false;
  Label target = Label::kBenign;
  Heatmap heatmap;
  BinaryMask mask;
  std::optional<Segmentation> segmentation{};
  std::optional<explain::Attribution> attribution{};
  // LIME only.
  double lime_lambda = 0.0;

  std::string MethodLabel() const;
};

Explanation ExplainGradCam(const model::MicroCnn& model, const GrayImage& image,
                           Label target, const MaskSettings& masks);
Explanation ExplainGradCamBundle(const model::ActivationBundle& bundle, Shape output,
                                 const MaskSettings& masks);
Explanation ExplainLime(const model::MicroCnn& model, const GrayImage& image, Label target,
                        const RunConfig& config, std::uint64_t seed, int jobs);
// Exact when `segments` <= 12, otherwise permutation sampling.
Explanation ExplainShap(const model::MicroCnn& model, const GrayImage& image, Label target,
                        const RunConfig& config, int segments, std::uint64_t seed, int jobs);

// <dir>/<id>.heatmap.png, <id>.overlay.png, <id>.mask.png and, for the
// attribution methods, <id>.attribution.json.
void SaveExplanation(const Explanation& e, const GrayImage& image, const std::string& id,
                     const std::filesystem::path& dir);

Json AttributionJson(const explain::Attribution& a);
Json HausdorffJson(const maskeval::HausdorffReport& r);
Json StabilityJson(const maskeval::StabilityReport& r);
Json ConsistencyJson(const std::vector<maskeval::ConsistencyEntry>& entries);
// JSON has no infinity; non-finite values become null.
Json Number(double v);

// Shifts content right by `dx` columns, filling with zero.
GrayImage ShiftRight(const GrayImage& image, int dx);

std::uint64_t StageSeed(std::uint64_t master, std::string_view stage);

// Model input preparation for the explain subcommand: images of another
// size are resized to the model input.
GrayImage FitToModel(const GrayImage& image, const model::MicroCnn& model);

}  // namespace xaib::app::detail
