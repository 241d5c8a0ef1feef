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

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "xaib/core.hpp"
#include "xaib/explain.hpp"

namespace xaib::maskeval {

enum class Threshold { kFractionOfMax, kOtsu };

struct MaskStrategy {
  Threshold kind = Threshold::kFractionOfMax;
  double tau = 0.5;
};
std::string_view ThresholdName(Threshold kind);
// "fraction_of_max" or "otsu"; throws kConfig.
Threshold ParseThreshold(std::string_view text);

// Otsu's threshold on a 256-bin histogram of [0,1] values: the returned bin
// index t splits classes [0, t] and (t, 255].
int OtsuBin(std::span<const double> values);

// fraction_of_max: value >= tau * max. otsu: bin above the Otsu split.
// An all-zero heatmap always gives an empty mask.
BinaryMask HeatmapToMask(const Heatmap& heatmap, const MaskStrategy& strategy);

enum class SegmentRule { kSelected, kPositive, kTopK };

struct AttributionMaskRule {
  SegmentRule rule = SegmentRule::kSelected;
  int k = 5;  // top_k only
};

// Throws kRuleMismatch for `selected` on a Shapley attribution and
// kLengthMismatch when the attribution does not fit the segmentation.
BinaryMask AttributionToMask(const explain::Attribution& attribution,
                             const Segmentation& segmentation,
                             const AttributionMaskRule& rule);

// Pixelwise union. Throws kEmptyList / kShapeMismatch.
BinaryMask MergeRois(const std::vector<BinaryMask>& masks);

// max over true pixels of A of the distance to the nearest true pixel of B,
// exact. Throws kEmptyMask naming the empty operand, kShapeMismatch.
double DirectedHausdorff(const BinaryMask& a, const BinaryMask& b);
// max of both directions.
double SymmetricHausdorff(const BinaryMask& a, const BinaryMask& b);

// |A and B| / |A or B|; two empty masks count as identical (1).
double Iou(const BinaryMask& a, const BinaryMask& b);

struct HausdorffEntry {
  std::string id;
  double distance = 0.0;   // explanation -> ROI
  double reverse = 0.0;    // ROI -> explanation
  double symmetric = 0.0;
  bool skipped = false;
  std::string reason;
};

struct HausdorffReport {
  std::string method;
  std::vector<HausdorffEntry> per_sample;
  int scored = 0;
  // Over scored samples only; zero when nothing was scored.
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct ExplainedMask {
  std::string id;
  BinaryMask mask;
};

// Scores every explanation mask against the ROI with the same id. Empty
// explanation masks are recorded as skipped. Throws kNoRois when `rois` is
// empty or a sample has no ROI.
HausdorffReport BuildHausdorffReport(std::string method,
                                     const std::vector<ExplainedMask>& masks,
                                     const std::map<std::string, BinaryMask>& rois);

// Header `id,method,distance,skipped,reason`; skipped rows leave distance
// empty.
std::string HausdorffCsv(const std::vector<HausdorffReport>& reports);

struct StabilityReport {
  int runs = 0;
  std::vector<std::uint64_t> seeds;
  // Symmetric; unit diagonal.
  std::vector<std::vector<double>> pairwise_iou;
  // Symmetric Hausdorff, zero diagonal; infinity when exactly one mask of a
  // pair is empty.
  std::vector<std::vector<double>> pairwise_hausdorff;
  bool deterministic = true;
  int distinct_masks = 0;
  double mean_pairwise_iou = 1.0;
};

using SeededMaskFn = std::function<BinaryMask(std::uint64_t seed)>;

// Runs the explainer once per seed. Throws kInvalidArgument for fewer than
// two runs.
StabilityReport StabilityEval(const SeededMaskFn& explainer,
                              std::span<const std::uint64_t> seeds);

struct ConsistencyEntry {
  std::string first;
  std::string second;
  double iou = 0.0;
  // Symmetric Hausdorff; infinity when exactly one mask is empty.
  double hausdorff = 0.0;
};

struct ImagePair {
  std::string first_id;
  GrayImage first;
  std::string second_id;
  GrayImage second;
};

using ImageMaskFn = std::function<BinaryMask(const GrayImage&)>;

// Throws kShapeMismatch when a pair's images differ in size.
std::vector<ConsistencyEntry> ConsistencyEval(const std::vector<ImagePair>& pairs,
                                              const ImageMaskFn& explainer);

}  // namespace xaib::maskeval
