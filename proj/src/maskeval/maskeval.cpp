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

#include "xaib/maskeval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "xaib/raster.hpp"

namespace xaib::maskeval {

std::string_view ThresholdName(Threshold kind) {
  return kind == Threshold::kOtsu ? "otsu" : "fraction_of_max";
}

Threshold ParseThreshold(std::string_view text) {
  if (text == "fraction_of_max") return Threshold::kFractionOfMax;
  if (text == "otsu") return Threshold::kOtsu;
  Fail(ErrorCode::kConfig, "unknown mask strategy '" + std::string(text) + "'");
}

namespace {

int Bin(double v) { return std::clamp(static_cast<int>(v * 256.0), 0, 255); }

}  // namespace

int OtsuBin(std::span<const double> values) {
  std::vector<double> hist(256, 0.0);
  for (double v : values) hist[Bin(v)] += 1.0;
  const double total = static_cast<double>(values.size());
  double sum_all = 0.0;
  for (int b = 0; b < 256; ++b) sum_all += b * hist[b];
  double w0 = 0.0, sum0 = 0.0, best = -1.0;
  int best_t = 0;
  for (int t = 0; t < 255; ++t) {
    w0 += hist[t];
    sum0 += t * hist[t];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double m0 = sum0 / w0;
    const double m1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  return best_t;
}

BinaryMask HeatmapToMask(const Heatmap& heatmap, const MaskStrategy& strategy) {
  const auto h = heatmap.data();
  std::vector<std::uint8_t> out(h.size(), 0);
  const double mx = heatmap.Max();
  if (mx > 0.0) {
    if (strategy.kind == Threshold::kFractionOfMax) {
      if (!(strategy.tau >= 0.0 && strategy.tau <= 1.0)) {
        Fail(ErrorCode::kConfig, "mask threshold tau must lie in [0,1]");
      }
      const double cut = strategy.tau * mx;
      for (std::size_t i = 0; i < h.size(); ++i) out[i] = h[i] >= cut ? 1 : 0;
    } else {
      const int t = OtsuBin(h);
      for (std::size_t i = 0; i < h.size(); ++i) out[i] = Bin(h[i]) > t ? 1 : 0;
    }
  }
  return BinaryMask(heatmap.height(), heatmap.width(), std::move(out));
}

BinaryMask AttributionToMask(const explain::Attribution& attribution,
                             const Segmentation& segmentation,
                             const AttributionMaskRule& rule) {
  const int d = segmentation.num_segments();
  if (attribution.values.size() != static_cast<std::size_t>(d)) {
    Fail(ErrorCode::kLengthMismatch,
         "attribution has " + std::to_string(attribution.values.size()) +
             " values for " + std::to_string(d) + " segments");
  }
  std::vector<std::uint8_t> keep(d, 0);
  switch (rule.rule) {
    case SegmentRule::kSelected:
      if (attribution.method != explain::Method::kLime) {
        Fail(ErrorCode::kRuleMismatch,
             "the 'selected' rule needs a LIME attribution, got " +
                 std::string(explain::MethodName(attribution.method)));
      }
      for (int s : attribution.selected) {
        if (s < 0 || s >= d) Fail(ErrorCode::kOutOfRange, "selected segment out of range");
        keep[s] = 1;
      }
      break;
    case SegmentRule::kPositive:
      for (int s = 0; s < d; ++s) keep[s] = attribution.values[s] > 0.0 ? 1 : 0;
      break;
    case SegmentRule::kTopK: {
      if (rule.k < 0) Fail(ErrorCode::kConfig, "top_k needs k >= 0");
      std::vector<int> order(d);
      for (int s = 0; s < d; ++s) order[s] = s;
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return attribution.values[a] > attribution.values[b];
      });
      for (int i = 0; i < std::min(rule.k, d); ++i) keep[order[i]] = 1;
      break;
    }
  }
  const auto labels = segmentation.labels();
  std::vector<std::uint8_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = keep[labels[i]];
  return BinaryMask(segmentation.height(), segmentation.width(), std::move(out));
}

BinaryMask MergeRois(const std::vector<BinaryMask>& masks) {
  if (masks.empty()) Fail(ErrorCode::kEmptyList, "merge_rois: no masks given");
  const Shape shape = masks.front().shape();
  std::vector<std::uint8_t> out(shape.size(), 0);
  for (const auto& m : masks) {
    if (m.shape() != shape) Fail(ErrorCode::kShapeMismatch, "merge_rois: masks differ in size");
    const auto d = m.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] |= d[i];
  }
  return BinaryMask(shape.height, shape.width, std::move(out));
}

double DirectedHausdorff(const BinaryMask& a, const BinaryMask& b) {
  if (a.shape() != b.shape()) {
    Fail(ErrorCode::kShapeMismatch, "directed_hausdorff: masks differ in size");
  }
  if (!a.Any()) Fail(ErrorCode::kEmptyMask, "directed_hausdorff: operand A is empty");
  if (!b.Any()) Fail(ErrorCode::kEmptyMask, "directed_hausdorff: operand B is empty");
  const auto dist = raster::SquaredDistanceToSites(b.data(), b.shape());
  const auto ad = a.data();
  std::int64_t worst = 0;
  for (std::size_t i = 0; i < ad.size(); ++i) {
    if (ad[i]) worst = std::max(worst, dist[i]);
  }
  return std::sqrt(static_cast<double>(worst));
}

double SymmetricHausdorff(const BinaryMask& a, const BinaryMask& b) {
  return std::max(DirectedHausdorff(a, b), DirectedHausdorff(b, a));
}

double Iou(const BinaryMask& a, const BinaryMask& b) {
  if (a.shape() != b.shape()) Fail(ErrorCode::kShapeMismatch, "iou: masks differ in size");
  const auto x = a.data();
  const auto y = b.data();
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    inter += x[i] & y[i];
    uni += x[i] | y[i];
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

// Symmetric distance that tolerates empty masks.
double PairDistance(const BinaryMask& a, const BinaryMask& b) {
  const bool ea = !a.Any();
  const bool eb = !b.Any();
  if (ea && eb) return 0.0;
  if (ea || eb) return std::numeric_limits<double>::infinity();
  return SymmetricHausdorff(a, b);
}

}  // namespace

HausdorffReport BuildHausdorffReport(std::string method,
                                     const std::vector<ExplainedMask>& masks,
                                     const std::map<std::string, BinaryMask>& rois) {
  if (rois.empty()) Fail(ErrorCode::kNoRois, "hausdorff report: no ROI masks available");
  HausdorffReport report;
  report.method = std::move(method);
  double sum = 0.0;
  for (const auto& m : masks) {
    const auto it = rois.find(m.id);
    if (it == rois.end()) {
      Fail(ErrorCode::kNoRois, "hausdorff report: sample '" + m.id + "' has no ROI");
    }
    HausdorffEntry e;
    e.id = m.id;
    if (!it->second.Any()) {
      e.skipped = true;
      e.reason = "empty ROI mask";
    } else if (!m.mask.Any()) {
      e.skipped = true;
      e.reason = "empty explanation mask";
    } else {
      e.distance = DirectedHausdorff(m.mask, it->second);
      e.reverse = DirectedHausdorff(it->second, m.mask);
      e.symmetric = std::max(e.distance, e.reverse);
      if (report.scored == 0) {
        report.min = report.max = e.distance;
      } else {
        report.min = std::min(report.min, e.distance);
        report.max = std::max(report.max, e.distance);
      }
      ++report.scored;
      sum += e.distance;
    }
    report.per_sample.push_back(std::move(e));
  }
  if (report.scored > 0) {
    report.mean = std::clamp(sum / report.scored, report.min, report.max);
  }
  return report;
}

std::string HausdorffCsv(const std::vector<HausdorffReport>& reports) {
  std::ostringstream out;
  out.precision(17);
  out << "id,method,distance,skipped,reason\n";
  for (const auto& r : reports) {
    for (const auto& e : r.per_sample) {
      out << e.id << ',' << r.method << ',';
      if (!e.skipped) out << e.distance;
      out << ',' << (e.skipped ? "true" : "false") << ',' << e.reason << '\n';
    }
  }
  return out.str();
}

StabilityReport StabilityEval(const SeededMaskFn& explainer,
                              std::span<const std::uint64_t> seeds) {
  if (seeds.size() < 2) Fail(ErrorCode::kInvalidArgument, "stability: need at least two runs");
  StabilityReport r;
  r.runs = static_cast<int>(seeds.size());
  r.seeds.assign(seeds.begin(), seeds.end());
  std::vector<BinaryMask> masks;
  masks.reserve(seeds.size());
  for (std::uint64_t s : seeds) masks.push_back(explainer(s));
  const int n = r.runs;
  r.pairwise_iou.assign(n, std::vector<double>(n, 1.0));
  r.pairwise_hausdorff.assign(n, std::vector<double>(n, 0.0));
  double iou_sum = 0.0;
  int pairs = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double iou = Iou(masks[i], masks[j]);
      const double hd = PairDistance(masks[i], masks[j]);
      r.pairwise_iou[i][j] = r.pairwise_iou[j][i] = iou;
      r.pairwise_hausdorff[i][j] = r.pairwise_hausdorff[j][i] = hd;
      iou_sum += iou;
      ++pairs;
    }
  }
  r.mean_pairwise_iou = iou_sum / pairs;
  std::vector<const BinaryMask*> distinct;
  for (const auto& m : masks) {
    if (std::none_of(distinct.begin(), distinct.end(),
                     [&](const BinaryMask* d) { return *d == m; })) {
      distinct.push_back(&m);
    }
  }
  r.distinct_masks = static_cast<int>(distinct.size());
  r.deterministic = r.distinct_masks == 1;
  return r;
}

std::vector<ConsistencyEntry> ConsistencyEval(const std::vector<ImagePair>& pairs,
                                              const ImageMaskFn& explainer) {
  std::vector<ConsistencyEntry> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (p.first.shape() != p.second.shape()) {
      Fail(ErrorCode::kShapeMismatch, "consistency: pair '" + p.first_id + "', '" +
                                          p.second_id + "' differ in size");
    }
    const BinaryMask a = explainer(p.first);
    const BinaryMask b = explainer(p.second);
    out.push_back({p.first_id, p.second_id, Iou(a, b), PairDistance(a, b)});
  }
  return out;
}

}  // namespace xaib::maskeval
