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

#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "xaib/maskeval.hpp"

using namespace xaib;
using namespace xaib::maskeval;

TEST_CASE("directed Hausdorff matches the brute-force oracle") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int h = 1 + static_cast<int>(rng.Below(40));
    const int w = 1 + static_cast<int>(rng.Below(40));
    auto a = oracle::RandomMask(h, w, rng.Uniform(0.01, 0.2), rng.NextU64());
    auto b = oracle::RandomMask(h, w, rng.Uniform(0.01, 0.2), rng.NextU64());
    if (!a.Any() || !b.Any()) continue;
    REQUIRE(DirectedHausdorff(a, b) == oracle::BruteDirectedHausdorff(a, b));
    REQUIRE(SymmetricHausdorff(a, b) == std::max(oracle::BruteDirectedHausdorff(a, b),
                                                 oracle::BruteDirectedHausdorff(b, a)));
  }
}

TEST_CASE("Hausdorff asymmetry example") {
  const BinaryMask a = oracle::MaskFromPoints(20, 20, {{0, 0}, {0, 10}});
  const BinaryMask b = oracle::MaskFromPoints(20, 20, {{0, 0}});
  CHECK(DirectedHausdorff(a, b) == 10.0);
  CHECK(DirectedHausdorff(b, a) == 0.0);
  CHECK(DirectedHausdorff(a, a) == 0.0);
}

TEST_CASE("Hausdorff properties") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = oracle::RandomMask(24, 24, 0.1, rng.NextU64());
    const auto b = oracle::RandomMask(24, 24, 0.1, rng.NextU64());
    if (!a.Any() || !b.Any()) continue;
    // Translating both masks inside a larger canvas changes nothing.
    std::vector<std::pair<int, int>> pa, pb;
    for (int r = 0; r < 24; ++r) {
      for (int c = 0; c < 24; ++c) {
        if (a.at(r, c)) pa.push_back({r + 7, c + 3});
        if (b.at(r, c)) pb.push_back({r + 7, c + 3});
      }
    }
    const auto ta = oracle::MaskFromPoints(40, 40, pa);
    const auto tb = oracle::MaskFromPoints(40, 40, pb);
    REQUIRE(DirectedHausdorff(ta, tb) == DirectedHausdorff(a, b));
    // A subset of the reference set is at distance zero.
    std::vector<std::uint8_t> both(a.data().begin(), a.data().end());
    for (std::size_t i = 0; i < both.size(); ++i) both[i] |= b.data()[i];
    REQUIRE(DirectedHausdorff(a, BinaryMask(24, 24, both)) == 0.0);
    // Growing the reference can only help; growing the source can only hurt.
    REQUIRE(DirectedHausdorff(BinaryMask(24, 24, both), b) >= DirectedHausdorff(a, b));
  }
}

TEST_CASE("Hausdorff errors name the empty operand") {
  const auto full = oracle::MaskFromPoints(4, 4, {{1, 1}});
  const auto empty = BinaryMask::Empty(4, 4);
  try {
    DirectedHausdorff(empty, full);
    FAIL("expected EmptyMask");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyMask);
  }
  CHECK_THROWS_AS(DirectedHausdorff(full, empty), Error);
  CHECK_THROWS_AS(DirectedHausdorff(full, BinaryMask::Empty(4, 5)), Error);
}

TEST_CASE("IoU") {
  const auto a = oracle::MaskFromPoints(3, 3, {{0, 0}, {0, 1}});
  const auto b = oracle::MaskFromPoints(3, 3, {{0, 1}, {0, 2}});
  CHECK(Iou(a, b) == doctest::Approx(1.0 / 3.0));
  CHECK(Iou(a, a) == 1.0);
  CHECK(Iou(BinaryMask::Empty(3, 3), BinaryMask::Empty(3, 3)) == 1.0);
}

TEST_CASE("heatmap thresholds nest as tau grows") {
  Rng rng(8);
  std::vector<double> v(30 * 30);
  for (double& x : v) x = rng.Uniform();
  const Heatmap h = Heatmap::FromNonnegative(30, 30, v);
  std::size_t prev = h.data().size() + 1;
  for (double tau : {0.0, 0.2, 0.5, 0.8, 1.0}) {
    const auto m = HeatmapToMask(h, {Threshold::kFractionOfMax, tau});
    CHECK(m.Count() <= prev);
    prev = m.Count();
    for (std::size_t i = 0; i < v.size(); ++i) REQUIRE((m.data()[i] != 0) == (h.data()[i] >= tau * h.Max()));
  }
  CHECK_FALSE(HeatmapToMask(Heatmap(2, 2, {0, 0, 0, 0}), {}).Any());
  CHECK_FALSE(HeatmapToMask(Heatmap(2, 2, {0, 0, 0, 0}), {Threshold::kOtsu, 0.5}).Any());
}

TEST_CASE("Otsu separates two clusters") {
  std::vector<double> v;
  for (int i = 0; i < 50; ++i) v.push_back(0.1 + 0.001 * i);
  for (int i = 0; i < 50; ++i) v.push_back(0.8 + 0.001 * i);
  const int t = OtsuBin(v);
  CHECK(t >= static_cast<int>(0.149 * 255));
  CHECK(t < static_cast<int>(0.8 * 255));
  const auto m = HeatmapToMask(Heatmap::FromNonnegative(10, 10, v), {Threshold::kOtsu, 0.5});
  CHECK(m.Count() == 50);
  CHECK(ParseThreshold("otsu") == Threshold::kOtsu);
  CHECK_THROWS_AS(ParseThreshold("median"), Error);
}

TEST_CASE("attribution masks") {
  const Segmentation seg(2, 3, {0, 1, 2, 0, 1, 2}, 3);
  explain::Attribution a;
  a.values = {0.5, -0.2, 0.1};
  a.selected = {2};
  CHECK(AttributionToMask(a, seg, {SegmentRule::kSelected, 5}) == oracle::MaskFromPoints(2, 3, {{0, 2}, {1, 2}}));
  CHECK(AttributionToMask(a, seg, {SegmentRule::kPositive, 5}).Count() == 4);
  CHECK(AttributionToMask(a, seg, {SegmentRule::kTopK, 1}) == oracle::MaskFromPoints(2, 3, {{0, 0}, {1, 0}}));
  a.method = explain::Method::kShapExact;
  try {
    AttributionToMask(a, seg, {SegmentRule::kSelected, 5});
    FAIL("expected RuleMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kRuleMismatch);
  }
  a.values.pop_back();
  CHECK_THROWS_AS(AttributionToMask(a, seg, {SegmentRule::kPositive, 5}), Error);
}

TEST_CASE("ROI merge") {
  const auto a = oracle::MaskFromPoints(2, 2, {{0, 0}});
  const auto b = oracle::MaskFromPoints(2, 2, {{1, 1}});
  CHECK(MergeRois({a, b}).Count() == 2);
  CHECK_THROWS_AS(MergeRois({}), Error);
  CHECK_THROWS_AS(MergeRois({a, BinaryMask::Empty(3, 2)}), Error);
}

TEST_CASE("Hausdorff report skips empty explanations") {
  std::map<std::string, BinaryMask> rois = {{"a", oracle::MaskFromPoints(8, 8, {{0, 0}})},
                                            {"b", oracle::MaskFromPoints(8, 8, {{4, 4}})}};
  const std::vector<ExplainedMask> masks = {{"a", oracle::MaskFromPoints(8, 8, {{0, 3}})},
                                            {"b", BinaryMask::Empty(8, 8)}};
  const auto r = BuildHausdorffReport("gradcam", masks, rois);
  CHECK(r.scored == 1);
  CHECK(r.mean == 3.0);
  CHECK(r.per_sample[1].skipped);
  const auto csv = HausdorffCsv({r});
  CHECK(csv.rfind("id,method,distance,skipped,reason\n", 0) == 0);
  CHECK(csv.find("a,gradcam,3") != std::string::npos);
  CHECK_THROWS_AS(BuildHausdorffReport("x", masks, {}), Error);
}

TEST_CASE("stability evaluation") {
  const std::vector<std::uint64_t> seeds = {1, 2, 3};
  const auto fixed = StabilityEval([](std::uint64_t) { return oracle::MaskFromPoints(4, 4, {{1, 1}}); }, seeds);
  CHECK(fixed.deterministic);
  CHECK(fixed.distinct_masks == 1);
  CHECK(fixed.mean_pairwise_iou == 1.0);
  const auto varying = StabilityEval(
      [](std::uint64_t s) { return oracle::MaskFromPoints(4, 4, {{0, 0}, {static_cast<int>(s), 3}}); }, seeds);
  CHECK_FALSE(varying.deterministic);
  CHECK(varying.distinct_masks == 3);
  CHECK(varying.mean_pairwise_iou == doctest::Approx(1.0 / 3.0));
  CHECK(varying.pairwise_iou[1][1] == 1.0);
  CHECK(varying.pairwise_hausdorff[0][1] == 1.0);
  const std::vector<std::uint64_t> one = {1};
  CHECK_THROWS_AS(StabilityEval([](std::uint64_t) { return BinaryMask::Empty(1, 1); }, one), Error);
  const auto half_empty = StabilityEval(
      [](std::uint64_t s) { return s == 1 ? BinaryMask::Empty(2, 2) : oracle::MaskFromPoints(2, 2, {{0, 0}}); },
      std::vector<std::uint64_t>{1, 2});
  CHECK(std::isinf(half_empty.pairwise_hausdorff[0][1]));
}

TEST_CASE("consistency evaluation") {
  const GrayImage a = GrayImage::Filled(4, 4, 0.2);
  const auto r = ConsistencyEval({{"x", a, "y", a}},
                                 [](const GrayImage&) { return oracle::MaskFromPoints(4, 4, {{2, 2}}); });
  REQUIRE(r.size() == 1);
  CHECK(r[0].iou == 1.0);
  CHECK(r[0].hausdorff == 0.0);
  CHECK_THROWS_AS(ConsistencyEval({{"x", a, "y", GrayImage::Filled(3, 4, 0.2)}},
                                  [](const GrayImage& g) { return BinaryMask::Empty(g.height(), g.width()); }),
                  Error);
}
