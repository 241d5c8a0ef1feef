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

#include <set>

#include "oracles.hpp"
#include "xaib/augment.hpp"

using namespace xaib;
using namespace xaib::augment;

namespace {

GrayImage RandomImage(int h, int w, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(static_cast<std::size_t>(h) * w);
  for (double& x : v) x = rng.Uniform();
  return GrayImage(h, w, std::move(v));
}

std::vector<LabeledSample> Population(int benign, int malignant) {
  std::vector<LabeledSample> out;
  for (int i = 0; i < benign + malignant; ++i) {
    const bool b = i < benign;
    out.push_back({(b ? "b" : "m") + std::to_string(i), GrayImage::Filled(4, 4, 0.5),
                   b ? Label::kBenign : Label::kMalignant, BinaryMask::Empty(4, 4)});
  }
  return out;
}

}  // namespace

TEST_CASE("stratified split arithmetic") {
  CHECK(TrainCount(1229, 0.9) == 1107);
  CHECK(TrainCount(900, 0.9) == 810);
  const auto split = StratifiedSplit(Population(1229, 900), 0.9, 42);
  CHECK(split.train.size() == 1917);
  CHECK(split.test.size() == 212);
  std::set<std::string> ids;
  for (const auto& s : split.train) ids.insert(s.id);
  for (const auto& s : split.test) CHECK(ids.count(s.id) == 0);
}

TEST_CASE("split is seeded and validates its input") {
  const auto pop = Population(10, 12);
  const auto a = StratifiedSplit(pop, 0.7, 5);
  const auto b = StratifiedSplit(pop, 0.7, 5);
  REQUIRE(a.train.size() == b.train.size());
  for (std::size_t i = 0; i < a.train.size(); ++i) CHECK(a.train[i].id == b.train[i].id);
  const auto c = StratifiedSplit(pop, 0.7, 6);
  bool differs = false;
  for (std::size_t i = 0; i < a.train.size(); ++i) differs |= a.train[i].id != c.train[i].id;
  CHECK(differs);
  CHECK_THROWS_AS(StratifiedSplit(pop, 1.0, 1), Error);
  try {
    StratifiedSplit(Population(1, 5), 0.5, 1);
    FAIL("expected TooFewSamples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTooFewSamples);
  }
}

TEST_CASE("flips are involutions") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const GrayImage img = RandomImage(7, 11, seed);
    CHECK(FlipH(FlipH(img)) == img);
    CHECK(FlipV(FlipV(img)) == img);
    CHECK(AugmentVariant(AugmentVariant(img, AugmentKind::kFlipHV), AugmentKind::kFlipHV) == img);
    CHECK(FlipH(img).at(2, 0) == img.at(2, 10));
    CHECK(FlipV(img).at(0, 3) == img.at(6, 3));
  }
}

TEST_CASE("rotation direction and near-invariance of a centred disk") {
  std::vector<double> v(9 * 9, 0.0);
  v[4 * 9 + 7] = 1.0;  // right of centre
  const GrayImage quarter = Rotate(GrayImage(9, 9, v), 90.0);
  CHECK(quarter.at(1, 4) == doctest::Approx(1.0));  // now above centre
  const GrayImage disk = oracle::Disk(64, 64, 32, 32, 20, 0.8, 0.0);
  for (double deg : {30.0, -30.0}) {
    const GrayImage rot = Rotate(disk, deg);
    double diff = 0.0;
    for (std::size_t i = 0; i < disk.data().size(); ++i) diff += std::abs(rot.data()[i] - disk.data()[i]);
    CHECK(diff / disk.data().size() < 0.02);
  }
  CHECK(Rotate(disk, 0.0) == disk);
}

TEST_CASE("rotations need square images") {
  const GrayImage img = RandomImage(6, 8, 1);
  for (AugmentKind k : kAllKinds) {
    const bool rotates = k != AugmentKind::kFlipV && k != AugmentKind::kFlipH && k != AugmentKind::kFlipHV;
    if (rotates) {
      try {
        AugmentVariant(img, k);
        FAIL("expected NonSquare");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::kNonSquare);
      }
    } else {
      CHECK(AugmentVariant(img, k).shape() == img.shape());
    }
  }
}

TEST_CASE("training set expands eightfold with co-transformed ROIs") {
  std::vector<LabeledSample> train;
  for (int i = 0; i < 3; ++i) {
    const GrayImage disk = oracle::Disk(48, 48, 14 + 8 * i, 30, 7, 1.0, 0.0);
    std::vector<std::uint8_t> bits;
    for (double x : disk.data()) bits.push_back(x > 0.5);
    train.push_back({"s" + std::to_string(i), disk, i ? Label::kMalignant : Label::kBenign,
                     BinaryMask(48, 48, bits)});
  }
  const auto expanded = AugmentTrainingSet(train);
  REQUIRE(expanded.size() == 8 * train.size());
  std::set<std::string> ids;
  for (const auto& s : expanded) {
    ids.insert(s.id);
    const auto& src = *std::find_if(train.begin(), train.end(),
                                    [&](const LabeledSample& t) { return t.id == ProvenanceId(s.id); });
    CHECK(s.label == src.label);
    REQUIRE(s.roi.has_value());
    // The ROI follows the image: thresholding the moved image gives nearly
    // the moved mask.
    std::size_t disagree = 0;
    for (std::size_t i = 0; i < s.image.data().size(); ++i) disagree += (s.image.data()[i] > 0.5) != (s.roi->data()[i] != 0);
    CHECK(disagree <= s.roi->Count() / 20 + 2);
  }
  CHECK(ids.size() == expanded.size());
  CHECK(expanded[0].id == "s0");
  CHECK(ProvenanceId("s0__rot+30_fliph") == "s0");
  CHECK(ProvenanceId("plain") == "plain");
}

TEST_CASE("flip masks exactly match flipped images") {
  const auto m = oracle::RandomMask(10, 10, 0.3, 9);
  std::vector<double> v;
  for (auto b : m.data()) v.push_back(b);
  const GrayImage img(10, 10, v);
  for (AugmentKind k : {AugmentKind::kFlipH, AugmentKind::kFlipV, AugmentKind::kFlipHV}) {
    const auto moved = AugmentVariant(img, k);
    const auto mask = AugmentMask(m, k);
    for (std::size_t i = 0; i < v.size(); ++i) REQUIRE((moved.data()[i] > 0.5) == (mask.data()[i] != 0));
  }
}

TEST_CASE("no train/test leakage by provenance") {
  std::vector<LabeledSample> pop;
  for (int i = 0; i < 20; ++i) {
    pop.push_back({"x" + std::to_string(i), RandomImage(8, 8, i + 1), i % 2 ? Label::kMalignant : Label::kBenign,
                   std::nullopt});
  }
  const auto split = StratifiedSplit(pop, 0.75, 3);
  const auto expanded = AugmentTrainingSet(split.train);
  std::set<std::string> test_ids;
  for (const auto& s : split.test) test_ids.insert(s.id);
  for (const auto& s : expanded) CHECK(test_ids.count(std::string(ProvenanceId(s.id))) == 0);
  CHECK(expanded.size() == 8 * split.train.size());
}
