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

#include "xaib/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "xaib/raster.hpp"

namespace xaib::augment {

namespace {

std::vector<double> FlipHValues(std::span<const double> v, Shape s) {
  std::vector<double> out(v.size());
  for (int r = 0; r < s.height; ++r) {
    for (int c = 0; c < s.width; ++c) {
      out[static_cast<std::size_t>(r) * s.width + c] =
          v[static_cast<std::size_t>(r) * s.width + (s.width - 1 - c)];
    }
  }
  return out;
}

std::vector<double> FlipVValues(std::span<const double> v, Shape s) {
  std::vector<double> out(v.size());
  for (int r = 0; r < s.height; ++r) {
    std::copy_n(v.begin() + static_cast<std::ptrdiff_t>(s.height - 1 - r) * s.width,
                s.width, out.begin() + static_cast<std::ptrdiff_t>(r) * s.width);
  }
  return out;
}

std::vector<double> RotateValues(std::span<const double> v, Shape s,
                                 double degrees) {
  const double a = degrees * std::numbers::pi / 180.0;
  const double ca = std::cos(a);
  const double sa = std::sin(a);
  const double cy = (s.height - 1) / 2.0;
  const double cx = (s.width - 1) / 2.0;
  std::vector<double> out(v.size());
  for (int r = 0; r < s.height; ++r) {
    for (int c = 0; c < s.width; ++c) {
      // Inverse map: with rows pointing down, a counter-clockwise display
      // rotation by a sends source (x, y) to (x cos a + y sin a,
      // -x sin a + y cos a) in centred coordinates.
      const double x = c - cx;
      const double y = r - cy;
      const double sx = x * ca - y * sa;
      const double sy = x * sa + y * ca;
      out[static_cast<std::size_t>(r) * s.width + c] =
          raster::SampleBilinear(v, s, sy + cy, sx + cx, 0.0);
    }
  }
  return out;
}

double KindAngle(AugmentKind kind) {
  switch (kind) {
    case AugmentKind::kRotMinus30FlipH:
    case AugmentKind::kRotMinus30:
      return -30.0;
    case AugmentKind::kRotPlus30:
    case AugmentKind::kRotPlus30FlipH:
      return 30.0;
    default:
      return 0.0;
  }
}

std::vector<double> ApplyKind(std::span<const double> v, Shape s,
                              AugmentKind kind) {
  switch (kind) {
    case AugmentKind::kFlipV:
      return FlipVValues(v, s);
    case AugmentKind::kFlipH:
      return FlipHValues(v, s);
    case AugmentKind::kFlipHV:
      return FlipHValues(FlipVValues(v, s), s);
    case AugmentKind::kRotMinus30:
    case AugmentKind::kRotPlus30:
      if (s.height != s.width) {
        Fail(ErrorCode::kNonSquare, "rotation requires a square image, got " +
                                        std::to_string(s.height) + "x" +
                                        std::to_string(s.width));
      }
      return RotateValues(v, s, KindAngle(kind));
    case AugmentKind::kRotMinus30FlipH:
    case AugmentKind::kRotPlus30FlipH:
      if (s.height != s.width) {
        Fail(ErrorCode::kNonSquare, "rotation requires a square image, got " +
                                        std::to_string(s.height) + "x" +
                                        std::to_string(s.width));
      }
      return FlipHValues(RotateValues(v, s, KindAngle(kind)), s);
  }
  Fail(ErrorCode::kInternal, "unknown augmentation kind");
}

}  // namespace

std::string_view KindName(AugmentKind kind) {
  switch (kind) {
    case AugmentKind::kFlipV: return "flipv";
    case AugmentKind::kFlipH: return "fliph";
    case AugmentKind::kFlipHV: return "fliphv";
    case AugmentKind::kRotMinus30FlipH: return "rot-30_fliph";
    case AugmentKind::kRotMinus30: return "rot-30";
    case AugmentKind::kRotPlus30: return "rot+30";
    case AugmentKind::kRotPlus30FlipH: return "rot+30_fliph";
  }
  return "unknown";
}

std::size_t TrainCount(std::size_t class_size, double ratio) {
  // The epsilon absorbs representation error such as 0.9 * 900.
  return static_cast<std::size_t>(
      std::ceil(ratio * static_cast<double>(class_size) - 1e-9));
}

SplitResult StratifiedSplit(const std::vector<LabeledSample>& samples,
                            double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    Fail(ErrorCode::kInvalidArgument,
         "split ratio must lie in (0,1), got " + std::to_string(ratio));
  }
  SplitResult result;
  result.seed = seed;
  Rng rng(seed);
  for (Label label : {Label::kBenign, Label::kMalignant}) {
    std::vector<const LabeledSample*> members;
    for (const auto& s : samples) {
      if (s.label == label) members.push_back(&s);
    }
    if (members.size() < 2) {
      Fail(ErrorCode::kTooFewSamples,
           "class " + std::string(LabelName(label)) + " has " +
               std::to_string(members.size()) + " samples; need at least 2");
    }
    std::stable_sort(members.begin(), members.end(),
                     [](const auto* a, const auto* b) { return a->id < b->id; });
    rng.Shuffle(members);
    const std::size_t n_train = TrainCount(members.size(), ratio);
    for (std::size_t i = 0; i < members.size(); ++i) {
      (i < n_train ? result.train : result.test).push_back(*members[i]);
    }
  }
  return result;
}

GrayImage FlipH(const GrayImage& image) {
  return GrayImage(image.height(), image.width(),
                   FlipHValues(image.data(), image.shape()));
}

GrayImage FlipV(const GrayImage& image) {
  return GrayImage(image.height(), image.width(),
                   FlipVValues(image.data(), image.shape()));
}

GrayImage Rotate(const GrayImage& image, double degrees) {
  return GrayImage::Clamped(image.height(), image.width(),
                            RotateValues(image.data(), image.shape(), degrees));
}

GrayImage AugmentVariant(const GrayImage& image, AugmentKind kind) {
  return GrayImage::Clamped(image.height(), image.width(),
                            ApplyKind(image.data(), image.shape(), kind));
}

BinaryMask AugmentMask(const BinaryMask& mask, AugmentKind kind) {
  const std::vector<double> values(mask.data().begin(), mask.data().end());
  const auto moved = ApplyKind(values, mask.shape(), kind);
  std::vector<std::uint8_t> out(moved.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = moved[i] >= 0.5;
  return BinaryMask(mask.height(), mask.width(), std::move(out));
}

std::vector<LabeledSample> AugmentTrainingSet(
    const std::vector<LabeledSample>& train) {
  std::vector<LabeledSample> out;
  out.reserve(train.size() * (kAllKinds.size() + 1));
  for (const auto& s : train) out.push_back(s);
  for (const auto& s : train) {
    for (AugmentKind kind : kAllKinds) {
      std::optional<BinaryMask> roi;
      if (s.roi) roi = AugmentMask(*s.roi, kind);
      out.push_back(LabeledSample{s.id + "__" + std::string(KindName(kind)),
                                  AugmentVariant(s.image, kind), s.label,
                                  std::move(roi)});
    }
  }
  return out;
}

std::string_view ProvenanceId(std::string_view id) {
  const auto pos = id.find("__");
  return pos == std::string_view::npos ? id : id.substr(0, pos);
}

}  // namespace xaib::augment
