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

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "xaib/core.hpp"

namespace xaib::augment {

// Fixed augmentation set; order matters (panels A through G).
enum class AugmentKind {
  kFlipV,
  kFlipH,
  kFlipHV,
  kRotMinus30FlipH,
  kRotMinus30,
  kRotPlus30,
  kRotPlus30FlipH,
};

inline constexpr std::array<AugmentKind, 7> kAllKinds = {
    AugmentKind::kFlipV,      AugmentKind::kFlipH,
    AugmentKind::kFlipHV,     AugmentKind::kRotMinus30FlipH,
    AugmentKind::kRotMinus30, AugmentKind::kRotPlus30,
    AugmentKind::kRotPlus30FlipH,
};

// File-name token, e.g. "rot+30_fliph".
std::string_view KindName(AugmentKind kind);

struct SplitResult {
  std::vector<LabeledSample> train;
  std::vector<LabeledSample> test;
  std::uint64_t seed = 0;
};

// Per class: order by id, shuffle with the seed, and send the first
// ceil(ratio * n) samples to train. Throws kTooFewSamples when a class has
// fewer than two samples, kInvalidArgument for ratio outside (0,1).
SplitResult StratifiedSplit(const std::vector<LabeledSample>& samples,
                            double ratio, std::uint64_t seed);
std::size_t TrainCount(std::size_t class_size, double ratio);

GrayImage FlipH(const GrayImage& image);
GrayImage FlipV(const GrayImage& image);
// Rotation about the image centre, counter-clockwise as displayed for
// positive angles; bilinear, zero fill.
GrayImage Rotate(const GrayImage& image, double degrees);

// Throws kNonSquare for rotation kinds on non-square inputs.
GrayImage AugmentVariant(const GrayImage& image, AugmentKind kind);
// Same geometry for masks (bilinear on 0/1, re-thresholded at 0.5).
BinaryMask AugmentMask(const BinaryMask& mask, AugmentKind kind);

// Originals followed by the seven variants of each sample; variants get id
// `<id>__<kind>` and carry the transformed ROI.
std::vector<LabeledSample> AugmentTrainingSet(
    const std::vector<LabeledSample>& train);

// Source id of an (augmented) sample id: the part before "__".
std::string_view ProvenanceId(std::string_view id);

}  // namespace xaib::augment
