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
#include <filesystem>
#include <vector>

#include "xaib/core.hpp"

namespace xaib::synthetic {

// Desk-scale mammogram stand-in. A bright lesion sits in the left half for
// benign samples and the right half for malignant ones. The lesions are
// striped, horizontally for benign and vertically for malignant, so that a
// translation-invariant classifier can still separate them after flips.
struct SyntheticSpec {
  int count_per_class = 100;
  int image_size = 256;
  double blob_radius_min = 34.0;
  double blob_radius_max = 40.0;
  double text_probability = 0.5;
  double line_probability = 0.5;
  std::uint64_t seed = 0;

  // Throws kConfig.
  void Validate() const;
};

struct SyntheticSample {
  LabeledSample sample;   // roi = exact lesion support
  BinaryMask text_mask;   // injected text pixels
  BinaryMask line_mask;   // injected border-line pixels
};

// Sample `index` of the given class; every intensity is a multiple of 1/255
// so that the PNG round trip is exact.
SyntheticSample Synthesize(const SyntheticSpec& spec, Label label, int index);

// Benign samples first, then malignant, ids `benign_0000`, `malignant_0000`...
std::vector<SyntheticSample> SynthesizeAll(const SyntheticSpec& spec);

// Writes images/<id>.png, rois/<id>.png and manifest.csv under `out_dir`;
// returns the manifest path.
std::filesystem::path WriteSynthetic(const SyntheticSpec& spec,
                                     const std::filesystem::path& out_dir);

}  // namespace xaib::synthetic
