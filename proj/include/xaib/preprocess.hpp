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

#include <cstddef>
#include <vector>

#include "xaib/core.hpp"

namespace xaib::preprocess {

struct PreprocessConfig {
  double binarize_threshold = 0.1;
  double opening_radius = 5.0;
  double gamma = 0.8;
  double clahe_clip_limit = 2.0;
  int clahe_tile_rows = 8;
  int clahe_tile_cols = 8;
  std::vector<double> gabor_orientations_deg = {0.0, 45.0, 90.0, 135.0};
  double gabor_wavelength = 4.0;
  // Width of the edge band searched for lines, in target-size pixels; it is
  // rescaled to the input resolution before use.
  int border_band = 20;
  int target_height = 224;
  int target_width = 224;

  // Throws kConfig on violated invariants.
  void Validate() const;
};

// Zeroes every pixel outside the largest connected component of the opened
// foreground (threshold + disk opening). Foreground pixels within the
// opening radius of that component are kept as they were. Throws
// kAllBackground when nothing exceeds the threshold.
GrayImage RemoveArtifacts(const GrayImage& image, const PreprocessConfig& cfg);

// Zeroes thin bright Gabor responses inside the border band. Pixels outside
// the band are never touched.
GrayImage RemoveBorderLines(const GrayImage& image, const PreprocessConfig& cfg);

// Maximum even-Gabor response over the configured orientations, scaled so
// an ideal thin line of unit intensity responds with roughly 1.
std::vector<double> GaborLineResponse(const GrayImage& image,
                                      const PreprocessConfig& cfg);

// Border band in input pixels (rows, cols) for an image of this shape.
Shape BorderBand(Shape image, const PreprocessConfig& cfg);

GrayImage GammaCorrect(const GrayImage& image, double gamma);

GrayImage Clahe(const GrayImage& image, const PreprocessConfig& cfg);

GrayImage Resize(const GrayImage& image, Shape target);
// Bilinear resample of the 0/1 mask, re-thresholded at 0.5.
BinaryMask ResizeMask(const BinaryMask& mask, Shape target);

struct StageLog {
  std::size_t artifacts_zeroed = 0;
  std::size_t line_pixels_zeroed = 0;
  std::size_t gamma_changed = 0;
  std::size_t clahe_changed = 0;
  Shape input_shape;
  Shape output_shape;
};

struct PipelineResult {
  GrayImage image;
  // Output of the two cleaning stages at input resolution.
  GrayImage cleaned;
  StageLog log;
};

// remove_artifacts -> remove_border_lines -> gamma -> CLAHE -> resize.
// Pixels zeroed by cleaning stay zero through enhancement.
PipelineResult RunPipeline(const GrayImage& image, const PreprocessConfig& cfg);
GrayImage PreprocessImage(const GrayImage& image, const PreprocessConfig& cfg);

}  // namespace xaib::preprocess
