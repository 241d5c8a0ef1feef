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
#include <span>
#include <string_view>
#include <vector>

#include "xaib/core.hpp"
#include "xaib/model.hpp"

namespace xaib::explain {

// ---------------------------------------------------------------- Grad-CAM

// Channel weights: the spatial mean of each gradient channel.
std::vector<double> GradCamWeights(const model::ActivationBundle& bundle);

// ReLU of the weighted activation sum, bilinearly upsampled to
// `output_size` and divided by its maximum.
Heatmap GradCam(const model::ActivationBundle& bundle, Shape output_size);

// ---------------------------------------------------------------- segments

struct SlicConfig {
  int num_segments = 49;
  // Spatial weight relative to intensity on the [0,1] scale.
  double compactness = 0.1;
  int iterations = 10;
  // Reserved; the grid initialization is deterministic.
  std::uint64_t seed = 0;
};

// SLIC over (row, col, intensity). Throws kInvalidArgument when
// num_segments < 2.
Segmentation Segment(const GrayImage& image, const SlicConfig& config);

// Image plus superpixels; `active` is the instance's own interpretable
// vector x' (all ones for a full image).
struct InterpretableInstance {
  GrayImage image;
  Segmentation segmentation;
  std::vector<std::uint8_t> active;
  double fill_value = 0.0;

  // Fill value defaults to the mean intensity of `image`. Throws
  // kShapeMismatch if the segmentation does not cover the image.
  static InterpretableInstance Make(GrayImage image, Segmentation segmentation);
  int size() const { return segmentation.num_segments(); }
};

// Segments switched off in `z` are painted with the fill value. Throws
// kLengthMismatch when |z| != d'.
GrayImage Perturb(const InterpretableInstance& instance,
                  std::span<const std::uint8_t> z);

// -------------------------------------------------------------- attribution

enum class Method { kLime, kShapExact, kShapSampled };
std::string_view MethodName(Method method);

struct Attribution {
  double base_value = 0.0;
  std::vector<double> values;
  Label target_class = Label::kBenign;
  Method method = Method::kLime;
  // LIME's selected segments in ascending order; empty for Shapley methods.
  std::vector<int> selected;
  std::uint64_t seed = 0;

  friend bool operator==(const Attribution&, const Attribution&) = default;
};

// Renders per-segment values to pixels.
std::vector<double> RenderSegmentValues(const Segmentation& segmentation,
                                        std::span<const double> values);

// Scalar value of a coalition z' in {0,1}^d'. Must be safe to call from
// several threads when jobs > 1.
using CoalitionFn = std::function<double(std::span<const std::uint8_t>)>;

// f_x(z') = P(target | perturb(instance, z')).
CoalitionFn ClassifierValue(const model::Classifier& classifier,
                            const InterpretableInstance& instance,
                            Label target_class);

// Evaluates every coalition, in parallel when jobs > 1. Results are placed
// by index so the output never depends on scheduling.
std::vector<double> EvaluateCoalitions(
    const CoalitionFn& fn, const std::vector<std::vector<std::uint8_t>>& zs,
    int jobs);

// -------------------------------------------------------------------- LIME

struct LimeConfig {
  int num_samples = 1000;
  int k = 5;
  double kernel_width = 0.25;
  std::uint64_t seed = 0;
  // Empty: 50 points from lambda_max down two decades.
  std::vector<double> lasso_lambda_grid;
  int jobs = 1;

  // Throws kConfig.
  void Validate(int num_features) const;
};

struct LimeSamples {
  std::vector<std::vector<std::uint8_t>> z;
  std::vector<double> y;
  std::vector<double> weights;
};

struct LimeResult {
  Attribution attribution;
  LimeSamples samples;
  double lambda = 0.0;        // chosen grid point
  double refit_sse = 0.0;     // weighted SSE of the K-feature refit
  double null_sse = 0.0;      // weighted SSE of the intercept-only model
};

// Bernoulli(0.5) coalitions drawn from the seed, in order.
std::vector<std::vector<std::uint8_t>> DrawLimeSamples(int num_features,
                                                       int num_samples,
                                                       std::uint64_t seed);

// exp(-D^2 / sigma^2) with D the cosine distance between x' and z'.
// An all-zero z' is at distance 1.
double LimeKernel(std::span<const std::uint8_t> x,
                  std::span<const std::uint8_t> z, double kernel_width);

// K-LASSO on the interpretable space: draws samples, weights them, walks
// the lambda path from the small end to the first point with at most K
// nonzero weights, and refits those features by weighted least squares.
// Throws kDegenerateSamples when every sampled output is identical.
LimeResult LimeFit(const CoalitionFn& fn, int num_features,
                   const LimeConfig& config);

LimeResult LimeExplain(const model::Classifier& classifier,
                       const GrayImage& image,
                       const Segmentation& segmentation, Label target_class,
                       const LimeConfig& config);

// ------------------------------------------------------------------ Shapley

inline constexpr int kMaxExactSegments = 12;

// Exhaustive enumeration over the players present in `active`; absent
// players get exactly zero. Throws kTooManySegments when d' > 12.
Attribution ShapExactValues(const CoalitionFn& fn,
                            std::span<const std::uint8_t> active, int jobs = 1);

// Permutation sampling. When num_permutations reaches M! every permutation
// is enumerated once, which reproduces the exact values.
Attribution ShapSampledValues(const CoalitionFn& fn,
                              std::span<const std::uint8_t> active,
                              int num_permutations, std::uint64_t seed,
                              int jobs = 1);

Attribution ShapExact(const model::Classifier& classifier,
                      const InterpretableInstance& instance,
                      Label target_class, int jobs = 1);
Attribution ShapSampled(const model::Classifier& classifier,
                        const InterpretableInstance& instance,
                        Label target_class, int num_permutations,
                        std::uint64_t seed, int jobs = 1);

}  // namespace xaib::explain
