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

#include <algorithm>
#include <cmath>
#include <functional>

#include "xaib/explain.hpp"
#include "xaib/lasso.hpp"

namespace xaib::explain {

void LimeConfig::Validate(int num_features) const {
  if (num_features < 1) Fail(ErrorCode::kConfig, "lime: no interpretable features");
  if (num_samples < num_features + 1) {
    Fail(ErrorCode::kConfig, "lime: num_samples must be at least d'+1");
  }
  if (k < 1 || k > num_features) Fail(ErrorCode::kConfig, "lime: K must lie in [1, d']");
  if (!(kernel_width > 0.0) || !std::isfinite(kernel_width)) {
    Fail(ErrorCode::kConfig, "lime: kernel width must be positive");
  }
  for (double l : lasso_lambda_grid) {
    if (!(l >= 0.0) || !std::isfinite(l)) {
      Fail(ErrorCode::kConfig, "lime: lambda grid values must be finite and >= 0");
    }
  }
  if (jobs < 1) Fail(ErrorCode::kConfig, "lime: jobs must be >= 1");
}

std::vector<std::vector<std::uint8_t>> DrawLimeSamples(int num_features,
                                                       int num_samples,
                                                       std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<std::uint8_t>> z(num_samples,
                                           std::vector<std::uint8_t>(num_features));
  for (auto& row : z) {
    for (auto& bit : row) bit = rng.Bernoulli(0.5) ? 1 : 0;
  }
  return z;
}

double LimeKernel(std::span<const std::uint8_t> x,
                  std::span<const std::uint8_t> z, double kernel_width) {
  if (x.size() != z.size()) Fail(ErrorCode::kLengthMismatch, "lime kernel: length mismatch");
  double dot = 0.0, nx = 0.0, nz = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += x[i] * z[i];
    nx += x[i];
    nz += z[i];
  }
  const double distance = (nx == 0.0 || nz == 0.0) ? 1.0 : 1.0 - dot / std::sqrt(nx * nz);
  return std::exp(-distance * distance / (kernel_width * kernel_width));
}

LimeResult LimeFit(const CoalitionFn& fn, int num_features,
                   const LimeConfig& config) {
  config.Validate(num_features);
  const int d = num_features;
  const int n = config.num_samples;
  LimeResult result;
  LimeSamples& s = result.samples;
  s.z = DrawLimeSamples(d, n, config.seed);
  s.y = EvaluateCoalitions(fn, s.z, config.jobs);
  const auto [lo, hi] = std::minmax_element(s.y.begin(), s.y.end());
  if (*lo == *hi) {
    Fail(ErrorCode::kDegenerateSamples,
         "lime: every sampled output is identical; nothing to explain");
  }
  const std::vector<std::uint8_t> x(d, 1);
  s.weights.resize(n);
  std::vector<double> design(static_cast<std::size_t>(n) * d);
  for (int i = 0; i < n; ++i) {
    s.weights[i] = LimeKernel(x, s.z[i], config.kernel_width);
    for (int j = 0; j < d; ++j) design[static_cast<std::size_t>(i) * d + j] = s.z[i][j];
  }
  const lasso::WeightedProblem problem{n, d, design, s.y, s.weights};

  std::vector<double> grid = config.lasso_lambda_grid;
  if (grid.empty()) grid = lasso::GeometricGrid(lasso::LambdaMax(problem), 2.0, 50);
  std::sort(grid.begin(), grid.end(), std::greater<>());
  const auto path = lasso::WeightedLassoPath(problem, grid);

  // Densest solution along the path that still respects the K budget.
  const lasso::PathPoint* chosen = nullptr;
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    if (it->NumNonzero() <= config.k) {
      chosen = &*it;
      break;
    }
  }
  std::vector<int> selected;
  if (chosen) {
    for (int j = 0; j < d; ++j) {
      if (chosen->coef[j] != 0.0) selected.push_back(j);
    }
    result.lambda = chosen->lambda;
  } else {
    // Grid never sparse enough: keep the K largest magnitudes at its top.
    const auto& top = path.front();
    std::vector<int> order(d);
    for (int j = 0; j < d; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(top.coef[a]) > std::abs(top.coef[b]);
    });
    selected.assign(order.begin(), order.begin() + config.k);
    std::sort(selected.begin(), selected.end());
    result.lambda = top.lambda;
  }

  const auto refit = lasso::WeightedLeastSquares(problem, selected);
  const auto null_fit = lasso::WeightedLeastSquares(problem, std::span<const int>{});
  result.refit_sse = refit.weighted_sse;
  result.null_sse = null_fit.weighted_sse;

  Attribution& a = result.attribution;
  a.method = Method::kLime;
  a.seed = config.seed;
  a.base_value = refit.intercept;
  a.values.assign(d, 0.0);
  for (std::size_t t = 0; t < selected.size(); ++t) a.values[selected[t]] = refit.coef[t];
  a.selected = std::move(selected);
  return result;
}

LimeResult LimeExplain(const model::Classifier& classifier,
                       const GrayImage& image,
                       const Segmentation& segmentation, Label target_class,
                       const LimeConfig& config) {
  const auto instance = InterpretableInstance::Make(image, segmentation);
  LimeResult r = LimeFit(ClassifierValue(classifier, instance, target_class),
                         instance.size(), config);
  r.attribution.target_class = target_class;
  return r;
}

}  // namespace xaib::explain
