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

// Weighted LASSO by cyclic coordinate descent, and weighted least squares.
//
// Both fit an unpenalized intercept. The LASSO objective is
//
//   (1 / 2W) * sum_i w_i (y_i - b - x_i . beta)^2 + lambda * |beta|_1,
//
// W = sum_i w_i, solved on weighted-centred data so that the intercept
// drops out of the coordinate updates.

#include <span>
#include <vector>

namespace xaib::lasso {

// Row-major n x p design with responses and nonnegative weights.
struct WeightedProblem {
  int rows = 0;
  int cols = 0;
  std::span<const double> x;
  std::span<const double> y;
  std::span<const double> w;
};

// Smallest lambda at which every coefficient is zero.
double LambdaMax(const WeightedProblem& problem);

// `points` values from lambda_max down `decades` orders of magnitude,
// geometrically spaced, largest first.
std::vector<double> GeometricGrid(double lambda_max, double decades,
                                  int points);

struct PathPoint {
  double lambda = 0.0;
  double intercept = 0.0;
  std::vector<double> coef;
  int NumNonzero() const;
};

// Solutions along a decreasing lambda grid with warm starts.
std::vector<PathPoint> WeightedLassoPath(const WeightedProblem& problem,
                                         std::span<const double> lambdas,
                                         double tolerance = 1e-12,
                                         int max_sweeps = 100000);

struct WlsFit {
  double intercept = 0.0;
  std::vector<double> coef;  // one per requested column
  double weighted_sse = 0.0;
};

// Weighted least squares with intercept on a subset of columns (may be
// empty, giving the weighted mean).
WlsFit WeightedLeastSquares(const WeightedProblem& problem,
                            std::span<const int> columns);

}  // namespace xaib::lasso
