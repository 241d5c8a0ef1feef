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

#include "xaib/lasso.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "xaib/core.hpp"

namespace xaib::lasso {

namespace {

void CheckProblem(const WeightedProblem& p) {
  if (p.rows < 1 || p.cols < 0 ||
      p.x.size() != static_cast<std::size_t>(p.rows) * p.cols ||
      p.y.size() != static_cast<std::size_t>(p.rows) ||
      p.w.size() != static_cast<std::size_t>(p.rows)) {
    Fail(ErrorCode::kShapeMismatch, "weighted problem: inconsistent sizes");
  }
  double total = 0.0;
  for (double w : p.w) {
    if (!(w >= 0.0)) Fail(ErrorCode::kInvalidArgument, "negative sample weight");
    total += w;
  }
  if (!(total > 0.0)) Fail(ErrorCode::kInvalidArgument, "all sample weights are zero");
}

struct Centered {
  double total_weight = 0.0;
  std::vector<double> x_mean;  // per column
  double y_mean = 0.0;
  std::vector<double> xc;      // column-major centred design
  std::vector<double> yc;
};

Centered Center(const WeightedProblem& p) {
  Centered c;
  const int n = p.rows;
  const int m = p.cols;
  for (double w : p.w) c.total_weight += w;
  c.x_mean.assign(m, 0.0);
  for (int i = 0; i < n; ++i) {
    c.y_mean += p.w[i] * p.y[i];
    for (int j = 0; j < m; ++j) c.x_mean[j] += p.w[i] * p.x[i * m + j];
  }
  c.y_mean /= c.total_weight;
  for (double& v : c.x_mean) v /= c.total_weight;
  c.xc.resize(static_cast<std::size_t>(n) * m);
  c.yc.resize(n);
  for (int i = 0; i < n; ++i) {
    c.yc[i] = p.y[i] - c.y_mean;
    for (int j = 0; j < m; ++j) {
      c.xc[static_cast<std::size_t>(j) * n + i] = p.x[i * m + j] - c.x_mean[j];
    }
  }
  return c;
}

double SoftThreshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

int PathPoint::NumNonzero() const {
  return static_cast<int>(
      std::count_if(coef.begin(), coef.end(), [](double v) { return v != 0.0; }));
}

double LambdaMax(const WeightedProblem& problem) {
  CheckProblem(problem);
  const Centered c = Center(problem);
  const int n = problem.rows;
  double best = 0.0;
  for (int j = 0; j < problem.cols; ++j) {
    double g = 0.0;
    for (int i = 0; i < n; ++i) g += problem.w[i] * c.xc[static_cast<std::size_t>(j) * n + i] * c.yc[i];
    best = std::max(best, std::abs(g) / c.total_weight);
  }
  return best;
}

std::vector<double> GeometricGrid(double lambda_max, double decades,
                                  int points) {
  if (points < 1) Fail(ErrorCode::kInvalidArgument, "grid needs at least one point");
  std::vector<double> grid(points);
  for (int k = 0; k < points; ++k) {
    const double frac = points == 1 ? 0.0 : static_cast<double>(k) / (points - 1);
    grid[k] = lambda_max * std::pow(10.0, -decades * frac);
  }
  return grid;
}

std::vector<PathPoint> WeightedLassoPath(const WeightedProblem& problem,
                                         std::span<const double> lambdas,
                                         double tolerance, int max_sweeps) {
  CheckProblem(problem);
  const Centered c = Center(problem);
  const int n = problem.rows;
  const int m = problem.cols;
  const double W = c.total_weight;

  std::vector<double> curvature(m, 0.0);  // (1/W) sum w x~^2
  for (int j = 0; j < m; ++j) {
    const double* col = c.xc.data() + static_cast<std::size_t>(j) * n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += problem.w[i] * col[i] * col[i];
    curvature[j] = s / W;
  }
  double y_scale = 0.0;
  for (int i = 0; i < n; ++i) y_scale += problem.w[i] * c.yc[i] * c.yc[i];
  y_scale = std::max(y_scale / W, 1e-300);

  std::vector<double> beta(m, 0.0);
  std::vector<double> resid(c.yc);
  std::vector<PathPoint> path;
  path.reserve(lambdas.size());
  for (double lambda : lambdas) {
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      double max_delta = 0.0;
      for (int j = 0; j < m; ++j) {
        if (curvature[j] <= 0.0) continue;
        const double* col = c.xc.data() + static_cast<std::size_t>(j) * n;
        double rho = 0.0;
        for (int i = 0; i < n; ++i) rho += problem.w[i] * col[i] * resid[i];
        rho = rho / W + curvature[j] * beta[j];
        const double updated = SoftThreshold(rho, lambda) / curvature[j];
        const double delta = updated - beta[j];
        if (delta != 0.0) {
          for (int i = 0; i < n; ++i) resid[i] -= delta * col[i];
          beta[j] = updated;
          max_delta = std::max(max_delta, curvature[j] * delta * delta);
        }
      }
      if (max_delta <= tolerance * y_scale) break;
    }
    PathPoint pt;
    pt.lambda = lambda;
    pt.coef = beta;
    double b = c.y_mean;
    for (int j = 0; j < m; ++j) b -= c.x_mean[j] * beta[j];
    pt.intercept = b;
    path.push_back(std::move(pt));
  }
  return path;
}

WlsFit WeightedLeastSquares(const WeightedProblem& problem,
                            std::span<const int> columns) {
  CheckProblem(problem);
  const Centered c = Center(problem);
  const int n = problem.rows;
  const int k = static_cast<int>(columns.size());
  for (int col : columns) {
    if (col < 0 || col >= problem.cols) {
      Fail(ErrorCode::kOutOfRange, "least squares: column index out of range");
    }
  }
  WlsFit fit;
  fit.coef.assign(k, 0.0);
  if (k > 0) {
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
    for (int a = 0; a < k; ++a) {
      const double* xa = c.xc.data() + static_cast<std::size_t>(columns[a]) * n;
      for (int i = 0; i < n; ++i) rhs(a) += problem.w[i] * xa[i] * c.yc[i];
      for (int b = a; b < k; ++b) {
        const double* xb = c.xc.data() + static_cast<std::size_t>(columns[b]) * n;
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += problem.w[i] * xa[i] * xb[i];
        gram(a, b) = s;
        gram(b, a) = s;
      }
    }
    // Pivoted QR tolerates collinear selections (minimum-norm-like answer).
    const Eigen::VectorXd sol = gram.colPivHouseholderQr().solve(rhs);
    for (int a = 0; a < k; ++a) fit.coef[a] = sol(a);
  }
  double b = c.y_mean;
  for (int a = 0; a < k; ++a) b -= c.x_mean[columns[a]] * fit.coef[a];
  fit.intercept = b;
  for (int i = 0; i < n; ++i) {
    double pred = fit.intercept;
    for (int a = 0; a < k; ++a) pred += problem.x[i * problem.cols + columns[a]] * fit.coef[a];
    const double r = problem.y[i] - pred;
    fit.weighted_sse += problem.w[i] * r * r;
  }
  return fit;
}

}  // namespace xaib::lasso
