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

// Independent reference implementations used as test oracles. They favour
// obviousness over speed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "xaib/core.hpp"

namespace oracle {

// max over A of min over B, by exhaustive pairing.
inline double BruteDirectedHausdorff(const xaib::BinaryMask& a, const xaib::BinaryMask& b) {
  double worst = 0.0;
  for (int r = 0; r < a.height(); ++r) {
    for (int c = 0; c < a.width(); ++c) {
      if (!a.at(r, c)) continue;
      double best = std::numeric_limits<double>::infinity();
      for (int r2 = 0; r2 < b.height(); ++r2) {
        for (int c2 = 0; c2 < b.width(); ++c2) {
          if (!b.at(r2, c2)) continue;
          best = std::min(best, std::hypot(double(r - r2), double(c - c2)));
        }
      }
      worst = std::max(worst, best);
    }
  }
  return worst;
}

using Game = std::function<double(const std::vector<std::uint8_t>&)>;

// Shapley values as the average marginal contribution over every ordering
// of the present players.
inline std::vector<double> ShapleyByOrderings(const Game& f, const std::vector<std::uint8_t>& active) {
  const int d = static_cast<int>(active.size());
  std::vector<int> players;
  for (int i = 0; i < d; ++i) {
    if (active[i]) players.push_back(i);
  }
  std::vector<double> phi(d, 0.0);
  std::sort(players.begin(), players.end());
  long count = 0;
  do {
    std::vector<std::uint8_t> z(d, 0);
    double prev = f(z);
    for (int p : players) {
      z[p] = 1;
      const double cur = f(z);
      phi[p] += cur - prev;
      prev = cur;
    }
    ++count;
  } while (std::next_permutation(players.begin(), players.end()));
  for (double& v : phi) v /= static_cast<double>(count);
  return phi;
}

struct Wls {
  double intercept = 0.0;
  std::vector<double> coef;
};

// Weighted least squares with an explicit intercept column, solved through
// the normal equations on the uncentred design.
inline Wls WeightedLeastSquares(const std::vector<std::vector<double>>& x,
                                const std::vector<double>& y, const std::vector<double>& w,
                                const std::vector<int>& columns) {
  const int n = static_cast<int>(x.size());
  const int k = static_cast<int>(columns.size());
  Eigen::MatrixXd a(n, k + 1);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    const double s = std::sqrt(w[i]);
    a(i, 0) = s;
    for (int j = 0; j < k; ++j) a(i, j + 1) = s * x[i][columns[j]];
    b(i) = s * y[i];
  }
  const Eigen::VectorXd sol = (a.transpose() * a).ldlt().solve(a.transpose() * b);
  Wls out;
  out.intercept = sol(0);
  for (int j = 0; j < k; ++j) out.coef.push_back(sol(j + 1));
  return out;
}

// Reference SplitMix64 stream (Steele, Lea and Flood).
inline std::uint64_t SplitMix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline xaib::BinaryMask RandomMask(int h, int w, double p, std::uint64_t seed) {
  xaib::Rng rng(seed);
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(h) * w);
  for (auto& b : bits) b = rng.Bernoulli(p) ? 1 : 0;
  return xaib::BinaryMask(h, w, std::move(bits));
}

inline xaib::BinaryMask MaskFromPoints(int h, int w, const std::vector<std::pair<int, int>>& pts) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(h) * w, 0);
  for (auto [r, c] : pts) bits[static_cast<std::size_t>(r) * w + c] = 1;
  return xaib::BinaryMask(h, w, std::move(bits));
}

// Disk of the given radius centred at (cy, cx) painted onto a constant field.
inline xaib::GrayImage Disk(int h, int w, double cy, double cx, double radius, double inside,
                            double outside) {
  std::vector<double> px(static_cast<std::size_t>(h) * w, outside);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (std::hypot(r + 0.5 - cy, c + 0.5 - cx) <= radius) px[static_cast<std::size_t>(r) * w + c] = inside;
    }
  }
  return xaib::GrayImage(h, w, std::move(px));
}

}  // namespace oracle
