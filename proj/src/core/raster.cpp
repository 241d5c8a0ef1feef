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

#include "xaib/raster.hpp"

#include <algorithm>
#include <cmath>

namespace xaib::raster {

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

// 1-D squared distance transform of f (lower envelope of parabolas).
void Transform1D(const std::vector<std::int64_t>& f, std::vector<std::int64_t>& d,
                 std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] >= kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -std::numeric_limits<double>::infinity();
      z[1] = std::numeric_limits<double>::infinity();
      continue;
    }
    const auto intersect = [&](int p) {
      return (static_cast<double>(f[q] + static_cast<std::int64_t>(q) * q) -
              static_cast<double>(f[p] + static_cast<std::int64_t>(p) * p)) /
             (2.0 * (q - p));
    };
    double s = intersect(v[k]);
    // z[0] is -inf, so k never drops below zero.
    while (s <= z[k]) {
      --k;
      s = intersect(v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  if (k < 0) {
    std::fill(d.begin(), d.end(), kInf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const std::int64_t diff = q - v[j];
    d[q] = diff * diff + f[v[j]];
  }
}

}  // namespace

std::vector<std::int64_t> SquaredDistanceToSites(
    std::span<const std::uint8_t> sites, Shape shape) {
  const int h = shape.height;
  const int w = shape.width;
  std::vector<std::int64_t> grid(shape.size());
  bool any = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = sites[i] ? 0 : kInf;
    any = any || sites[i];
  }
  if (!any) {
    std::fill(grid.begin(), grid.end(), kNoSite);
    return grid;
  }
  const int n = std::max(h, w);
  std::vector<std::int64_t> f(n), d(n);
  std::vector<int> v(n);
  std::vector<double> z(n + 1);

  f.resize(h);
  d.resize(h);
  for (int c = 0; c < w; ++c) {
    for (int r = 0; r < h; ++r) f[r] = grid[static_cast<std::size_t>(r) * w + c];
    Transform1D(f, d, v, z);
    for (int r = 0; r < h; ++r) grid[static_cast<std::size_t>(r) * w + c] = d[r];
  }
  f.resize(w);
  d.resize(w);
  for (int r = 0; r < h; ++r) {
    std::copy_n(grid.begin() + static_cast<std::ptrdiff_t>(r) * w, w, f.begin());
    Transform1D(f, d, v, z);
    std::copy_n(d.begin(), w, grid.begin() + static_cast<std::ptrdiff_t>(r) * w);
  }
  return grid;
}

Components ConnectedComponents(std::span<const std::uint8_t> foreground,
                               Shape shape, int connectivity) {
  const int h = shape.height;
  const int w = shape.width;
  Components out;
  out.labels.assign(shape.size(), -1);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < out.labels.size(); ++start) {
    if (!foreground[start] || out.labels[start] >= 0) continue;
    const int label = static_cast<int>(out.sizes.size());
    std::size_t count = 0;
    stack.assign(1, start);
    out.labels[start] = label;
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      ++count;
      const int r = static_cast<int>(p / w);
      const int c = static_cast<int>(p % w);
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          if (connectivity == 4 && dr != 0 && dc != 0) continue;
          const int rr = r + dr;
          const int cc = c + dc;
          if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
          const std::size_t q = static_cast<std::size_t>(rr) * w + cc;
          if (foreground[q] && out.labels[q] < 0) {
            out.labels[q] = label;
            stack.push_back(q);
          }
        }
      }
    }
    out.sizes.push_back(count);
  }
  return out;
}

std::vector<std::uint8_t> Erode(std::span<const std::uint8_t> mask,
                                Shape shape, double radius) {
  // A pixel survives iff no background pixel lies within the disk.
  std::vector<std::uint8_t> background(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) background[i] = !mask[i];
  const auto dist = SquaredDistanceToSites(background, shape);
  const double r2 = radius * radius;
  std::vector<std::uint8_t> out(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    out[i] = (dist[i] == kNoSite || static_cast<double>(dist[i]) > r2) ? 1 : 0;
  }
  return out;
}

std::vector<std::uint8_t> Dilate(std::span<const std::uint8_t> mask,
                                 Shape shape, double radius) {
  const auto dist = SquaredDistanceToSites(mask, shape);
  const double r2 = radius * radius;
  std::vector<std::uint8_t> out(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    out[i] = (dist[i] != kNoSite && static_cast<double>(dist[i]) <= r2) ? 1 : 0;
  }
  return out;
}

std::vector<std::uint8_t> Open(std::span<const std::uint8_t> mask, Shape shape,
                               double radius) {
  return Dilate(Erode(mask, shape, radius), shape, radius);
}

double SampleBilinear(std::span<const double> values, Shape shape, double row,
                      double col, double fill) {
  const double r0f = std::floor(row);
  const double c0f = std::floor(col);
  const int r0 = static_cast<int>(r0f);
  const int c0 = static_cast<int>(c0f);
  const double fr = row - r0f;
  const double fc = col - c0f;
  auto at = [&](int r, int c) {
    if (r < 0 || r >= shape.height || c < 0 || c >= shape.width) return fill;
    return values[static_cast<std::size_t>(r) * shape.width + c];
  };
  // Exact grid positions read the pixel directly.
  if (fr == 0.0 && fc == 0.0) return at(r0, c0);
  return (1 - fr) * ((1 - fc) * at(r0, c0) + fc * at(r0, c0 + 1)) +
         fr * ((1 - fc) * at(r0 + 1, c0) + fc * at(r0 + 1, c0 + 1));
}

std::vector<double> ResizeBilinear(std::span<const double> values, Shape from,
                                   Shape to) {
  if (from == to) return {values.begin(), values.end()};
  std::vector<double> out(to.size());
  const double sy = static_cast<double>(from.height) / to.height;
  const double sx = static_cast<double>(from.width) / to.width;
  for (int r = 0; r < to.height; ++r) {
    const double y = std::clamp((r + 0.5) * sy - 0.5, 0.0,
                                static_cast<double>(from.height - 1));
    const int y0 = static_cast<int>(y);
    const int y1 = std::min(y0 + 1, from.height - 1);
    const double fy = y - y0;
    for (int c = 0; c < to.width; ++c) {
      const double x = std::clamp((c + 0.5) * sx - 0.5, 0.0,
                                  static_cast<double>(from.width - 1));
      const int x0 = static_cast<int>(x);
      const int x1 = std::min(x0 + 1, from.width - 1);
      const double fx = x - x0;
      const auto px = [&](int rr, int cc) {
        return values[static_cast<std::size_t>(rr) * from.width + cc];
      };
      out[static_cast<std::size_t>(r) * to.width + c] =
          (1 - fy) * ((1 - fx) * px(y0, x0) + fx * px(y0, x1)) +
          fy * ((1 - fx) * px(y1, x0) + fx * px(y1, x1));
    }
  }
  return out;
}

}  // namespace xaib::raster
