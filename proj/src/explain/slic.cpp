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
#include <limits>

#include "xaib/explain.hpp"

namespace xaib::explain {

namespace {

struct Center {
  double row;
  double col;
  double intensity;
};

}  // namespace

Segmentation Segment(const GrayImage& image, const SlicConfig& config) {
  if (config.num_segments < 2) {
    Fail(ErrorCode::kInvalidArgument, "segment: need a target of at least 2");
  }
  if (config.iterations < 1 || !(config.compactness >= 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "segment: bad iterations or compactness");
  }
  const int H = image.height();
  const int W = image.width();
  const auto pix = image.data();
  const double k = config.num_segments;
  const int ny = std::clamp(static_cast<int>(std::lround(std::sqrt(k * H / W))), 1, H);
  const int nx = std::clamp(static_cast<int>(std::lround(k / ny)), 1, W);
  const double step = std::sqrt(static_cast<double>(H) * W / (nx * ny));
  const double spatial = config.compactness / step;

  // Pixel (r, c) sits at (r + 0.5, c + 0.5).
  std::vector<Center> centers;
  centers.reserve(static_cast<std::size_t>(nx) * ny);
  for (int i = 0; i < ny; ++i) {
    for (int j = 0; j < nx; ++j) {
      const double r = (i + 0.5) * H / ny;
      const double c = (j + 0.5) * W / nx;
      const int pr = std::min(static_cast<int>(r), H - 1);
      const int pc = std::min(static_cast<int>(c), W - 1);
      centers.push_back({r, c, image.at(pr, pc)});
    }
  }

  const std::size_t n = static_cast<std::size_t>(H) * W;
  std::vector<int> assign(n, -1);
  std::vector<double> best(n);
  const int reach = static_cast<int>(std::ceil(step));
  for (int iter = 0; iter < config.iterations; ++iter) {
    std::fill(best.begin(), best.end(), std::numeric_limits<double>::infinity());
    for (std::size_t ci = 0; ci < centers.size(); ++ci) {
      const Center& ctr = centers[ci];
      const int r0 = std::max(0, static_cast<int>(std::floor(ctr.row)) - reach);
      const int r1 = std::min(H - 1, static_cast<int>(std::floor(ctr.row)) + reach);
      const int c0 = std::max(0, static_cast<int>(std::floor(ctr.col)) - reach);
      const int c1 = std::min(W - 1, static_cast<int>(std::floor(ctr.col)) + reach);
      for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
          const std::size_t idx = static_cast<std::size_t>(r) * W + c;
          const double dr = r + 0.5 - ctr.row;
          const double dc = c + 0.5 - ctr.col;
          const double di = pix[idx] - ctr.intensity;
          const double d = di * di + spatial * spatial * (dr * dr + dc * dc);
          if (d < best[idx]) {
            best[idx] = d;
            assign[idx] = static_cast<int>(ci);
          }
        }
      }
    }
    std::vector<double> sr(centers.size(), 0.0), sc(centers.size(), 0.0),
        si(centers.size(), 0.0), cnt(centers.size(), 0.0);
    for (int r = 0; r < H; ++r) {
      for (int c = 0; c < W; ++c) {
        const std::size_t idx = static_cast<std::size_t>(r) * W + c;
        const int a = assign[idx];
        if (a < 0) continue;
        sr[a] += r + 0.5;
        sc[a] += c + 0.5;
        si[a] += pix[idx];
        cnt[a] += 1.0;
      }
    }
    for (std::size_t ci = 0; ci < centers.size(); ++ci) {
      if (cnt[ci] > 0.0) {
        centers[ci] = {sr[ci] / cnt[ci], sc[ci] / cnt[ci], si[ci] / cnt[ci]};
      }
    }
  }
  // Pixels no window reached go to the nearest centre.
  for (std::size_t idx = 0; idx < n; ++idx) {
    if (assign[idx] >= 0) continue;
    const double r = static_cast<double>(idx / W) + 0.5;
    const double c = static_cast<double>(idx % W) + 0.5;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t ci = 0; ci < centers.size(); ++ci) {
      const double d = (r - centers[ci].row) * (r - centers[ci].row) +
                       (c - centers[ci].col) * (c - centers[ci].col);
      if (d < bd) {
        bd = d;
        assign[idx] = static_cast<int>(ci);
      }
    }
  }

  // Connectivity: relabel 4-connected pieces in raster order and fold small
  // ones into the segment above or left of their first pixel.
  const std::size_t min_size =
      std::max<std::size_t>(1, static_cast<std::size_t>(step * step / 4.0));
  std::vector<int> out(n, -1);
  std::vector<std::size_t> queue;
  int next = 0;
  for (std::size_t start = 0; start < n; ++start) {
    if (out[start] >= 0) continue;
    const int old = assign[start];
    queue.assign(1, start);
    out[start] = next;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const std::size_t p = queue[q];
      const int r = static_cast<int>(p / W);
      const int c = static_cast<int>(p % W);
      const int dr[4] = {-1, 1, 0, 0};
      const int dc[4] = {0, 0, -1, 1};
      for (int d = 0; d < 4; ++d) {
        const int rr = r + dr[d];
        const int cc = c + dc[d];
        if (rr < 0 || rr >= H || cc < 0 || cc >= W) continue;
        const std::size_t np = static_cast<std::size_t>(rr) * W + cc;
        if (out[np] < 0 && assign[np] == old) {
          out[np] = next;
          queue.push_back(np);
        }
      }
    }
    int target = next;
    if (queue.size() < min_size) {
      const int r = static_cast<int>(start / W);
      const int c = static_cast<int>(start % W);
      if (c > 0) {
        target = out[start - 1];
      } else if (r > 0) {
        target = out[start - W];
      }
    }
    if (target != next) {
      for (std::size_t p : queue) out[p] = target;
    } else {
      ++next;
    }
  }
  return Segmentation(H, W, std::move(out), next);
}

}  // namespace xaib::explain
