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

#include <doctest.h>

#include "oracles.hpp"
#include "xaib/raster.hpp"

using namespace xaib;

TEST_CASE("distance transform matches brute force") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    Rng rng(seed);
    const int h = 1 + static_cast<int>(rng.Below(30));
    const int w = 1 + static_cast<int>(rng.Below(30));
    const auto m = oracle::RandomMask(h, w, rng.Uniform(0.01, 0.3), seed * 7);
    const auto d = raster::SquaredDistanceToSites(m.data(), m.shape());
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        std::int64_t best = raster::kNoSite;
        for (int r2 = 0; r2 < h; ++r2) {
          for (int c2 = 0; c2 < w; ++c2) {
            if (m.at(r2, c2)) best = std::min<std::int64_t>(best, (r - r2) * (r - r2) + (c - c2) * (c - c2));
          }
        }
        REQUIRE(d[r * w + c] == best);
      }
    }
  }
}

TEST_CASE("connected components number in raster order") {
  const std::vector<std::uint8_t> fg = {1, 0, 1,
                                        0, 0, 1,
                                        1, 0, 0};
  const auto four = raster::ConnectedComponents(fg, {3, 3}, 4);
  CHECK(four.sizes == std::vector<std::size_t>{1, 2, 1});
  CHECK(four.labels == std::vector<int>{0, -1, 1, -1, -1, 1, 2, -1, -1});
  const std::vector<std::uint8_t> diag = {1, 0, 0, 1};
  CHECK(raster::ConnectedComponents(diag, {2, 2}, 4).sizes.size() == 2);
  CHECK(raster::ConnectedComponents(diag, {2, 2}, 8).sizes.size() == 1);
}

TEST_CASE("opening removes specks smaller than the disk") {
  std::vector<std::uint8_t> fg(40 * 40, 0);
  for (int r = 5; r < 35; ++r) {
    for (int c = 5; c < 35; ++c) fg[r * 40 + c] = 1;
  }
  fg[1 * 40 + 1] = 1;
  const auto opened = raster::Open(fg, {40, 40}, 3.0);
  CHECK(opened[1 * 40 + 1] == 0);
  CHECK(opened[20 * 40 + 20] == 1);
  // Opening is anti-extensive and idempotent.
  for (std::size_t i = 0; i < fg.size(); ++i) REQUIRE(opened[i] <= fg[i]);
  CHECK(raster::Open(opened, {40, 40}, 3.0) == opened);
}

TEST_CASE("bilinear helpers") {
  const std::vector<double> v = {0.0, 1.0, 2.0, 3.0};
  CHECK(raster::SampleBilinear(v, {2, 2}, 0.5, 0.5, 0.0) == doctest::Approx(1.5));
  CHECK(raster::SampleBilinear(v, {2, 2}, -1.0, 0.0, 7.0) == doctest::Approx(7.0));
  CHECK(raster::ResizeBilinear(v, {2, 2}, {2, 2}) == v);
  const auto up = raster::ResizeBilinear(v, {2, 2}, {4, 4});
  CHECK(up.size() == 16);
  CHECK(up[0] == doctest::Approx(0.0));
  CHECK(up[15] == doctest::Approx(3.0));
}
