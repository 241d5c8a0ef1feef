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

#include <cmath>

#include "oracles.hpp"
#include "xaib/explain.hpp"
#include "xaib/lasso.hpp"

using namespace xaib;
using namespace xaib::explain;

namespace {

model::ActivationBundle UniformBundle(int k, int h, int w, float act, float grad) {
  model::ActivationBundle b;
  b.channels = k;
  b.height = h;
  b.width = w;
  b.activations.assign(static_cast<std::size_t>(k) * h * w, act);
  b.gradients.assign(b.activations.size(), grad);
  return b;
}

double Sum(std::span<const std::uint8_t> z, std::span<const double> w) {
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += z[i] * w[i];
  return s;
}

}  // namespace

TEST_CASE("Grad-CAM on uniform bundles") {
  const Heatmap ones = GradCam(UniformBundle(3, 7, 7, 1.f, 1.f), {28, 28});
  for (double v : ones.data()) REQUIRE(v == doctest::Approx(1.0));
  const Heatmap neg = GradCam(UniformBundle(3, 7, 7, 1.f, -1.f), {28, 28});
  for (double v : neg.data()) REQUIRE(v == 0.0);
  CHECK_THROWS_AS(GradCam(UniformBundle(1, 2, 2, 1.f, 1.f), {0, 4}), Error);
}

TEST_CASE("Grad-CAM weights are spatial gradient means and the map peaks at one") {
  auto b = UniformBundle(2, 2, 2, 0.f, 0.f);
  b.gradients = {1, 2, 3, 4, -1, -1, -1, -1};
  b.activations = {0, 0, 0, 1, 1, 1, 1, 0};
  const auto alpha = GradCamWeights(b);
  CHECK(alpha[0] == doctest::Approx(2.5));
  CHECK(alpha[1] == doctest::Approx(-1.0));
  const Heatmap h = GradCam(b, {2, 2});
  // cam = relu(2.5 * a0 - a1) = {0, 0, 0, 2.5} -> normalized by the max.
  CHECK(h.data()[3] == doctest::Approx(1.0));
  CHECK(h.data()[0] == 0.0);
  CHECK(h.Max() == doctest::Approx(1.0));
}

TEST_CASE("LIME kernel") {
  const std::vector<std::uint8_t> x = {1, 1, 1, 1};
  CHECK(LimeKernel(x, x, 0.25) == doctest::Approx(1.0));
  const std::vector<std::uint8_t> none = {0, 0, 0, 0};
  CHECK(LimeKernel(x, none, 0.25) == doctest::Approx(std::exp(-16.0)));
  const std::vector<std::uint8_t> half = {1, 1, 0, 0};
  const double d = 1.0 - 2.0 / std::sqrt(8.0);
  CHECK(LimeKernel(x, half, 0.5) == doctest::Approx(std::exp(-d * d / 0.25)));
  const std::vector<std::uint8_t> shorter = {1, 1};
  CHECK_THROWS_AS(LimeKernel(x, shorter, 0.25), Error);
}

TEST_CASE("LIME recovers a single linear feature") {
  const CoalitionFn f = [](std::span<const std::uint8_t> z) { return 0.1 + 0.7 * z[3]; };
  LimeConfig cfg;
  cfg.num_samples = 500;
  cfg.k = 1;
  cfg.seed = 11;
  const auto r = LimeFit(f, 8, cfg);
  REQUIRE(r.attribution.selected == std::vector<int>{3});
  CHECK(r.attribution.values[3] == doctest::Approx(0.7).epsilon(0.01));
  CHECK(r.attribution.base_value == doctest::Approx(0.1).epsilon(0.01));
  CHECK(r.refit_sse < 1e-20 + 1e-12 * r.null_sse);
}

TEST_CASE("LIME refit matches the weighted least squares oracle on noisy data") {
  Rng noise(3);
  std::vector<double> jitter(4096);
  for (double& j : jitter) j = noise.Uniform(-0.05, 0.05);
  const std::vector<double> w = {0.0, 0.4, 0.0, -0.3, 0.0, 0.2};
  const CoalitionFn f = [&](std::span<const std::uint8_t> z) {
    std::uint64_t key = 0;
    for (auto b : z) key = key * 2 + b;
    return 0.5 + Sum(z, w) + jitter[key];
  };
  LimeConfig cfg;
  cfg.num_samples = 300;
  cfg.k = 3;
  cfg.seed = 8;
  const auto r = LimeFit(f, 6, cfg);
  CHECK(r.attribution.selected == std::vector<int>{1, 3, 5});
  std::vector<std::vector<double>> x;
  for (const auto& z : r.samples.z) x.emplace_back(z.begin(), z.end());
  const auto ref = oracle::WeightedLeastSquares(x, r.samples.y, r.samples.weights, r.attribution.selected);
  CHECK(r.attribution.base_value == doctest::Approx(ref.intercept).epsilon(1e-9));
  for (std::size_t i = 0; i < ref.coef.size(); ++i) {
    CHECK(r.attribution.values[r.attribution.selected[i]] == doctest::Approx(ref.coef[i]).epsilon(1e-9));
  }
}

TEST_CASE("LIME is reproducible per seed and rejects degenerate samples") {
  const CoalitionFn f = [](std::span<const std::uint8_t> z) { return 0.2 * z[0] + 0.1 * z[1] * z[2]; };
  LimeConfig cfg;
  cfg.num_samples = 50;
  cfg.k = 2;
  cfg.seed = 5;
  CHECK(LimeFit(f, 5, cfg).attribution == LimeFit(f, 5, cfg).attribution);
  CHECK(DrawLimeSamples(5, 10, 1) != DrawLimeSamples(5, 10, 2));
  const CoalitionFn flat = [](std::span<const std::uint8_t>) { return 0.3; };
  try {
    LimeFit(flat, 5, cfg);
    FAIL("expected DegenerateSamples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateSamples);
  }
  cfg.k = 6;
  CHECK_THROWS_AS(LimeFit(f, 5, cfg), Error);
}

TEST_CASE("weighted lasso path") {
  // y = 2 x0 exactly: lambda_max kills everything, small lambda keeps x0.
  std::vector<double> x = {0, 1, 1, 0, 1, 1, 0, 0};
  std::vector<double> y = {0, 2, 2, 0};
  std::vector<double> w = {1, 1, 1, 1};
  const lasso::WeightedProblem p{4, 2, x, y, w};
  const double lmax = lasso::LambdaMax(p);
  CHECK(lmax > 0.0);
  const auto grid = lasso::GeometricGrid(lmax, 3.0, 10);
  CHECK(grid.front() == doctest::Approx(lmax));
  CHECK(grid.back() == doctest::Approx(lmax * 1e-3));
  const auto path = lasso::WeightedLassoPath(p, grid);
  CHECK(path.front().NumNonzero() == 0);
  CHECK(path.back().coef[0] == doctest::Approx(2.0).epsilon(0.01));
  const std::vector<int> cols = {0};
  const auto fit = lasso::WeightedLeastSquares(p, cols);
  CHECK(fit.coef[0] == doctest::Approx(2.0));
  CHECK(fit.intercept == doctest::Approx(0.0));
}

TEST_CASE("SHAP: symmetric AND game") {
  const CoalitionFn f = [](std::span<const std::uint8_t> z) { return z[0] && z[1] && z[2] ? 1.0 : 0.0; };
  const std::vector<std::uint8_t> active = {1, 1, 1};
  const auto a = ShapExactValues(f, active);
  for (double v : a.values) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(a.base_value == 0.0);
}

TEST_CASE("SHAP: absent players get zero and exact matches the ordering oracle") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    const int d = 2 + static_cast<int>(rng.Below(5));
    std::vector<double> table(std::size_t{1} << d);
    for (double& v : table) v = rng.Uniform(-1.0, 1.0);
    auto index = [](std::span<const std::uint8_t> z) {
      std::size_t k = 0;
      for (std::size_t i = 0; i < z.size(); ++i) k |= std::size_t{z[i]} << i;
      return k;
    };
    const CoalitionFn f = [&](std::span<const std::uint8_t> z) { return table[index(z)]; };
    std::vector<std::uint8_t> active(d);
    for (auto& b : active) b = rng.Bernoulli(0.7);
    const auto exact = ShapExactValues(f, active);
    const auto ref = oracle::ShapleyByOrderings([&](const std::vector<std::uint8_t>& z) { return table[index(z)]; },
                                                active);
    for (int i = 0; i < d; ++i) {
      if (!active[i]) {
        REQUIRE(exact.values[i] == 0.0);
      }
      REQUIRE(exact.values[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    }
    // Enumerating every permutation reproduces the exact values.
    const auto sampled = ShapSampledValues(f, active, 5040, seed);
    for (int i = 0; i < d; ++i) REQUIRE(sampled.values[i] == doctest::Approx(exact.values[i]).epsilon(1e-12));
  }
}

TEST_CASE("SHAP limits") {
  const CoalitionFn f = [](std::span<const std::uint8_t> z) { return double(z[0]); };
  const std::vector<std::uint8_t> thirteen(13, 1);
  try {
    ShapExactValues(f, thirteen);
    FAIL("expected TooManySegments");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTooManySegments);
  }
  const std::vector<std::uint8_t> active = {1, 1, 1, 1};
  const auto a = ShapExactValues(f, active, 3);
  CHECK(a.values == std::vector<double>{1.0, 0.0, 0.0, 0.0});
}

TEST_CASE("SLIC on a constant image balances segment areas") {
  const GrayImage flat = GrayImage::Filled(64, 64, 0.5);
  const auto seg = Segment(flat, {4, 0.1, 10, 0});
  CHECK(seg.num_segments() == 4);
  for (auto s : seg.SegmentSizes()) {
    CHECK(s >= 0.8 * 1024);
    CHECK(s <= 1.2 * 1024);
  }
  CHECK_THROWS_AS(Segment(flat, {1, 0.1, 10, 0}), Error);
}

TEST_CASE("SLIC follows an intensity edge") {
  std::vector<double> v(40 * 40);
  for (int r = 0; r < 40; ++r) {
    for (int c = 0; c < 40; ++c) v[r * 40 + c] = c < 20 ? 0.1 : 0.9;
  }
  const auto seg = Segment(GrayImage(40, 40, v), {2, 0.1, 10, 0});
  REQUIRE(seg.num_segments() == 2);
  std::size_t agree = 0;
  const int left = seg.labels()[0];
  for (int r = 0; r < 40; ++r) {
    for (int c = 0; c < 40; ++c) agree += (seg.labels()[r * 40 + c] == left) == (c < 20);
  }
  CHECK(agree >= 0.95 * 1600);
}

TEST_CASE("segments are connected and cover labels densely") {
  Rng rng(4);
  std::vector<double> v(50 * 60);
  for (double& x : v) x = rng.Uniform();
  const auto seg = Segment(GrayImage(50, 60, v), {12, 0.1, 10, 0});
  const auto sizes = seg.SegmentSizes();
  CHECK(sizes.size() == static_cast<std::size_t>(seg.num_segments()));
  for (auto s : sizes) CHECK(s > 0);
}

TEST_CASE("perturbation paints switched-off segments with the mean") {
  const GrayImage img(2, 2, {0.0, 0.2, 0.4, 0.6});
  const Segmentation seg(2, 2, {0, 0, 1, 1}, 2);
  const auto inst = InterpretableInstance::Make(img, seg);
  CHECK(inst.fill_value == doctest::Approx(0.3));
  const std::vector<std::uint8_t> z = {1, 0};
  const GrayImage out = Perturb(inst, z);
  CHECK(out.at(0, 1) == 0.2);
  CHECK(out.at(1, 0) == doctest::Approx(0.3));
  const std::vector<std::uint8_t> bad = {1};
  CHECK_THROWS_AS(Perturb(inst, bad), Error);
  const std::vector<double> vals = {2.0, -1.0};
  CHECK(RenderSegmentValues(seg, vals) == std::vector<double>{2.0, 2.0, -1.0, -1.0});
}
