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
#include <filesystem>
#include <fstream>

#include "xaib/model.hpp"
#include "xaib/tensor_io.hpp"

using namespace xaib;
using namespace xaib::model;
namespace fs = std::filesystem;

namespace {

GrayImage RandomImage(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(static_cast<std::size_t>(n) * n);
  for (double& x : v) x = rng.Uniform();
  return GrayImage(n, n, std::move(v));
}

MicroCnn RandomModel(int n, std::uint64_t seed) {
  MicroCnn m = MicroCnn::HeInit({n, 4, 6}, seed);
  Rng rng(seed ^ 0x55);
  for (double& w : m.dense_w) w = rng.Uniform(-1.0, 1.0);
  for (double& b : m.conv1_b) b = rng.Uniform(0.0, 0.1);
  for (double& b : m.conv2_b) b = rng.Uniform(0.0, 0.1);
  return m;
}

double RelErr(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

fs::path Scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("xaib_model_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("xten round trip and errors") {
  xten::Tensor t{{2, 3}, {1.f, -2.f, 3.5f, 0.f, 1e-7f, 8.f}};
  const auto bytes = xten::Encode(t);
  CHECK(xten::Decode(bytes) == t);
  auto bad = bytes;
  bad[0] = 'Y';
  CHECK_THROWS_AS(xten::Decode(bad), Error);
  auto short_bytes = bytes;
  short_bytes.resize(bytes.size() - 1);
  try {
    xten::Decode(short_bytes);
    FAIL("expected truncation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTruncatedFile);
  }
}

TEST_CASE("model archive round trip") {
  const fs::path dir = Scratch("archive");
  const MicroCnn m = RandomModel(16, 3);
  SaveModel(m, dir / "m.xmdl");
  const MicroCnn back = LoadModel(dir / "m.xmdl");
  CHECK(back.config().input_size == 16);
  // Stored as float32.
  for (std::size_t i = 0; i < m.conv2_w.size(); ++i) {
    REQUIRE(back.conv2_w[i] == static_cast<double>(static_cast<float>(m.conv2_w[i])));
  }
  SaveModel(back, dir / "n.xmdl");
  CHECK(LoadModel(dir / "n.xmdl") == back);
  std::ofstream(dir / "junk.xmdl") << "NOPE0000000000000000";
  try {
    LoadModel(dir / "junk.xmdl");
    FAIL("expected bad magic");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kBadMagic);
  }
  CHECK_THROWS_AS(LoadModel(dir / "absent.xmdl"), Error);
}

TEST_CASE("activation bundle round trip is bit exact") {
  const fs::path dir = Scratch("bundle");
  const MicroCnn m = RandomModel(16, 4);
  const ActivationBundle b = m.Bundle(RandomImage(16, 5), Label::kMalignant);
  SaveBundle(b, dir / "x.json");
  CHECK(fs::exists(dir / "x.activations.xten"));
  CHECK(LoadBundle(dir / "x.json") == b);
  ActivationBundle broken = b;
  broken.gradients.pop_back();
  CHECK_THROWS_AS(broken.Validate(), Error);
}

TEST_CASE("probabilities sum to one and the zero model is uniform") {
  const MicroCnn zero({16, 4, 6});
  const auto p0 = zero.PredictProba(RandomImage(16, 1));
  CHECK(p0[0] == doctest::Approx(0.5));
  const MicroCnn m = RandomModel(16, 9);
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const auto p = m.PredictProba(RandomImage(16, s));
    CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(m.PredictProba(RandomImage(15, 1)), Error);
}

TEST_CASE("class score gradient with respect to the final activations") {
  // Central differences on the head above the Grad-CAM layer.
  const double eps = 1e-3;
  int probes = 0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const MicroCnn m = RandomModel(24, seed);
    const GrayImage img = RandomImage(24, seed + 100);
    const ForwardCache cache = MicroForward(m, img);
    for (Label target : {Label::kBenign, Label::kMalignant}) {
      const ActivationBundle b = m.Bundle(img, target);
      const int c = static_cast<int>(target);
      Rng rng(seed * 31 + c);
      for (int p = 0; p < 20; ++p) {
        const std::size_t idx = rng.Below(cache.pool2.size());
        auto plus = cache.pool2, minus = cache.pool2;
        plus[idx] += eps;
        minus[idx] -= eps;
        const double fd = (LogitsFromActivations(m, plus)[c] - LogitsFromActivations(m, minus)[c]) / (2 * eps);
        REQUIRE(RelErr(b.gradients[idx], fd) < 1e-4);
        ++probes;
      }
    }
  }
  CHECK(probes >= 100);
}

TEST_CASE("parameter gradients match finite differences") {
  MicroCnn m = RandomModel(12, 77);
  const GrayImage img = RandomImage(12, 78);
  const std::array<double, 2> up = {0.7, -1.3};
  auto objective = [&](const MicroCnn& mm) {
    const auto f = MicroForward(mm, img);
    return up[0] * f.logits[0] + up[1] * f.logits[1];
  };
  const ParamGradients g = MicroBackward(m, MicroForward(m, img), up);
  const std::vector<const std::vector<double>*> analytic = {&g.conv1_w, &g.conv1_b, &g.conv2_w,
                                                            &g.conv2_b, &g.dense_w, &g.dense_b};
  auto params = m.Parameters();
  REQUIRE(params.size() == analytic.size());
  const double eps = 1e-5;
  Rng rng(5);
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto& values = *params[p].values;
    for (int probe = 0; probe < 8; ++probe) {
      const std::size_t i = rng.Below(values.size());
      const double saved = values[i];
      values[i] = saved + eps;
      const double hi = objective(m);
      values[i] = saved - eps;
      const double lo = objective(m);
      values[i] = saved;
      const double fd = (hi - lo) / (2 * eps);
      // Max-pool switches can make a probe non-smooth; skip ties.
      if (std::abs(fd) < 1e-9 && std::abs((*analytic[p])[i]) < 1e-9) continue;
      CHECK_MESSAGE(RelErr((*analytic[p])[i], fd) < 1e-4, params[p].name << "[" << i << "]");
    }
  }
}

TEST_CASE("training with a zero learning rate leaves the weights alone") {
  std::vector<LabeledSample> data;
  for (int i = 0; i < 4; ++i) {
    data.push_back({"s" + std::to_string(i), RandomImage(16, i + 1),
                    i % 2 ? Label::kMalignant : Label::kBenign, std::nullopt});
  }
  const MicroCnn init = RandomModel(16, 2);
  const auto r = TrainMicro(init, data, {2, 0.0, 3});
  CHECK(r.model == init);
  CHECK(r.loss_curve.size() == 3);
  CHECK(r.loss_curve[0] == doctest::Approx(r.loss_curve[2]));
  const auto moved = TrainMicro(init, data, {2, 0.05, 3});
  CHECK_FALSE(moved.model == init);
  CHECK(moved.loss_curve.back() < moved.loss_curve.front());
  CHECK(TrainMicro(init, data, {2, 0.05, 3}).model == moved.model);
  std::vector<LabeledSample> one_class(data.begin(), data.begin() + 1);
  try {
    TrainMicro(init, one_class, {});
    FAIL("expected EmptyDataset");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyDataset);
  }
}

TEST_CASE("cross entropy and argmax") {
  CHECK(CrossEntropy({0.25, 0.75}, Label::kMalignant) == doctest::Approx(-std::log(0.75)));
  CHECK(Argmax({0.4, 0.6}) == Label::kMalignant);
  CHECK(Argmax({0.5, 0.5}) == Label::kBenign);
}
