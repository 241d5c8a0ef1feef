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

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "xaib/model.hpp"

namespace xaib::model {

namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMatrix = Eigen::Map<RowMatrix>;
using ConstMapMatrix = Eigen::Map<const RowMatrix>;

// Unrolls 3x3 zero-padded neighbourhoods: row (ch*9 + ky*3 + kx), column
// r*size + c.
void Im2Col(const double* input, int channels, int size, RowMatrix& col) {
  const int n = size * size;
  col.resize(channels * 9, n);
  col.setZero();
  for (int ch = 0; ch < channels; ++ch) {
    const double* plane = input + static_cast<std::size_t>(ch) * n;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        double* dst = col.row(ch * 9 + ky * 3 + kx).data();
        for (int r = 0; r < size; ++r) {
          const int rs = r + ky - 1;
          if (rs < 0 || rs >= size) continue;
          const int c_lo = std::max(0, 1 - kx);
          const int c_hi = std::min(size, size + 1 - kx);
          const double* src = plane + static_cast<std::size_t>(rs) * size;
          double* out = dst + static_cast<std::size_t>(r) * size;
          for (int c = c_lo; c < c_hi; ++c) out[c] = src[c + kx - 1];
        }
      }
    }
  }
}

// Per-thread scratch so that training steps do not reallocate.
struct Scratch {
  RowMatrix col;
  RowMatrix dcol;
  std::vector<double> dconv2, dpool1, dconv1;
};

Scratch& LocalScratch() {
  thread_local Scratch scratch;
  return scratch;
}

// Adjoint of Im2Col.
void Col2ImAdd(const RowMatrix& col, int channels, int size, double* output) {
  const int n = size * size;
  for (int ch = 0; ch < channels; ++ch) {
    double* plane = output + static_cast<std::size_t>(ch) * n;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const double* src = col.row(ch * 9 + ky * 3 + kx).data();
        for (int r = 0; r < size; ++r) {
          const int rs = r + ky - 1;
          if (rs < 0 || rs >= size) continue;
          const int c_lo = std::max(0, 1 - kx);
          const int c_hi = std::min(size, size + 1 - kx);
          double* dst = plane + static_cast<std::size_t>(rs) * size;
          const double* in = src + static_cast<std::size_t>(r) * size;
          for (int c = c_lo; c < c_hi; ++c) dst[c + kx - 1] += in[c];
        }
      }
    }
  }
}

void MaxPool2(const std::vector<double>& in, int channels, int size,
              std::vector<double>& out, std::vector<std::int32_t>& arg) {
  const int half = size / 2;
  out.assign(static_cast<std::size_t>(channels) * half * half, 0.0);
  arg.assign(out.size(), 0);
  for (int ch = 0; ch < channels; ++ch) {
    const std::size_t base = static_cast<std::size_t>(ch) * size * size;
    for (int r = 0; r < half; ++r) {
      for (int c = 0; c < half; ++c) {
        std::size_t best = base + static_cast<std::size_t>(2 * r) * size + 2 * c;
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            const std::size_t i =
                base + static_cast<std::size_t>(2 * r + dy) * size + 2 * c + dx;
            if (in[i] > in[best]) best = i;
          }
        }
        const std::size_t o =
            static_cast<std::size_t>(ch) * half * half +
            static_cast<std::size_t>(r) * half + c;
        out[o] = in[best];
        arg[o] = static_cast<std::int32_t>(best);
      }
    }
  }
}

void Softmax2(const std::array<double, 2>& logits, Probabilities& probs) {
  const double m = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - m);
  const double e1 = std::exp(logits[1] - m);
  probs = {e0 / (e0 + e1), e1 / (e0 + e1)};
}

std::array<double, 2> Head(const MicroCnn& model, const std::vector<double>& gap) {
  const int k = model.config().conv2_channels;
  std::array<double, 2> logits{};
  for (int c = 0; c < 2; ++c) {
    double s = model.dense_b[c];
    for (int j = 0; j < k; ++j) s += model.dense_w[c * k + j] * gap[j];
    logits[c] = s;
  }
  return logits;
}

std::vector<double> GlobalAverage(const std::vector<double>& maps, int channels,
                                  int size) {
  std::vector<double> gap(channels, 0.0);
  const std::size_t n = static_cast<std::size_t>(size) * size;
  for (int k = 0; k < channels; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += maps[k * n + i];
    gap[k] = s / static_cast<double>(n);
  }
  return gap;
}

}  // namespace

MicroCnn::MicroCnn(MicroCnnConfig config) : config_(config) {
  if (config.input_size < 4 || config.conv1_channels < 1 ||
      config.conv2_channels < 1) {
    Fail(ErrorCode::kInvalidArgument, "MicroCnn: invalid configuration");
  }
  const int c1 = config.conv1_channels;
  const int c2 = config.conv2_channels;
  conv1_w.assign(static_cast<std::size_t>(c1) * 9, 0.0);
  conv1_b.assign(c1, 0.0);
  conv2_w.assign(static_cast<std::size_t>(c2) * c1 * 9, 0.0);
  conv2_b.assign(c2, 0.0);
  dense_w.assign(static_cast<std::size_t>(2) * c2, 0.0);
  dense_b.assign(2, 0.0);
}

MicroCnn MicroCnn::HeInit(MicroCnnConfig config, std::uint64_t seed) {
  MicroCnn m(config);
  Rng rng(seed);
  const double b1 = std::sqrt(6.0 / 9.0);
  for (double& w : m.conv1_w) w = rng.Uniform(-b1, b1);
  const double b2 = std::sqrt(6.0 / (9.0 * config.conv1_channels));
  for (double& w : m.conv2_w) w = rng.Uniform(-b2, b2);
  return m;
}

std::vector<MicroCnn::ParamRef> MicroCnn::Parameters() {
  const auto c1 = static_cast<std::uint64_t>(config_.conv1_channels);
  const auto c2 = static_cast<std::uint64_t>(config_.conv2_channels);
  return {{"conv1_w", &conv1_w, {c1, 1, 3, 3}},
          {"conv1_b", &conv1_b, {c1}},
          {"conv2_w", &conv2_w, {c2, c1, 3, 3}},
          {"conv2_b", &conv2_b, {c2}},
          {"dense_w", &dense_w, {2, c2}},
          {"dense_b", &dense_b, {2}}};
}

std::vector<std::pair<std::string, const std::vector<double>*>>
MicroCnn::Parameters() const {
  return {{"conv1_w", &conv1_w}, {"conv1_b", &conv1_b},
          {"conv2_w", &conv2_w}, {"conv2_b", &conv2_b},
          {"dense_w", &dense_w}, {"dense_b", &dense_b}};
}

bool operator==(const MicroCnn& a, const MicroCnn& b) {
  return a.config_.input_size == b.config_.input_size &&
         a.config_.conv1_channels == b.config_.conv1_channels &&
         a.config_.conv2_channels == b.config_.conv2_channels &&
         a.conv1_w == b.conv1_w && a.conv1_b == b.conv1_b &&
         a.conv2_w == b.conv2_w && a.conv2_b == b.conv2_b &&
         a.dense_w == b.dense_w && a.dense_b == b.dense_b;
}

ForwardCache MicroForward(const MicroCnn& model, const GrayImage& image) {
  ForwardCache fc;
  MicroForwardInto(model, image, fc);
  return fc;
}

void MicroForwardInto(const MicroCnn& model, const GrayImage& image,
                      ForwardCache& fc) {
  const auto& cfg = model.config();
  if (image.height() != cfg.input_size || image.width() != cfg.input_size) {
    Fail(ErrorCode::kShapeMismatch,
         "MicroCnn expects " + std::to_string(cfg.input_size) + "x" +
             std::to_string(cfg.input_size) + " input, got " +
             std::to_string(image.height()) + "x" +
             std::to_string(image.width()));
  }
  const int c1 = cfg.conv1_channels;
  const int c2 = cfg.conv2_channels;
  Scratch& scratch = LocalScratch();
  fc.in_size = cfg.input_size;
  fc.p1_size = fc.in_size / 2;
  fc.p2_size = fc.p1_size / 2;
  fc.input.assign(image.data().begin(), image.data().end());

  const int n0 = fc.in_size * fc.in_size;
  {
    RowMatrix& col = scratch.col;
    Im2Col(fc.input.data(), 1, fc.in_size, col);
    fc.relu1.resize(static_cast<std::size_t>(c1) * n0);
    MapMatrix out(fc.relu1.data(), c1, n0);
    out.noalias() = ConstMapMatrix(model.conv1_w.data(), c1, 9) * col;
    for (int k = 0; k < c1; ++k) {
      out.row(k).array() =
          (out.row(k).array() + model.conv1_b[k]).max(0.0);
    }
  }
  MaxPool2(fc.relu1, c1, fc.in_size, fc.pool1, fc.arg1);

  const int n1 = fc.p1_size * fc.p1_size;
  {
    RowMatrix& col = scratch.col;
    Im2Col(fc.pool1.data(), c1, fc.p1_size, col);
    fc.relu2.resize(static_cast<std::size_t>(c2) * n1);
    MapMatrix out(fc.relu2.data(), c2, n1);
    out.noalias() = ConstMapMatrix(model.conv2_w.data(), c2, c1 * 9) * col;
    for (int k = 0; k < c2; ++k) {
      out.row(k).array() =
          (out.row(k).array() + model.conv2_b[k]).max(0.0);
    }
  }
  MaxPool2(fc.relu2, c2, fc.p1_size, fc.pool2, fc.arg2);
  fc.gap = GlobalAverage(fc.pool2, c2, fc.p2_size);
  fc.logits = Head(model, fc.gap);
  Softmax2(fc.logits, fc.probs);
}

ParamGradients MicroBackward(const MicroCnn& model, const ForwardCache& fc,
                             const std::array<double, 2>& dlogits) {
  ParamGradients g;
  MicroBackwardInto(model, fc, dlogits, g);
  return g;
}

void MicroBackwardInto(const MicroCnn& model, const ForwardCache& fc,
                       const std::array<double, 2>& dlogits,
                       ParamGradients& g) {
  const auto& cfg = model.config();
  const int c1 = cfg.conv1_channels;
  const int c2 = cfg.conv2_channels;
  Scratch& scratch = LocalScratch();
  g.dense_w.resize(static_cast<std::size_t>(2) * c2);
  g.dense_b = {dlogits[0], dlogits[1]};
  std::vector<double> dgap(c2, 0.0);
  for (int c = 0; c < 2; ++c) {
    for (int k = 0; k < c2; ++k) {
      g.dense_w[c * c2 + k] = dlogits[c] * fc.gap[k];
      dgap[k] += model.dense_w[c * c2 + k] * dlogits[c];
    }
  }

  // Global average pool and max pool route gradient to the argmax cells.
  const int n1 = fc.p1_size * fc.p1_size;
  const int n2 = fc.p2_size * fc.p2_size;
  std::vector<double>& dconv2 = scratch.dconv2;
  dconv2.assign(static_cast<std::size_t>(c2) * n1, 0.0);
  for (int k = 0; k < c2; ++k) {
    const double v = dgap[k] / n2;
    for (int i = 0; i < n2; ++i) {
      const std::size_t o = static_cast<std::size_t>(k) * n2 + i;
      dconv2[fc.arg2[o]] += v;
    }
  }
  for (std::size_t i = 0; i < dconv2.size(); ++i) {
    if (fc.relu2[i] <= 0.0) dconv2[i] = 0.0;
  }

  RowMatrix& col2 = scratch.col;
  Im2Col(fc.pool1.data(), c1, fc.p1_size, col2);
  const ConstMapMatrix d2(dconv2.data(), c2, n1);
  g.conv2_w.resize(static_cast<std::size_t>(c2) * c1 * 9);
  MapMatrix(g.conv2_w.data(), c2, c1 * 9).noalias() = d2 * col2.transpose();
  g.conv2_b.resize(c2);
  for (int k = 0; k < c2; ++k) g.conv2_b[k] = d2.row(k).sum();

  RowMatrix& dcol2 = scratch.dcol;
  dcol2.noalias() = ConstMapMatrix(model.conv2_w.data(), c2, c1 * 9).transpose() * d2;
  std::vector<double>& dpool1 = scratch.dpool1;
  dpool1.assign(static_cast<std::size_t>(c1) * n1, 0.0);
  Col2ImAdd(dcol2, c1, fc.p1_size, dpool1.data());

  const int n0 = fc.in_size * fc.in_size;
  std::vector<double>& dconv1 = scratch.dconv1;
  dconv1.assign(static_cast<std::size_t>(c1) * n0, 0.0);
  for (std::size_t o = 0; o < dpool1.size(); ++o) dconv1[fc.arg1[o]] += dpool1[o];
  for (std::size_t i = 0; i < dconv1.size(); ++i) {
    if (fc.relu1[i] <= 0.0) dconv1[i] = 0.0;
  }
  RowMatrix& col1 = scratch.col;
  Im2Col(fc.input.data(), 1, fc.in_size, col1);
  const ConstMapMatrix d1(dconv1.data(), c1, n0);
  g.conv1_w.resize(static_cast<std::size_t>(c1) * 9);
  MapMatrix(g.conv1_w.data(), c1, 9).noalias() = d1 * col1.transpose();
  g.conv1_b.resize(c1);
  for (int k = 0; k < c1; ++k) g.conv1_b[k] = d1.row(k).sum();
}

ActivationBundle BundleFromCache(const MicroCnn& model, const ForwardCache& fc,
                                 Label target_class) {
  const int k = model.config().conv2_channels;
  const int side = fc.p2_size;
  const std::size_t n = static_cast<std::size_t>(side) * side;
  const int c = static_cast<int>(target_class);
  ActivationBundle b;
  b.channels = k;
  b.height = side;
  b.width = side;
  b.target_class = target_class;
  b.activations.resize(k * n);
  b.gradients.resize(k * n);
  for (int ch = 0; ch < k; ++ch) {
    // d logit_c / d A[ch](i, j) = dense_w[c][ch] / (H * W)
    const double g = model.dense_w[c * k + ch] / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      b.activations[ch * n + i] = static_cast<float>(fc.pool2[ch * n + i]);
      b.gradients[ch * n + i] = static_cast<float>(g);
    }
  }
  return b;
}

ActivationBundle MicroBackwardToConv(const MicroCnn& model,
                                     const GrayImage& image,
                                     Label target_class) {
  return BundleFromCache(model, MicroForward(model, image), target_class);
}

std::array<double, 2> LogitsFromActivations(const MicroCnn& model,
                                            const std::vector<double>& pool2) {
  const int k = model.config().conv2_channels;
  const int side = model.config().input_size / 4;
  if (pool2.size() != static_cast<std::size_t>(k) * side * side) {
    Fail(ErrorCode::kShapeMismatch, "activation tensor has the wrong size");
  }
  return Head(model, GlobalAverage(pool2, k, side));
}

Probabilities MicroCnn::PredictProba(const GrayImage& image) const {
  thread_local ForwardCache cache;
  MicroForwardInto(*this, image, cache);
  return cache.probs;
}

ActivationBundle MicroCnn::Bundle(const GrayImage& image,
                                  Label target_class) const {
  return MicroBackwardToConv(*this, image, target_class);
}

double CrossEntropy(const Probabilities& probs, Label label) {
  const double p = probs[static_cast<int>(label)];
  return -std::log(std::max(p, std::numeric_limits<double>::min()));
}

Label Argmax(const Probabilities& probs) {
  return probs[1] > probs[0] ? Label::kMalignant : Label::kBenign;
}

constexpr double kCalibrationFloor = 0.01;

MicroCnn CalibrateActivations(const MicroCnn& model,
                              const std::vector<LabeledSample>& dataset) {
  const int c1 = model.config().conv1_channels;
  const int c2 = model.config().conv2_channels;
  if (dataset.empty()) return model;
  std::vector<double> mean(c2, 0.0);
  ForwardCache fc;
  for (const auto& s : dataset) {
    MicroForwardInto(model, s.image, fc);
    for (int k = 0; k < c2; ++k) mean[k] += fc.gap[k];
  }
  double largest = 0.0;
  for (double& m : mean) {
    m /= static_cast<double>(dataset.size());
    largest = std::max(largest, m);
  }
  MicroCnn out = model;
  if (!(largest > 0.0)) return out;
  // Rarely firing channels would otherwise be blown up by tiny means.
  const double floor = kCalibrationFloor * largest;
  for (int k = 0; k < c2; ++k) {
    const double scale = std::max(mean[k], floor);
    // ReLU and max pooling commute with a positive scale.
    for (int i = 0; i < c1 * 9; ++i) out.conv2_w[k * c1 * 9 + i] /= scale;
    out.conv2_b[k] /= scale;
  }
  return out;
}

TrainResult TrainMicro(const MicroCnn& initial,
                       const std::vector<LabeledSample>& dataset,
                       const TrainConfig& config) {
  bool has[2] = {false, false};
  for (const auto& s : dataset) has[static_cast<int>(s.label)] = true;
  if (dataset.empty() || !has[0] || !has[1]) {
    Fail(ErrorCode::kEmptyDataset,
         "training needs a nonempty dataset containing both classes");
  }
  TrainResult result{initial, {}};
  MicroCnn& model = result.model;

  double initial_loss = 0.0;
  for (const auto& s : dataset) {
    initial_loss += CrossEntropy(MicroForward(model, s.image).probs, s.label);
  }
  result.loss_curve.push_back(initial_loss / dataset.size());

  Rng rng(config.seed);
  std::vector<std::size_t> order(dataset.size());
  ForwardCache fc;
  ParamGradients g;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.Shuffle(order);
    double total = 0.0;
    for (std::size_t idx : order) {
      const auto& s = dataset[idx];
      MicroForwardInto(model, s.image, fc);
      total += CrossEntropy(fc.probs, s.label);
      std::array<double, 2> dlogits = fc.probs;
      dlogits[static_cast<int>(s.label)] -= 1.0;
      MicroBackwardInto(model, fc, dlogits, g);
      auto step = [&](std::vector<double>& w, const std::vector<double>& dw) {
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= config.learning_rate * dw[i];
      };
      step(model.conv1_w, g.conv1_w);
      step(model.conv1_b, g.conv1_b);
      step(model.conv2_w, g.conv2_w);
      step(model.conv2_b, g.conv2_b);
      step(model.dense_w, g.dense_w);
      step(model.dense_b, g.dense_b);
    }
    result.loss_curve.push_back(total / dataset.size());
  }
  return result;
}

}  // namespace xaib::model
