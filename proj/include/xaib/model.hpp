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

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "xaib/core.hpp"

namespace xaib::model {

using Probabilities = std::array<double, 2>;  // indexed by Label

// Final feature maps A (K x H x W) and the gradient of the target-class
// logit with respect to them. Values are single precision so that a bundle
// survives the XTEN round trip bit for bit.
struct ActivationBundle {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<float> activations;
  std::vector<float> gradients;
  Label target_class = Label::kBenign;

  // Throws kShapeMismatch / kOutOfRange (non-finite values).
  void Validate() const;
  friend bool operator==(const ActivationBundle&,
                         const ActivationBundle&) = default;
};

// Writes <stem>.activations.xten, <stem>.gradients.xten and the JSON
// sidecar at `sidecar`; the sidecar references the tensors by file name.
void SaveBundle(const ActivationBundle& bundle,
                const std::filesystem::path& sidecar);
ActivationBundle LoadBundle(const std::filesystem::path& sidecar);

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual Probabilities PredictProba(const GrayImage& image) const = 0;
};

class GradientProvider {
 public:
  virtual ~GradientProvider() = default;
  virtual ActivationBundle Bundle(const GrayImage& image,
                                  Label target_class) const = 0;
};

struct MicroCnnConfig {
  int input_size = 224;
  int conv1_channels = 8;
  int conv2_channels = 16;
};

// conv3x3(C1) -> ReLU -> maxpool2 -> conv3x3(C2) -> ReLU -> maxpool2 ->
// global average pool -> dense(2) -> softmax. Convolutions use zero
// "same" padding; pooling floors odd sizes.
class MicroCnn final : public Classifier, public GradientProvider {
 public:
  // All weights zero.
  explicit MicroCnn(MicroCnnConfig config = {});
  // He-uniform convolutions; the dense head starts at zero so that the two
  // class weight vectors stay exact negatives of each other under SGD.
  static MicroCnn HeInit(MicroCnnConfig config, std::uint64_t seed);

  const MicroCnnConfig& config() const { return config_; }

  // Conv weights are [out][in][3][3].
  std::vector<double> conv1_w, conv1_b, conv2_w, conv2_b;
  std::vector<double> dense_w;  // [2][C2]
  std::vector<double> dense_b;  // [2]

  struct ParamRef {
    std::string name;
    std::vector<double>* values;
    std::vector<std::uint64_t> dims;
  };
  std::vector<ParamRef> Parameters();
  std::vector<std::pair<std::string, const std::vector<double>*>>
  Parameters() const;

  Probabilities PredictProba(const GrayImage& image) const override;
  ActivationBundle Bundle(const GrayImage& image,
                          Label target_class) const override;

  friend bool operator==(const MicroCnn& a, const MicroCnn& b);

 private:
  MicroCnnConfig config_;
};

struct ForwardCache {
  int in_size = 0;    // input side
  int p1_size = 0;    // after first pool
  int p2_size = 0;    // after second pool
  std::vector<double> input;
  std::vector<double> relu1;        // C1 x in x in
  std::vector<double> pool1;        // C1 x p1 x p1
  std::vector<std::int32_t> arg1;   // flat index into relu1
  std::vector<double> relu2;        // C2 x p1 x p1
  std::vector<double> pool2;        // C2 x p2 x p2 (the Grad-CAM layer)
  std::vector<std::int32_t> arg2;   // flat index into relu2
  std::vector<double> gap;          // C2
  std::array<double, 2> logits{};
  Probabilities probs{};
};

// Throws kShapeMismatch unless the image is input_size x input_size.
ForwardCache MicroForward(const MicroCnn& model, const GrayImage& image);
// Same, reusing the buffers already held by `cache`.
void MicroForwardInto(const MicroCnn& model, const GrayImage& image,
                      ForwardCache& cache);

struct ParamGradients {
  std::vector<double> conv1_w, conv1_b, conv2_w, conv2_b, dense_w, dense_b;
};

// Backpropagates an arbitrary upstream gradient on the two logits.
ParamGradients MicroBackward(const MicroCnn& model, const ForwardCache& cache,
                             const std::array<double, 2>& dlogits);
void MicroBackwardInto(const MicroCnn& model, const ForwardCache& cache,
                       const std::array<double, 2>& dlogits,
                       ParamGradients& grads);

// Final-layer activations and d logit[target] / d A.
ActivationBundle MicroBackwardToConv(const MicroCnn& model,
                                     const GrayImage& image,
                                     Label target_class);
// Same, reusing a forward cache.
ActivationBundle BundleFromCache(const MicroCnn& model,
                                 const ForwardCache& cache,
                                 Label target_class);
// Logits recomputed from a (possibly perturbed) final-layer activation
// tensor in double precision; the head above the Grad-CAM layer.
std::array<double, 2> LogitsFromActivations(const MicroCnn& model,
                                            const std::vector<double>& pool2);

struct TrainConfig {
  int epochs = 30;
  double learning_rate = 0.01;
  std::uint64_t seed = 0;
};

struct TrainResult {
  MicroCnn model;
  // Entry 0 is the mean loss before training, then one mean per epoch.
  std::vector<double> loss_curve;
};

// Rescales each second-layer filter so that its pooled activation averages
// 1 over `dataset`. The divisor is floored at 1% of the largest channel mean
// so rarely firing channels are not amplified without bound.
MicroCnn CalibrateActivations(const MicroCnn& model,
                              const std::vector<LabeledSample>& dataset);

// Plain per-sample SGD on cross-entropy, shuffled each epoch with the seed.
// Throws kEmptyDataset when the set is empty or lacks one of the classes.
TrainResult TrainMicro(const MicroCnn& initial,
                       const std::vector<LabeledSample>& dataset,
                       const TrainConfig& config);

double CrossEntropy(const Probabilities& probs, Label label);
Label Argmax(const Probabilities& probs);

// Single-file archive: "XMDL", u32 version, u64 manifest length, JSON
// manifest, then one XTEN record per parameter tensor. Weights are stored as
// float32.
void SaveModel(const MicroCnn& model, const std::filesystem::path& path);
MicroCnn LoadModel(const std::filesystem::path& path);

}  // namespace xaib::model
