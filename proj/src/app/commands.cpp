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
#include <set>

#include "internal.hpp"
#include "xaib/augment.hpp"
#include "xaib/image_io.hpp"
#include "xaib/synthetic.hpp"

namespace xaib::app {

namespace fs = std::filesystem;

namespace {

// Typed access to a command's option object; unknown keys are rejected.
class Options {
 public:
  Options(const Json& j, std::string command) : command_(std::move(command)) {
    if (j.is_null()) return;
    if (!j.is_object()) Fail(ErrorCode::kConfig, command_ + ": options must be a JSON object");
    j_ = j;
  }

  bool Has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_[key].is_null();
  }

  std::string Str(const std::string& key, std::string fallback = "") {
    if (!Has(key)) return fallback;
    if (!j_[key].is_string()) Bad(key, "a string");
    return j_[key].get<std::string>();
  }

  std::string Need(const std::string& key) {
    if (!Has(key)) Fail(ErrorCode::kConfig, command_ + ": missing required option '" + key + "'");
    return Str(key);
  }

  int Int(const std::string& key, int fallback) {
    if (!Has(key)) return fallback;
    if (!j_[key].is_number_integer()) Bad(key, "an integer");
    return j_[key].get<int>();
  }

  double Num(const std::string& key, double fallback) {
    if (!Has(key)) return fallback;
    if (!j_[key].is_number()) Bad(key, "a number");
    return j_[key].get<double>();
  }

  bool Bool(const std::string& key, bool fallback) {
    if (!Has(key)) return fallback;
    if (!j_[key].is_boolean()) Bad(key, "a boolean");
    return j_[key].get<bool>();
  }

  std::uint64_t Seed(const std::string& key, std::uint64_t fallback) {
    if (!Has(key)) return fallback;
    const Json& v = j_[key];
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      Bad(key, "a nonnegative integer");
    }
    return j_[key].get<std::uint64_t>();
  }

  void Finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) Fail(ErrorCode::kConfig, command_ + ": unknown option '" + key + "'");
    }
  }

 private:
  [[noreturn]] void Bad(const std::string& key, const char* what) const {
    Fail(ErrorCode::kConfig, command_ + ": option '" + key + "' must be " + what);
  }

  Json j_ = Json::object();
  std::string command_;
  std::set<std::string> seen_;
};

RunConfig BaseConfig(Options& o) {
  RunConfig c;
  const std::string path = o.Str("config");
  if (!path.empty()) c = LoadRunConfig(path);
  c.master_seed = o.Seed("seed", c.master_seed);
  c.jobs = o.Int("jobs", c.jobs);
  return c;
}

// A dataset directory (holding manifest.csv) or a manifest file.
fs::path ManifestPath(const std::string& p) {
  const fs::path path(p);
  if (fs::is_directory(path)) return path / "manifest.csv";
  return path;
}

Label ResolveTarget(const std::string& text, const model::MicroCnn* net, const GrayImage& image) {
  if (text.empty() || text == "predicted") {
    if (!net) Fail(ErrorCode::kConfig, "explain: a bundle needs no target; it carries its own");
    return model::Argmax(net->PredictProba(image));
  }
  return ParseLabel(text);
}

bool IsSidecar(const fs::path& p) { return p.extension() == ".json"; }

Json CmdSynth(Options& o) {
  synthetic::SyntheticSpec spec;
  const std::string out = o.Need("out_dir");
  spec.count_per_class = o.Int("count_per_class", spec.count_per_class);
  spec.image_size = o.Int("image_size", spec.image_size);
  spec.blob_radius_min = o.Num("radius_min", spec.blob_radius_min);
  spec.blob_radius_max = o.Num("radius_max", spec.blob_radius_max);
  spec.text_probability = o.Num("text_probability", spec.text_probability);
  spec.line_probability = o.Num("line_probability", spec.line_probability);
  spec.seed = o.Seed("seed", spec.seed);
  o.Int("jobs", 0);
  o.Finish();
  spec.Validate();
  const fs::path manifest = synthetic::WriteSynthetic(spec, out);
  return {{"manifest", manifest.string()}, {"images", 2 * spec.count_per_class}, {"seed", spec.seed}};
}

Json CmdPreprocess(Options& o) {
  const RunConfig c = BaseConfig(o);
  const fs::path manifest = ManifestPath(o.Need("manifest"));
  const fs::path out(o.Need("out_dir"));
  o.Finish();
  c.Validate();
  const int jobs = ResolveJobs(c.jobs);
  const auto samples = Ingest(manifest);
  std::vector<std::optional<LabeledSample>> processed(samples.size());
  std::vector<Json> logs(samples.size());
  ParallelFor(samples.size(), jobs, [&](std::size_t i) {
    const auto& s = samples[i];
    auto r = preprocess::RunPipeline(s.image, c.preprocess);
    std::optional<BinaryMask> roi;
    if (s.roi) roi = preprocess::ResizeMask(*s.roi, r.image.shape());
    logs[i] = {{"id", s.id},
               {"input_size", {r.log.input_shape.height, r.log.input_shape.width}},
               {"output_size", {r.log.output_shape.height, r.log.output_shape.width}},
               {"stages",
                {{"remove_artifacts", r.log.artifacts_zeroed},
                 {"remove_border_lines", r.log.line_pixels_zeroed},
                 {"gamma", r.log.gamma_changed},
                 {"clahe", r.log.clahe_changed}}}};
    processed[i] = LabeledSample{s.id, std::move(r.image), s.label, std::move(roi)};
  });
  std::vector<LabeledSample> flat;
  for (std::size_t i = 0; i < processed.size(); ++i) {
    flat.push_back(std::move(*processed[i]));
    io::WriteText(out / "logs" / (samples[i].id + ".json"), logs[i].dump(2) + "\n");
  }
  const fs::path written = WriteDataset(flat, out);
  return {{"manifest", written.string()}, {"images", flat.size()}};
}

Json CmdSplit(Options& o) {
  const RunConfig c = BaseConfig(o);
  const fs::path manifest = ManifestPath(o.Need("manifest"));
  const fs::path out(o.Need("out_dir"));
  const double ratio = o.Num("ratio", c.split_ratio);
  o.Finish();
  const std::uint64_t seed = detail::StageSeed(c.master_seed, "split");
  const auto split = augment::StratifiedSplit(Ingest(manifest), ratio, seed);
  auto ids = [](const std::vector<LabeledSample>& v) {
    Json a = Json::array();
    for (const auto& s : v) a.push_back(s.id);
    return a;
  };
  WriteDataset(split.train, out / "train");
  WriteDataset(split.test, out / "test");
  const Json summary = {{"seed", seed}, {"ratio", ratio},
                        {"train", ids(split.train)}, {"test", ids(split.test)}};
  io::WriteText(out / "split.json", summary.dump(2) + "\n");
  return {{"train_manifest", (out / "train" / "manifest.csv").string()},
          {"test_manifest", (out / "test" / "manifest.csv").string()},
          {"train", split.train.size()},
          {"test", split.test.size()},
          {"seed", seed}};
}

Json CmdAugment(Options& o) {
  const RunConfig c = BaseConfig(o);
  (void)c;
  const fs::path manifest = ManifestPath(o.Need("manifest"));
  const fs::path out(o.Need("out_dir"));
  o.Finish();
  const auto samples = Ingest(manifest);
  const auto expanded = augment::AugmentTrainingSet(samples);
  const fs::path written = WriteDataset(expanded, out);
  return {{"manifest", written.string()}, {"originals", samples.size()}, {"images", expanded.size()}};
}

Json CmdTrain(Options& o) {
  const RunConfig c = BaseConfig(o);
  const fs::path manifest = ManifestPath(o.Need("dataset"));
  const fs::path out(o.Need("out"));
  model::TrainConfig tc;
  tc.epochs = o.Int("epochs", c.train.epochs);
  tc.learning_rate = o.Num("learning_rate", c.train.learning_rate);
  const bool calibrate = o.Bool("calibrate", c.train.calibrate);
  o.Finish();
  if (tc.epochs < 0 || !(tc.learning_rate >= 0.0)) {
    Fail(ErrorCode::kConfig, "train: epochs and learning_rate must be nonnegative");
  }
  const auto samples = Ingest(manifest);
  if (samples.empty()) Fail(ErrorCode::kEmptyDataset, "train: dataset is empty");
  const Shape shape = samples.front().image.shape();
  if (shape.height != shape.width) Fail(ErrorCode::kNonSquare, "train: images must be square");
  for (const auto& s : samples) {
    if (s.image.shape() != shape) {
      Fail(ErrorCode::kDimensionMismatch, "train: image '" + s.id + "' differs in size from the first image");
    }
  }
  model::MicroCnnConfig mc;
  mc.input_size = shape.height;
  model::MicroCnn init = model::MicroCnn::HeInit(mc, detail::StageSeed(c.master_seed, "init"));
  if (calibrate) init = model::CalibrateActivations(init, samples);
  tc.seed = detail::StageSeed(c.master_seed, "train");
  const auto result = model::TrainMicro(init, samples, tc);
  model::SaveModel(result.model, out);
  int correct = 0;
  for (const auto& s : samples) correct += model::Argmax(result.model.PredictProba(s.image)) == s.label;
  return {{"model", out.string()},
          {"loss_curve", result.loss_curve},
          {"train_accuracy", static_cast<double>(correct) / samples.size()}};
}

Json CmdExplain(Options& o) {
  RunConfig c = BaseConfig(o);
  const std::string method = o.Need("method");
  const fs::path model_path(o.Need("model"));
  const fs::path image_path(o.Need("image"));
  const fs::path out(o.Need("out_dir"));
  const std::string target_text = o.Str("target");
  c.lime.segments = o.Int("segments", method == "lime" ? c.lime.segments : c.shap.segments);
  c.shap.segments = c.lime.segments;
  c.lime.config.num_samples = o.Int("samples", c.lime.config.num_samples);
  c.lime.config.k = o.Int("k", c.lime.config.k);
  c.shap.permutations = o.Int("permutations", c.shap.permutations);
  o.Finish();
  c.Validate();
  if (method != "gradcam" && method != "lime" && method != "shap") {
    Fail(ErrorCode::kConfig, "explain: method must be gradcam, lime or shap");
  }
  const int jobs = ResolveJobs(c.jobs);
  const GrayImage raw = io::LoadGrayPng(image_path);
  const std::string id = image_path.stem().string();

  std::optional<detail::Explanation> e;
  std::optional<GrayImage> image;
  if (IsSidecar(model_path)) {
    if (method != "gradcam") {
      Fail(ErrorCode::kConfig, "explain: an activation bundle only supports gradcam");
    }
    image = raw;
    e = detail::ExplainGradCamBundle(model::LoadBundle(model_path), raw.shape(), c.mask);
  } else {
    const model::MicroCnn net = model::LoadModel(model_path);
    image = detail::FitToModel(raw, net);
    const Label target = ResolveTarget(target_text, &net, *image);
    const std::uint64_t seed = DeriveSeed(c.master_seed, method + "/" + id, 0);
    if (method == "gradcam") {
      e = detail::ExplainGradCam(net, *image, target, c.mask);
    } else if (method == "lime") {
      e = detail::ExplainLime(net, *image, target, c, seed, jobs);
    } else {
      e = detail::ExplainShap(net, *image, target, c, c.shap.segments, seed, jobs);
    }
  }
  detail::SaveExplanation(*e, *image, id, out);
  Json result = {{"method", e->MethodLabel()},
                 {"target_class", std::string(LabelName(e->target))},
                 {"heatmap", (out / (id + ".heatmap.png")).string()},
                 {"overlay", (out / (id + ".overlay.png")).string()},
                 {"mask", (out / (id + ".mask.png")).string()},
                 {"mask_pixels", e->mask.Count()}};
  if (e->attribution) {
    result["attribution"] = (out / (id + ".attribution.json")).string();
    result["seed"] = e->attribution->seed;
  }
  return result;
}

Json CmdEvaluateHausdorff(Options& o) {
  const fs::path masks_dir(o.Need("masks_dir"));
  const fs::path manifest = ManifestPath(o.Need("manifest"));
  const fs::path out(o.Need("out_dir"));
  const std::string method = o.Str("method", "gradcam");
  o.Str("config");
  o.Seed("seed", 0);
  o.Int("jobs", 0);
  o.Finish();
  const auto samples = Ingest(manifest);
  std::map<std::string, BinaryMask> rois;
  std::vector<maskeval::ExplainedMask> masks;
  for (const auto& s : samples) {
    const fs::path mask_path = masks_dir / (s.id + ".mask.png");
    if (!fs::exists(mask_path)) continue;
    BinaryMask m = io::LoadMaskPng(mask_path);
    if (s.roi) {
      rois.emplace(s.id, s.roi->shape() == m.shape() ? *s.roi : preprocess::ResizeMask(*s.roi, m.shape()));
    }
    masks.push_back({s.id, std::move(m)});
  }
  if (masks.empty()) {
    Fail(ErrorCode::kMissingFile, "evaluate hausdorff: no <id>.mask.png in " + masks_dir.string() +
                                      " matches the manifest");
  }
  const auto report = maskeval::BuildHausdorffReport(method, masks, rois);
  const Json j = detail::HausdorffJson(report);
  io::WriteText(out / "hausdorff.json", j.dump(2) + "\n");
  io::WriteText(out / "hausdorff.csv", maskeval::HausdorffCsv({report}));
  return {{"report", (out / "hausdorff.json").string()},
          {"csv", (out / "hausdorff.csv").string()},
          {"scored", report.scored},
          {"mean", report.scored > 0 ? detail::Number(report.mean) : Json(nullptr)}};
}

Json CmdEvaluateStability(Options& o) {
  RunConfig c = BaseConfig(o);
  const std::string method = o.Need("method");
  const model::MicroCnn net = model::LoadModel(o.Need("model"));
  const fs::path image_path(o.Need("image"));
  const fs::path out(o.Need("out_dir"));
  const int runs = o.Int("runs", c.evaluation.stability_runs);
  const int segments = o.Int("segments", method == "lime" ? c.lime.segments : c.evaluation.stability_shap_segments);
  o.Finish();
  c.Validate();
  const int jobs = ResolveJobs(c.jobs);
  const GrayImage image = detail::FitToModel(io::LoadGrayPng(image_path), net);
  const std::string id = image_path.stem().string();
  const Label target = model::Argmax(net.PredictProba(image));
  std::vector<std::uint64_t> seeds;
  for (int r = 0; r < runs; ++r) {
    seeds.push_back(DeriveSeed(c.master_seed, "stability/" + id, static_cast<std::uint64_t>(r)));
  }
  c.lime.segments = segments;
  maskeval::SeededMaskFn fn;
  if (method == "gradcam") {
    fn = [&](std::uint64_t) { return detail::ExplainGradCam(net, image, target, c.mask).mask; };
  } else if (method == "lime") {
    fn = [&](std::uint64_t s) { return detail::ExplainLime(net, image, target, c, s, jobs).mask; };
  } else if (method == "shap" || method == "shap_exact") {
    fn = [&](std::uint64_t s) { return detail::ExplainShap(net, image, target, c, segments, s, jobs).mask; };
  } else {
    Fail(ErrorCode::kConfig, "evaluate stability: method must be gradcam, lime or shap");
  }
  const auto report = maskeval::StabilityEval(fn, seeds);
  Json j = detail::StabilityJson(report);
  j["method"] = method;
  j["image"] = id;
  io::WriteText(out / "stability.json", j.dump(2) + "\n");
  return {{"report", (out / "stability.json").string()},
          {"deterministic", report.deterministic},
          {"distinct_masks", report.distinct_masks},
          {"mean_pairwise_iou", detail::Number(report.mean_pairwise_iou)}};
}

Json CmdEvaluateConsistency(Options& o) {
  const RunConfig c = BaseConfig(o);
  const model::MicroCnn net = model::LoadModel(o.Need("model"));
  const fs::path manifest = ManifestPath(o.Need("manifest"));
  const fs::path out(o.Need("out_dir"));
  const int shift = o.Int("shift", 1);
  o.Finish();
  std::vector<maskeval::ImagePair> pairs;
  for (const auto& s : Ingest(manifest)) {
    GrayImage img = detail::FitToModel(s.image, net);
    GrayImage moved = detail::ShiftRight(img, shift);
    pairs.push_back({s.id, std::move(img), s.id + "__shift" + std::to_string(shift), std::move(moved)});
  }
  const auto entries = maskeval::ConsistencyEval(pairs, [&](const GrayImage& img) {
    return detail::ExplainGradCam(net, img, model::Argmax(net.PredictProba(img)), c.mask).mask;
  });
  Json j = detail::ConsistencyJson(entries);
  j["method"] = "gradcam";
  j["shift"] = shift;
  io::WriteText(out / "consistency.json", j.dump(2) + "\n");
  return {{"report", (out / "consistency.json").string()}, {"pairs", entries.size()}, {"mean_iou", j["mean_iou"]}};
}

Json CmdRunAll(Options& o) {
  RunConfig c;
  const std::string path = o.Str("config");
  if (!path.empty()) c = LoadRunConfig(path);
  if (o.Has("seed")) c.master_seed = o.Seed("seed", c.master_seed);
  c.jobs = o.Int("jobs", c.jobs);
  c.paths.manifest = o.Str("manifest", c.paths.manifest);
  c.paths.out_dir = o.Str("out_dir", c.paths.out_dir);
  o.Finish();
  const Json report = RunAll(c);
  return {{"report", (fs::path(c.paths.out_dir) / "report.json").string()}, {"summary", report["summary"]}};
}

}  // namespace

Json RunCommand(std::string_view command, const Json& options) {
  const std::string name(command);
  Options o(options, name);
  if (name == "synth") return CmdSynth(o);
  if (name == "preprocess") return CmdPreprocess(o);
  if (name == "split") return CmdSplit(o);
  if (name == "augment") return CmdAugment(o);
  if (name == "train") return CmdTrain(o);
  if (name == "explain") return CmdExplain(o);
  if (name == "evaluate-hausdorff") return CmdEvaluateHausdorff(o);
  if (name == "evaluate-stability") return CmdEvaluateStability(o);
  if (name == "evaluate-consistency") return CmdEvaluateConsistency(o);
  if (name == "run-all") return CmdRunAll(o);
  Fail(ErrorCode::kInvalidArgument, "unknown command '" + name + "'");
}

}  // namespace xaib::app
