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
#include <map>

#include "internal.hpp"
#include "xaib/augment.hpp"
#include "xaib/image_io.hpp"

namespace xaib::app {

namespace fs = std::filesystem;
using detail::Explanation;
using detail::Number;

namespace {

// Runs one stage, prefixing any failure with the stage name.
template <typename F>
auto Stage(const char* name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    Fail(e.code(), std::string("stage '") + name + "': " + e.what());
  } catch (const fs::filesystem_error& e) {
    Fail(ErrorCode::kIo, std::string("stage '") + name + "': " + e.what());
  } catch (const std::bad_alloc&) {
    throw;
  } catch (const std::exception& e) {
    Fail(ErrorCode::kInternal, std::string("stage '") + name + "': " + e.what());
  }
}

double Accuracy(const model::MicroCnn& m, const std::vector<LabeledSample>& set, int jobs) {
  if (set.empty()) return 0.0;
  std::vector<std::uint8_t> hit(set.size(), 0);
  ParallelFor(set.size(), jobs, [&](std::size_t i) {
    hit[i] = model::Argmax(m.PredictProba(set[i].image)) == set[i].label;
  });
  return static_cast<double>(std::count(hit.begin(), hit.end(), 1)) / set.size();
}

Json Ids(const std::vector<LabeledSample>& set) {
  Json out = Json::array();
  for (const auto& s : set) out.push_back(s.id);
  return out;
}

struct SampleResult {
  Label predicted = Label::kBenign;
  model::Probabilities probs{};
  std::optional<Explanation> gradcam, lime, shap;
  std::string lime_status = "ok";
};

bool SameHeatmaps(const std::vector<Heatmap>& maps) {
  for (const auto& m : maps) {
    if (!(m == maps.front())) return false;
  }
  return true;
}

}  // namespace

Json RunAll(const RunConfig& config) {
  config.Validate();
  const int jobs = ResolveJobs(config.jobs);
  const std::uint64_t master = config.master_seed;
  if (config.paths.manifest.empty()) {
    Fail(ErrorCode::kConfig, "paths.manifest is not set");
  }
  const fs::path out_dir(config.paths.out_dir);
  Json stages = Json::object();

  // ingest
  const auto samples = Stage("ingest", [&] { return Ingest(config.paths.manifest); });
  {
    int benign = 0, with_roi = 0;
    for (const auto& s : samples) {
      benign += s.label == Label::kBenign;
      with_roi += s.roi.has_value();
    }
    stages["ingest"] = {{"manifest", config.paths.manifest},
                        {"samples", samples.size()},
                        {"benign", benign},
                        {"malignant", static_cast<int>(samples.size()) - benign},
                        {"with_roi", with_roi}};
  }

  // preprocess
  std::vector<LabeledSample> processed;
  Stage("preprocess", [&] {
    std::vector<std::optional<LabeledSample>> slots(samples.size());
    std::vector<preprocess::StageLog> logs(samples.size());
    ParallelFor(samples.size(), jobs, [&](std::size_t i) {
      const auto& s = samples[i];
      auto r = preprocess::RunPipeline(s.image, config.preprocess);
      std::optional<BinaryMask> roi;
      if (s.roi) roi = preprocess::ResizeMask(*s.roi, r.image.shape());
      logs[i] = r.log;
      slots[i] = LabeledSample{s.id, std::move(r.image), s.label, std::move(roi)};
    });
    std::size_t artifacts = 0, lines = 0, gamma = 0, clahe = 0;
    for (const auto& l : logs) {
      artifacts += l.artifacts_zeroed;
      lines += l.line_pixels_zeroed;
      gamma += l.gamma_changed;
      clahe += l.clahe_changed;
    }
    for (auto& s : slots) processed.push_back(std::move(*s));
    stages["preprocess"] = {{"images", processed.size()},
                            {"artifact_pixels_zeroed", artifacts},
                            {"line_pixels_zeroed", lines},
                            {"gamma_pixels_changed", gamma},
                            {"clahe_pixels_changed", clahe},
                            {"output_size", {config.preprocess.target_height,
                                             config.preprocess.target_width}}};
  });

  // split
  const std::uint64_t split_seed = detail::StageSeed(master, "split");
  const auto split = Stage("split", [&] {
    return augment::StratifiedSplit(processed, config.split_ratio, split_seed);
  });
  auto test = split.test;
  std::sort(test.begin(), test.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  stages["split"] = {{"seed", split_seed},
                     {"ratio", config.split_ratio},
                     {"train", split.train.size()},
                     {"test", test.size()},
                     {"test_ids", Ids(test)}};

  // augment
  const auto train_set = Stage("augment", [&] { return augment::AugmentTrainingSet(split.train); });
  {
    std::size_t leaked = 0;
    std::map<std::string, int> test_ids;
    for (const auto& s : test) test_ids[s.id] = 1;
    for (const auto& s : train_set) leaked += test_ids.count(std::string(augment::ProvenanceId(s.id)));
    stages["augment"] = {{"originals", split.train.size()},
                         {"expanded", train_set.size()},
                         {"variants_per_image", augment::kAllKinds.size()},
                         {"test_ids_in_training_provenance", leaked}};
  }

  // train
  const std::uint64_t init_seed = detail::StageSeed(master, "init");
  const std::uint64_t train_seed = detail::StageSeed(master, "train");
  model::MicroCnn net = Stage("train", [&] {
    model::MicroCnnConfig mc;
    mc.input_size = config.preprocess.target_height;
    model::MicroCnn init = model::MicroCnn::HeInit(mc, init_seed);
    if (config.train.calibrate) init = model::CalibrateActivations(init, train_set);
    model::TrainConfig tc;
    tc.epochs = config.train.epochs;
    tc.learning_rate = config.train.learning_rate;
    tc.seed = train_seed;
    auto result = model::TrainMicro(init, train_set, tc);
    model::SaveModel(result.model, out_dir / "model.xmdl");
    Json curve = Json::array();
    for (double l : result.loss_curve) curve.push_back(Number(l));
    stages["train"] = {{"init_seed", init_seed},
                       {"shuffle_seed", train_seed},
                       {"epochs", config.train.epochs},
                       {"learning_rate", config.train.learning_rate},
                       {"calibrated", config.train.calibrate},
                       {"loss_curve", curve},
                       {"train_accuracy", Accuracy(result.model, split.train, jobs)},
                       {"test_accuracy", Accuracy(result.model, test, jobs)},
                       {"model", "model.xmdl"}};
    return result.model;
  });

  // explain
  std::vector<LabeledSample> explained = test;
  if (config.evaluation.max_explained > 0 &&
      explained.size() > static_cast<std::size_t>(config.evaluation.max_explained)) {
    explained.erase(explained.begin() + config.evaluation.max_explained, explained.end());
  }
  std::vector<SampleResult> results(explained.size());
  Stage("explain", [&] {
    // Samples fan out; each explainer then runs on one thread.
    ParallelFor(explained.size(), jobs, [&](std::size_t i) {
      const auto& s = explained[i];
      SampleResult& r = results[i];
      r.probs = net.PredictProba(s.image);
      r.predicted = model::Argmax(r.probs);
      r.gradcam = detail::ExplainGradCam(net, s.image, r.predicted, config.mask);
      const std::uint64_t lime_seed = DeriveSeed(master, "lime/" + s.id, 0);
      try {
        r.lime = detail::ExplainLime(net, s.image, r.predicted, config, lime_seed, 1);
      } catch (const Error& e) {
        // A saturated classifier gives LIME nothing to fit; score it as empty.
        if (e.code() != ErrorCode::kDegenerateSamples) throw;
        r.lime_status = "degenerate_samples";
        const Shape sh = s.image.shape();
        r.lime = Explanation{
            .method = explain::Method::kLime,
            .target = r.predicted,
            .heatmap = Heatmap(sh.height, sh.width, std::vector<double>(sh.size(), 0.0)),
            .mask = BinaryMask::Empty(sh.height, sh.width),
            .attribution = explain::Attribution{.base_value = 0.0,
                                                .values = {},
                                                .target_class = r.predicted,
                                                .method = explain::Method::kLime,
                                                .selected = {},
                                                .seed = lime_seed}};
      }
      r.shap = detail::ExplainShap(net, s.image, r.predicted, config, config.shap.segments,
                                   DeriveSeed(master, "shap/" + s.id, 0), 1);
    });
    Json rows = Json::array();
    for (std::size_t i = 0; i < explained.size(); ++i) {
      const auto& s = explained[i];
      const auto& r = results[i];
      for (const Explanation* e : {&*r.gradcam, &*r.lime, &*r.shap}) {
        detail::SaveExplanation(*e, s.image, s.id, out_dir / "explanations" / e->MethodLabel());
      }
      rows.push_back({{"id", s.id},
                      {"label", std::string(LabelName(s.label))},
                      {"predicted", std::string(LabelName(r.predicted))},
                      {"probability", Number(r.probs[static_cast<int>(r.predicted)])},
                      {"gradcam_mask_pixels", r.gradcam->mask.Count()},
                      {"lime_seed", r.lime->attribution->seed},
                      {"lime_status", r.lime_status},
                      {"lime_selected", r.lime->attribution->selected},
                      {"lime_mask_pixels", r.lime->mask.Count()},
                      {"shap_method", std::string(explain::MethodName(r.shap->method))},
                      {"shap_seed", r.shap->attribution->seed},
                      {"shap_mask_pixels", r.shap->mask.Count()}});
    }
    stages["explain"] = {{"samples", rows},
                         {"lime_segments", config.lime.segments},
                         {"shap_segments", config.shap.segments}};
  });

  // hausdorff
  Json summary_means = Json::object();
  std::map<std::string, std::optional<double>> means;
  Stage("hausdorff", [&] {
    std::map<std::string, BinaryMask> rois;
    for (const auto& s : explained) {
      if (s.roi) rois.emplace(s.id, *s.roi);
    }
    std::vector<maskeval::HausdorffReport> reports;
    for (const char* method : {"gradcam", "lime", "shap"}) {
      std::vector<maskeval::ExplainedMask> masks;
      for (std::size_t i = 0; i < explained.size(); ++i) {
        const auto& r = results[i];
        const Explanation& e = method[0] == 'g' ? *r.gradcam : method[0] == 'l' ? *r.lime : *r.shap;
        masks.push_back({explained[i].id, e.mask});
      }
      reports.push_back(maskeval::BuildHausdorffReport(method, masks, rois));
    }
    Json j = Json::object();
    for (const auto& r : reports) {
      j[r.method] = detail::HausdorffJson(r);
      means[r.method] = r.scored > 0 ? std::optional<double>(r.mean) : std::nullopt;
      summary_means[r.method] = r.scored > 0 ? Number(r.mean) : Json(nullptr);
    }
    j["operand_order"] = "distance = directed(explanation mask, roi); reverse = directed(roi, explanation mask)";
    io::WriteText(out_dir / "hausdorff.csv", maskeval::HausdorffCsv(reports));
    stages["hausdorff"] = j;
  });

  // stability
  Json stability_flags = Json::object();
  Stage("stability", [&] {
    if (explained.empty()) Fail(ErrorCode::kEmptyDataset, "no test sample to probe");
    const auto& s = explained.front();
    const Label target = results.front().predicted;
    std::vector<std::uint64_t> seeds;
    for (int r = 0; r < config.evaluation.stability_runs; ++r) {
      seeds.push_back(DeriveSeed(master, "stability/" + s.id, static_cast<std::uint64_t>(r)));
    }
    std::vector<Heatmap> gradcam_maps;
    const auto gradcam = maskeval::StabilityEval(
        [&](std::uint64_t) {
          auto e = detail::ExplainGradCam(net, s.image, target, config.mask);
          gradcam_maps.push_back(e.heatmap);
          return e.mask;
        },
        seeds);
    const auto lime = maskeval::StabilityEval(
        [&](std::uint64_t seed) {
          return detail::ExplainLime(net, s.image, target, config, seed, jobs).mask;
        },
        seeds);
    std::vector<std::vector<double>> shap_values;
    const auto shap = maskeval::StabilityEval(
        [&](std::uint64_t seed) {
          auto e = detail::ExplainShap(net, s.image, target, config,
                                       config.evaluation.stability_shap_segments, seed, jobs);
          shap_values.push_back(e.attribution->values);
          return e.mask;
        },
        seeds);
    const bool shap_bitwise = std::all_of(shap_values.begin(), shap_values.end(),
                                          [&](const auto& v) { return v == shap_values.front(); });
    Json g = detail::StabilityJson(gradcam);
    g["bitwise_identical"] = SameHeatmaps(gradcam_maps);
    Json l = detail::StabilityJson(lime);
    Json x = detail::StabilityJson(shap);
    x["bitwise_identical"] = shap_bitwise;
    x["segments"] = config.evaluation.stability_shap_segments;
    stages["stability"] = {{"sample", s.id}, {"gradcam", g}, {"lime", l}, {"shap_exact", x}};
    auto flag = [](const maskeval::StabilityReport& r) {
      return r.deterministic ? "deterministic" : "nondeterministic";
    };
    stability_flags = {{"gradcam", flag(gradcam)}, {"lime", flag(lime)}, {"shap_exact", flag(shap)}};
  });

  // consistency
  if (config.evaluation.consistency) {
    Stage("consistency", [&] {
      std::vector<maskeval::ImagePair> pairs;
      for (const auto& s : explained) {
        pairs.push_back({s.id, s.image, s.id + "__shift1", detail::ShiftRight(s.image, 1)});
      }
      const auto entries = maskeval::ConsistencyEval(pairs, [&](const GrayImage& img) {
        const Label target = model::Argmax(net.PredictProba(img));
        return detail::ExplainGradCam(net, img, target, config.mask).mask;
      });
      Json j = detail::ConsistencyJson(entries);
      j["method"] = "gradcam";
      j["perturbation"] = "1-pixel horizontal shift";
      stages["consistency"] = j;
    });
  }

  Json config_echo = RunConfigToJson(config);
  config_echo.erase("jobs");  // scheduling never changes results
  Json summary = {{"test_accuracy", stages["train"]["test_accuracy"]},
                  {"mean_hausdorff", summary_means},
                  {"stability", stability_flags}};
  if (means["gradcam"] && means["lime"]) {
    summary["gradcam_below_lime"] = *means["gradcam"] < *means["lime"];
  } else {
    summary["gradcam_below_lime"] = nullptr;
  }
  Json report = {
      {"schema", std::string(kReportSchema)},
      {"schema_version", kReportSchemaVersion},
      {"xaib_version", std::string(kVersion)},
      {"config", config_echo},
      {"seeds",
       {{"master", master},
        {"split", split_seed},
        {"init", init_seed},
        {"train", train_seed},
        {"per_sample", "DeriveSeed(master, '<method>/<id>', run)"}}},
      {"stages", stages},
      {"summary", summary},
      {"reference",
       {{"note", "Full-scale mean Hausdorff values on the mammography corpus; not reproducible at this scale."},
        {"mean_hausdorff", {{"gradcam", 18}, {"lime", 86}}}}}};
  const auto errors = ValidateReport(report);
  if (!errors.empty()) Fail(ErrorCode::kInternal, "report failed schema validation: " + errors.front());
  io::WriteText(out_dir / "report.json", report.dump(2) + "\n");
  return report;
}

}  // namespace xaib::app
