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

// Command-line front end. Every subcommand is forwarded to the library's C
// interface as a JSON option object; the JSON result goes to stdout.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "xaib/xaib.h"

namespace {

using Json = nlohmann::json;

// Collects the flags given for one subcommand into a JSON object.
class Flags {
 public:
  explicit Flags(CLI::App* app) : app_(app) {}

  template <typename T>
  CLI::Option* Add(const std::string& flag, const std::string& key, const std::string& help,
                   bool required = false) {
    auto slot = std::make_shared<std::optional<T>>();
    CLI::Option* opt = app_->add_option(flag, *slot, help);
    if (required) opt->required();
    writers_.push_back([slot, key](Json& j) {
      if (*slot) j[key] = **slot;
    });
    return opt;
  }

  void AddBool(const std::string& flag, const std::string& key, const std::string& help) {
    auto slot = std::make_shared<std::optional<bool>>();
    app_->add_flag(flag, *slot, help);
    writers_.push_back([slot, key](Json& j) {
      if (*slot) j[key] = **slot;
    });
  }

  // --seed and --jobs are accepted everywhere.
  void AddCommon() {
    Add<std::uint64_t>("--seed", "seed", "Master seed");
    Add<int>("--jobs", "jobs", "Worker threads (0 reads XAIB_JOBS)");
  }

  Json ToJson() const {
    Json j = Json::object();
    for (const auto& w : writers_) w(j);
    return j;
  }

 private:
  CLI::App* app_;
  std::vector<std::function<void(Json&)>> writers_;
};

struct Command {
  std::string name;  // library command
  CLI::App* app;
  std::shared_ptr<Flags> flags;
};

int Run(const std::string& command, const Json& options) {
  char* result = nullptr;
  const xaib_status st = xaib_cmd_run(command.c_str(), options.dump().c_str(), &result);
  if (st != XAIB_OK) {
    std::cerr << "xaib " << command << ": " << xaib_status_name(st) << ": " << xaib_last_error()
              << "\n";
    return static_cast<int>(st) < 125 ? static_cast<int>(st) : 1;
  }
  std::cout << Json::parse(result).dump(2) << "\n";
  xaib_string_free(result);
  return 0;
}

int ValidateReportFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "xaib validate-report: cannot open " << path << "\n";
    return XAIB_ERR_MISSING_FILE;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  char* errors = nullptr;
  const xaib_status st = xaib_report_validate(ss.str().c_str(), &errors);
  if (st != XAIB_OK) {
    std::cerr << "xaib validate-report: " << xaib_status_name(st) << ": " << xaib_last_error()
              << "\n";
    return static_cast<int>(st);
  }
  const Json list = Json::parse(errors);
  xaib_string_free(errors);
  if (list.empty()) {
    std::cout << "report conforms to the schema\n";
    return 0;
  }
  for (const auto& e : list) std::cerr << e.get<std::string>() << "\n";
  return XAIB_ERR_CONFIG;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mammography explanation benchmark"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(xaib_version()));
  std::vector<Command> commands;
  auto add = [&](CLI::App* parent, const std::string& sub, const std::string& name,
                 const std::string& help) {
    CLI::App* a = parent->add_subcommand(sub, help);
    auto flags = std::make_shared<Flags>(a);
    flags->AddCommon();
    commands.push_back({name, a, flags});
    return flags;
  };

  auto synth = add(&app, "synth", "synth", "Write a synthetic lesion dataset");
  synth->Add<std::string>("--out-dir", "out_dir", "Output directory", true);
  synth->Add<int>("--count-per-class", "count_per_class", "Images per class");
  synth->Add<int>("--image-size", "image_size", "Image side in pixels");
  synth->Add<double>("--radius-min", "radius_min", "Smallest lesion radius");
  synth->Add<double>("--radius-max", "radius_max", "Largest lesion radius");
  synth->Add<double>("--text-probability", "text_probability", "Chance of a text block");
  synth->Add<double>("--line-probability", "line_probability", "Chance of a border line");

  auto pre = add(&app, "preprocess", "preprocess", "Clean, enhance and resize images");
  pre->Add<std::string>("--manifest", "manifest", "Dataset manifest or directory", true);
  pre->Add<std::string>("--out-dir", "out_dir", "Output directory", true);
  pre->Add<std::string>("--config", "config", "Run configuration (JSON)");

  auto split = add(&app, "split", "split", "Stratified train/test split");
  split->Add<std::string>("--manifest", "manifest", "Dataset manifest or directory", true);
  split->Add<std::string>("--out-dir", "out_dir", "Output directory", true);
  split->Add<double>("--ratio", "ratio", "Training fraction per class");
  split->Add<std::string>("--config", "config", "Run configuration (JSON)");

  auto aug = add(&app, "augment", "augment", "Expand a training set with the seven variants");
  aug->Add<std::string>("--manifest", "manifest", "Training manifest or directory", true);
  aug->Add<std::string>("--out-dir", "out_dir", "Output directory", true);

  auto train = add(&app, "train", "train", "Train the small CNN");
  train->Add<std::string>("--dataset", "dataset", "Dataset directory or manifest", true);
  train->Add<std::string>("--out", "out", "Model archive to write", true);
  train->Add<int>("--epochs", "epochs", "Training epochs");
  train->Add<double>("--learning-rate", "learning_rate", "SGD step size");
  train->AddBool("--calibrate,!--no-calibrate", "calibrate", "Rescale filters before training");
  train->Add<std::string>("--config", "config", "Run configuration (JSON)");

  auto expl = add(&app, "explain", "explain", "Explain one image");
  expl->Add<std::string>("--method", "method", "gradcam, lime or shap", true)
      ->check(CLI::IsMember({"gradcam", "lime", "shap"}));
  expl->Add<std::string>("--model", "model", "Model archive or activation-bundle sidecar", true);
  expl->Add<std::string>("--image", "image", "Grayscale PNG", true);
  expl->Add<std::string>("--out", "out_dir", "Output directory", true);
  expl->Add<std::string>("--target", "target", "benign, malignant or predicted");
  expl->Add<int>("--segments", "segments", "Superpixels");
  expl->Add<int>("--samples", "samples", "LIME samples");
  expl->Add<int>("--k", "k", "LIME features");
  expl->Add<int>("--permutations", "permutations", "Sampled Shapley permutations");
  expl->Add<std::string>("--config", "config", "Run configuration (JSON)");

  CLI::App* eval = app.add_subcommand("evaluate", "Score explanations");
  eval->require_subcommand(1);
  auto haus = add(eval, "hausdorff", "evaluate-hausdorff", "Directed Hausdorff against ROIs");
  haus->Add<std::string>("--masks-dir", "masks_dir", "Directory of <id>.mask.png", true);
  haus->Add<std::string>("--manifest", "manifest", "Manifest with ROIs", true);
  haus->Add<std::string>("--out-dir", "out_dir", "Output directory", true);
  haus->Add<std::string>("--method", "method", "Method label for the report");
  haus->Add<std::string>("--config", "config", "Run configuration (JSON)");
  auto stab = add(eval, "stability", "evaluate-stability", "Repeat an explainer on one image");
  stab->Add<std::string>("--method", "method", "gradcam, lime or shap", true);
  stab->Add<std::string>("--model", "model", "Model archive", true);
  stab->Add<std::string>("--image", "image", "Grayscale PNG", true);
  stab->Add<std::string>("--out-dir", "out_dir", "Output directory", true);
  stab->Add<int>("--runs", "runs", "Repetitions");
  stab->Add<int>("--segments", "segments", "Superpixels");
  stab->Add<std::string>("--config", "config", "Run configuration (JSON)");
  auto cons = add(eval, "consistency", "evaluate-consistency", "Grad-CAM on shifted copies");
  cons->Add<std::string>("--model", "model", "Model archive", true);
  cons->Add<std::string>("--manifest", "manifest", "Images to pair", true);
  cons->Add<std::string>("--out-dir", "out_dir", "Output directory", true);
  cons->Add<int>("--shift", "shift", "Horizontal shift in pixels");
  cons->Add<std::string>("--config", "config", "Run configuration (JSON)");

  auto all = add(&app, "run-all", "run-all", "Full pipeline and report");
  all->Add<std::string>("--config", "config", "Run configuration (JSON)");
  all->Add<std::string>("--manifest", "manifest", "Overrides paths.manifest");
  all->Add<std::string>("--out-dir", "out_dir", "Overrides paths.out_dir");

  std::string report_path;
  CLI::App* validate = app.add_subcommand("validate-report", "Check a report.json");
  validate->add_option("report", report_path, "Path to report.json")->required();

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) return ValidateReportFile(report_path);
  for (const auto& c : commands) {
    if (c.app->parsed()) return Run(c.name, c.flags->ToJson());
  }
  return 1;
}
