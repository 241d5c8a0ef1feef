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

#include <atomic>
#include <cstdlib>
#include <filesystem>

#include "oracles.hpp"
#include "xaib/app.hpp"
#include "xaib/image_io.hpp"

using namespace xaib;
using namespace xaib::app;
namespace fs = std::filesystem;

namespace {

fs::path Scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("xaib_app_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::optional<ErrorCode> CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("config defaults survive a JSON round trip") {
  const RunConfig def;
  const Json j = RunConfigToJson(def);
  const RunConfig back = RunConfigFromJson(j);
  CHECK(RunConfigToJson(back) == j);
  CHECK(def.preprocess.gamma == 0.8);
  CHECK(def.split_ratio == 0.9);
  CHECK(def.mask.heatmap.tau == 0.5);
}

TEST_CASE("config rejects unknown keys with their full path") {
  try {
    RunConfigFromJson(Json::parse(R"({"lime": {"segmnts": 10}})"));
    FAIL("expected Config");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
    CHECK(std::string(e.what()).find("lime.segmnts") != std::string::npos);
  }
  CHECK(CodeOf([] { RunConfigFromJson(Json::parse(R"({"preprocess": {"gamma": "high"}})")); }) == ErrorCode::kConfig);
  CHECK(CodeOf([] { RunConfigFromJson(Json::parse(R"({"preprocess": {"gamma": -1}})")).Validate(); }) ==
        ErrorCode::kConfig);
  CHECK(CodeOf([] { RunConfigFromJson(Json::parse(R"({"mask": {"shap": {"rule": "selected"}}})")).Validate(); }) ==
        ErrorCode::kConfig);
  const RunConfig partial = RunConfigFromJson(Json::parse(R"({"master_seed": 9, "lime": {"k": 3}})"));
  CHECK(partial.master_seed == 9);
  CHECK(partial.lime.config.k == 3);
  CHECK(partial.lime.config.num_samples == RunConfig{}.lime.config.num_samples);
}

TEST_CASE("ingest merges rows, accepts label case and reports missing files") {
  const fs::path dir = Scratch("ingest");
  const GrayImage img = oracle::Disk(16, 16, 8, 8, 4, 0.6, 0.1);
  io::SaveGrayPng(img, dir / "a.png");
  io::SaveMaskPng(oracle::MaskFromPoints(16, 16, {{1, 1}}), dir / "r1.png");
  io::SaveMaskPng(oracle::MaskFromPoints(16, 16, {{2, 2}}), dir / "r2.png");
  io::WriteText(dir / "m.csv",
                "id,image_path,label,roi_path\nz,a.png,BENIGN,\na,a.png,Malignant,r1.png\na,a.png,malignant,r2.png\n");
  const auto s = Ingest(dir / "m.csv");
  REQUIRE(s.size() == 2);
  CHECK(s[0].id == "a");
  CHECK(s[0].label == Label::kMalignant);
  REQUIRE(s[0].roi.has_value());
  CHECK(s[0].roi->Count() == 2);
  CHECK(s[1].label == Label::kBenign);
  CHECK_FALSE(s[1].roi.has_value());

  io::WriteText(dir / "missing.csv", "id,image_path,label,roi_path\nq,nothere.png,benign,\n");
  try {
    Ingest(dir / "missing.csv");
    FAIL("expected MissingFile");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingFile);
    CHECK(std::string(e.what()).find("nothere.png") != std::string::npos);
  }
  io::WriteText(dir / "label.csv", "id,image_path,label,roi_path\nq,a.png,maybe,\n");
  CHECK(CodeOf([&] { Ingest(dir / "label.csv"); }) == ErrorCode::kBadLabel);
  io::SaveMaskPng(BinaryMask::Empty(4, 4), dir / "small.png");
  io::WriteText(dir / "dims.csv", "id,image_path,label,roi_path\nq,a.png,benign,small.png\n");
  CHECK(CodeOf([&] { Ingest(dir / "dims.csv"); }) == ErrorCode::kDimensionMismatch);
  CHECK(CodeOf([&] { Ingest(dir / "absent.csv"); }) == ErrorCode::kMissingFile);
}

TEST_CASE("dataset write then ingest round trips") {
  const fs::path dir = Scratch("dataset");
  std::vector<LabeledSample> in = {
      {"b1", oracle::Disk(8, 8, 4, 4, 2, 0.6, 0.0), Label::kBenign, oracle::MaskFromPoints(8, 8, {{4, 4}})},
      {"m1", GrayImage::Filled(8, 8, 0.2), Label::kMalignant, std::nullopt}};
  const fs::path manifest = WriteDataset(in, dir);
  const auto out = Ingest(manifest);
  REQUIRE(out.size() == 2);
  CHECK(out[0].image == in[0].image);
  CHECK(out[0].roi == in[0].roi);
  CHECK_FALSE(out[1].roi.has_value());
}

TEST_CASE("parallel for covers every index and rethrows") {
  for (int jobs : {1, 3}) {
    std::vector<int> hits(100, 0);
    ParallelFor(hits.size(), jobs, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) REQUIRE(h == 1);
    std::atomic<int> ran{0};
    CHECK_THROWS_AS(ParallelFor(10, jobs,
                                [&](std::size_t i) {
                                  ++ran;
                                  if (i == 4) Fail(ErrorCode::kIo, "boom");
                                }),
                    Error);
  }
  CHECK(ResolveJobs(3) == 3);
}

TEST_CASE("synth through the command dispatcher is deterministic") {
  const fs::path dir = Scratch("synth");
  const Json opts = {{"out_dir", (dir / "a").string()}, {"count_per_class", 2}, {"seed", 4}, {"image_size", 64},
                     {"radius_min", 8}, {"radius_max", 10}};
  const Json r = RunCommand("synth", opts);
  CHECK(r["images"] == 4);
  Json again = opts;
  again["out_dir"] = (dir / "b").string();
  RunCommand("synth", again);
  const auto a = Ingest(dir / "a" / "manifest.csv");
  const auto b = Ingest(dir / "b" / "manifest.csv");
  REQUIRE(a.size() == 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].image == b[i].image);
    CHECK(a[i].roi == b[i].roi);
  }
  int benign = 0;
  for (const auto& s : a) benign += s.label == Label::kBenign;
  CHECK(benign == 2);
}

TEST_CASE("command dispatcher errors") {
  CHECK(CodeOf([] { RunCommand("fly", Json::object()); }) == ErrorCode::kInvalidArgument);
  try {
    RunCommand("synth", {{"out_dir", "/tmp/x"}, {"colour", 1}});
    FAIL("expected Config");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
    CHECK(std::string(e.what()).find("colour") != std::string::npos);
  }
  CHECK(CodeOf([] { RunCommand("synth", Json::object()); }) == ErrorCode::kConfig);
  CHECK(CodeOf([] { RunCommand("preprocess", {{"manifest", "/no/such/manifest.csv"}, {"out_dir", "/tmp/x"}}); }) ==
        ErrorCode::kMissingFile);
}

TEST_CASE("report validator flags structural problems") {
  CHECK_FALSE(ValidateReport(Json::object()).empty());
  CHECK_FALSE(ValidateReport(Json::array()).empty());
  Json wrong_schema = {{"schema", "other"}, {"schema_version", 1}};
  const auto errors = ValidateReport(wrong_schema);
  CHECK_FALSE(errors.empty());
}
