/*
 * Copyright 2026 The lungprep Authors.
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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "lungprep/batch.hpp"
#include "lungprep/config.hpp"
#include "lungprep/dicom.hpp"
#include "lungprep/error.hpp"
#include "lungprep/inflate3d.hpp"
#include "lungprep/lvol.hpp"
#include "lungprep/phantom.hpp"

using namespace lungprep;
namespace fs = std::filesystem;

namespace {

struct Invocation {
  int code;
  std::string out, err;
};

Invocation invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

RunConfig small_config() {
  RunConfig cfg;
  cfg.target_spacing_mm = 4.0;
  cfg.crop_size = {24, 40, 40};
  return cfg;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("config parse, serialize and validate") {
  const RunConfig d = parse_config("");
  CHECK(d == RunConfig{});
  const RunConfig c = parse_config(
      "# comment\n target_spacing_mm = 2.25\nwindow_lo_hu=-900\ncrop_depth = 64\ncrop_height=80\n"
      "crop_width = 96\nconnectivity = 26\nthreads = 3\nseed = 12345678901\n");
  CHECK(c.target_spacing_mm == 2.25);
  CHECK(c.window_lo_hu == -900);
  CHECK(c.crop_size == Dims{64, 80, 96});
  CHECK(c.connectivity == Connectivity::TwentySix);
  CHECK(c.seed == 12345678901ULL);
  CHECK(parse_config(serialize_config(c)) == c);
  CHECK_THROWS(parse_config("bogus = 1\n"));
  CHECK_THROWS(parse_config("target_spacing_mm = 0\n"));
  CHECK_THROWS(parse_config("window_lo_hu = 500\n"));
}

TEST_CASE("report echoes the config exactly") {
  RunReport r;
  r.config = small_config();
  r.config.air_threshold_hu = -400;
  r.config.threads = 4;
  r.cases.push_back({"a", CaseStatus::Ok, "", 1.5});
  r.cases.push_back({"b", CaseStatus::Error, "missing", 0.5});
  r.ok = 1;
  r.failed = 1;
  const std::string text = format_report(r);
  CHECK(config_from_report(text) == r.config);
  CHECK(text.find("case.1.status = error") != std::string::npos);
}

TEST_CASE("batch is thread-count invariant, isolates failures, and falls back on all-air input") {
  const fs::path root = fresh_dir("lungprep_batch_test");
  CohortOptions opt;
  opt.cases = 4;
  opt.dims = {32, 48, 48};
  opt.spacing = {5, 5, 5};
  opt.seed = 21;
  generate_cohort(opt, root / "cohort");

  // An all-air series and a missing directory join the manifest.
  HuVolume air({6, 20, 20}, {5, 2, 2}, std::int16_t{-1000});
  fs::create_directories(root / "cohort" / "air");
  const auto slices = volume_to_slices(air);
  for (std::size_t i = 0; i < slices.size(); ++i)
    write_file_bytes(root / "cohort" / "air" / ("s" + std::to_string(i) + ".dcm"), encode_dicom_slice(slices[i]));
  {
    std::ofstream m(root / "cohort" / "manifest.csv", std::ios::app);
    m << "air,air,0\nghost,nowhere,1\n";
  }
  const auto rows = read_manifest(root / "cohort" / "manifest.csv");
  REQUIRE(rows.size() == 6);

  RunConfig cfg = small_config();
  const auto r1 = preprocess_batch(rows, cfg, root / "t1");
  cfg.threads = 4;
  const auto r4 = preprocess_batch(rows, cfg, root / "t4");
  REQUIRE(r1.cases.size() == 6);
  CHECK(r1.ok == 4);
  CHECK(r1.fallback == 1);
  CHECK(r1.failed == 1);
  CHECK(r1.cases[4].status == CaseStatus::SegmentationFallback);
  CHECK(r1.cases[5].status == CaseStatus::Error);
  for (std::size_t i = 0; i < 6; ++i) CHECK(r1.cases[i].status == r4.cases[i].status);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto name = rows[i].case_id + ".lvol";
    CHECK(read_file_bytes(root / "t1" / name) == read_file_bytes(root / "t4" / name));
  }
  const auto fallback = std::get<PreprocessedTensor>(read_lvol(root / "t1" / "air.lvol"));
  CHECK(fallback.dims == cfg.crop_size);
  CHECK(!fs::exists(root / "t1" / "ghost.lvol"));

  CHECK_THROWS_AS(read_manifest(root / "absent.csv"), Error);
  fs::remove_all(root);
}

TEST_CASE("cli preprocess, eval, split and inflate") {
  const fs::path root = fresh_dir("lungprep_cli_test");
  auto p = invoke({"phantom", "--out", (root / "c").string(), "--cases", "8", "--size", "32", "--spacing", "6",
                   "--seed", "4"});
  REQUIRE(p.code == 0);

  std::ofstream(root / "cfg.txt") << "target_spacing_mm = 4\ncrop_depth = 16\ncrop_height = 16\ncrop_width = 16\n";
  auto pre = invoke({"preprocess", "--manifest", (root / "c" / "manifest.csv").string(), "--out",
                     (root / "out").string(), "--config", (root / "cfg.txt").string(), "--threads", "2"});
  CHECK(pre.code == 0);
  CHECK(fs::exists(root / "out" / "report.txt"));
  CHECK(fs::file_size(root / "out" / "case_0000.lvol") == 30 + 16 * 16 * 16);

  std::ofstream(root / "bad_manifest.csv") << "case_id,path,label\nx,missing_dir,0\n";
  CHECK(invoke({"preprocess", "--manifest", (root / "bad_manifest.csv").string(), "--out",
                (root / "out2").string()})
            .code == 1);
  CHECK(invoke({"preprocess", "--manifest", (root / "nope.csv").string(), "--out", (root / "o").string()}).code == 2);
  std::ofstream(root / "badcfg.txt") << "nonsense = 3\n";
  CHECK(invoke({"preprocess", "--manifest", (root / "c" / "manifest.csv").string(), "--out",
                (root / "o").string(), "--config", (root / "badcfg.txt").string()})
            .code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({}).code == 2);

  std::ofstream(root / "scores.csv") << "case_id,label,score\na,1,1\nb,0,0\nc,1,0.9\nd,0,0.2\n";
  auto ev = invoke({"eval", "--scores", (root / "scores.csv").string(), "--roc-out", (root / "roc.csv").string(),
                    "--buckets", "0.1,0.5"});
  CHECK(ev.code == 0);
  CHECK(ev.out.find("auc=1.0\n") != std::string::npos);
  CHECK(ev.out.find("accuracy=1.0\n") != std::string::npos);
  CHECK(fs::exists(root / "roc.csv"));

  {
    std::ofstream m(root / "big.csv");
    m << "case_id,path,label\n";
    for (int i = 0; i < 1493; ++i) m << "case_" << i << ",dir_" << i << "," << (i % 3 == 0) << "\n";
  }
  auto sp = invoke({"split", "--manifest", (root / "big.csv").string(), "--train-frac", "0.7", "--seed", "5",
                    "--out-train", (root / "train.csv").string(), "--out-test", (root / "test.csv").string()});
  CHECK(sp.code == 0);
  CHECK(count_lines(root / "train.csv") == 1045 + 1);
  CHECK(count_lines(root / "test.csv") == 448 + 1);
  CHECK(sp.out.find("train=1045") != std::string::npos);

  Kernel2D<float> k(3, 3, 2, 4);
  for (std::size_t i = 0; i < k.weights.size(); ++i) k.weights[i] = 0.01f * static_cast<float>(i) - 0.3f;
  k.bias = {0.5f, -0.25f, 0.0f, 1.0f};
  write_lvw(root / "k.lvw", k);
  CHECK(invoke({"inflate", "--in", (root / "k.lvw").string(), "--depth", "1", "--out", (root / "k1.lvw").string()})
            .code == 0);
  const auto in_bytes = read_file_bytes(root / "k.lvw");
  const auto out_bytes = read_file_bytes(root / "k1.lvw");
  // Same weights and bias; the header gains the kt = 1 dimension.
  const std::size_t payload = 4 * (k.weights.size() + k.bias.size());
  CHECK(std::equal(in_bytes.end() - payload, in_bytes.end(), out_bytes.end() - payload));
  CHECK(invoke({"inflate", "--in", (root / "k.lvw").string(), "--depth", "0", "--out", (root / "k0.lvw").string()})
            .code == 2);

  auto tr = invoke({"train-demo", "--features", (root / "c" / "features.csv").string(), "--epochs", "3", "--loss",
                    "focal", "--seed", "1", "--train-frac", "0.75"});
  CHECK(tr.code == 0);
  CHECK(tr.out.find("epoch=3") != std::string::npos);
  fs::remove_all(root);
}
