// Copyright 2026 The sofic-extract Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "sofic/harness/config.hpp"
#include "sofic/harness/experiment.hpp"
#include "sofic/harness/probabilistic.hpp"
#include "sofic/harness/report.hpp"
#include "sofic/serialize.hpp"

using namespace sofic;
using namespace sofic::harness;
using nlohmann::json;

namespace {

json lemma_doc() {
  return json::parse(R"({
    "name": "t", "group": "Z", "experiment": "lemma",
    "generator": {"kind": "genuine", "size": 60},
    "lemma": {"shape": "box", "size": 6, "l": ["-1", "1"], "lambda": 1e-6, "kappa": 0.3},
    "seed": 0
  })");
}

json pipeline_doc() {
  return json::parse(R"({
    "name": "p", "group": "Z", "experiment": "pipeline",
    "generator": {"kind": "genuine", "size": 64},
    "test_set": ["-1", "0", "1"], "epsilon": 0.5,
    "schedule": {"mode": "practical", "stages": 1, "kappa": 0.25, "eta_target": 0.25}
  })");
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("sofic_harness_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(Config, ParsesShippedConfigs) {
  for (const char* f : {"z200_lemma.json", "z200_lemma_noisy.json", "z512_pipeline.json"}) {
    const auto cfg = load_config(std::filesystem::path(SOFIC_SOURCE_DIR) / "configs" / f);
    EXPECT_FALSE(cfg.name.empty()) << f;
  }
  const auto cfg = parse_config(pipeline_doc());
  EXPECT_EQ(cfg.kind, ExperimentKind::pipeline);
  EXPECT_EQ(cfg.test_set.size(), 3u);
  EXPECT_EQ(cfg.schedule.stage_cap, 1u);
  EXPECT_EQ(cfg.report_dir, std::filesystem::path("reports/p"));
}

TEST(Config, RejectsMalformedFields) {
  auto expect_bad = [](json doc, const std::string& field) {
    try {
      parse_config(doc);
      ADD_FAILURE() << "accepted " << doc.dump();
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  json d = pipeline_doc();
  d["epsilon"] = "half";
  expect_bad(d, "epsilon");
  d = pipeline_doc();
  d["epsilon"] = 1.5;
  expect_bad(d, "epsilon");
  d = pipeline_doc();
  d["surprise"] = 1;
  expect_bad(d, "surprise");
  d = pipeline_doc();
  d["schedule"]["mode"] = "theoretical";
  expect_bad(d, "schedule.mode");
  d = pipeline_doc();
  d["generator"]["noise"] = 0.1;
  expect_bad(d, "generator.noise");
  d = pipeline_doc();
  d["generator"]["kind"] = "noisy";
  expect_bad(d, "generator.noise");
  d = pipeline_doc();
  d["generator"]["size"] = 100000;
  expect_bad(d, "generator.size");
  d = pipeline_doc();
  d["test_set"] = json::array({1, 2});
  expect_bad(d, "test_set");
  d = pipeline_doc();
  d["group"] = "Q8";
  expect_bad(d, "group");
  d = lemma_doc();
  d["lemma"]["shape"] = "ball";
  expect_bad(d, "lemma.shape");
  d = lemma_doc();
  d["schedule"] = pipeline_doc()["schedule"];
  expect_bad(d, "schedule");
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Serialize, NumbersRoundTrip) {
  for (double x : {0.0, -1.5, 1e-300, 123456789.125}) {
    EXPECT_EQ(serialize::parse_number(serialize::number(x)), x);
  }
  EXPECT_EQ(serialize::number(std::numeric_limits<double>::infinity()), json("inf"));
  EXPECT_EQ(serialize::number(-std::numeric_limits<double>::infinity()), json("-inf"));
  EXPECT_EQ(serialize::number(std::nan("")), json("nan"));
  EXPECT_TRUE(std::isinf(serialize::parse_number(json("inf"))));
  EXPECT_TRUE(std::isnan(serialize::parse_number(json("nan"))));
  EXPECT_THROW(serialize::parse_number(json("seven")), std::exception);
}

TEST(Serialize, MatricesElideAboveLimit) {
  const json small = serialize::matrix(Matrix::Identity(2, 2));
  EXPECT_FALSE(small.at("elided").get<bool>());
  EXPECT_EQ(small.at("data").size(), 4u);
  EXPECT_EQ(small.at("data")[3], json::array({1.0, 0.0}));
  const json big = serialize::matrix(Matrix::Identity(65, 65));
  EXPECT_TRUE(big.at("elided").get<bool>());
  EXPECT_FALSE(big.contains("data") && !big.at("data").empty());
  serialize::MatrixOptions dbg;
  dbg.debug = true;
  EXPECT_FALSE(serialize::matrix(Matrix::Identity(65, 65), dbg).at("elided").get<bool>());
}

TEST(Report, SummaryCsvHoldsAssertedChecksOnly) {
  CheckList cl;
  cl.le("a", 0.5, 1.0);
  cl.le("b", 2.0, 1.0, false);
  cl.skip("c", "not applicable");
  cl.ge("d", 0.1, 0.2);
  const std::string csv = summary_csv(cl);
  EXPECT_EQ(csv, "name,lhs,rhs,pass\na,0.5,1,true\nd,0.10000000000000001,0.20000000000000001,false\n");
}

TEST(Report, DirectoryPrecedence) {
  ::unsetenv(kReportDirEnv);
  EXPECT_EQ(resolve_report_dir("cfg", std::nullopt), std::filesystem::path("cfg"));
  ::setenv(kReportDirEnv, "/tmp/from_env", 1);
  EXPECT_EQ(resolve_report_dir("cfg", std::nullopt), std::filesystem::path("/tmp/from_env"));
  EXPECT_EQ(resolve_report_dir("cfg", std::filesystem::path("flag")), std::filesystem::path("flag"));
  ::unsetenv(kReportDirEnv);
}

TEST(Experiment, LemmaRunWritesReport) {
  const auto dir = scratch("lemma");
  RunOptions opt;
  opt.report_dir = dir;
  const RunResult r = run_experiment(parse_config(lemma_doc()), opt);
  EXPECT_EQ(r.exit_code, kExitOk) << r.message;
  EXPECT_TRUE(std::filesystem::exists(dir / "report.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.csv"));
  const json rep = json::parse(read_file(dir / "report.json"));
  EXPECT_TRUE(rep.contains("covered_fraction"));
  EXPECT_EQ(rep.at("exit_code"), 0);
  EXPECT_EQ(rep.at("experiment"), "lemma");
  std::filesystem::remove_all(dir);
}

TEST(Experiment, PipelineReportIsByteIdenticalOnRepeat) {
  const auto d1 = scratch("rep1"), d2 = scratch("rep2");
  const auto cfg = parse_config(pipeline_doc());
  RunOptions o1, o2;
  o1.report_dir = d1;
  o2.report_dir = d2;
  EXPECT_EQ(run_experiment(cfg, o1).exit_code, kExitOk);
  EXPECT_EQ(run_experiment(cfg, o2).exit_code, kExitOk);
  EXPECT_EQ(read_file(d1 / "report.json"), read_file(d2 / "report.json"));
  EXPECT_EQ(read_file(d1 / "summary.csv"), read_file(d2 / "summary.csv"));
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d2);
}

TEST(Experiment, DegenerateInputsExitThree) {
  RunOptions opt;
  opt.write = false;
  json small = pipeline_doc();
  small["generator"]["size"] = 4;
  const RunResult a = run_experiment(parse_config(small), opt);
  EXPECT_EQ(a.exit_code, kExitIncomplete) << a.message;
  EXPECT_FALSE(a.report.at("complete").get<bool>());

  json ident = pipeline_doc();
  ident["generator"]["kind"] = "identity";
  ident["max_sample_attempts"] = 50;
  const RunResult b = run_experiment(parse_config(ident), opt);
  EXPECT_EQ(b.exit_code, kExitIncomplete) << b.message;
}

TEST(Experiment, InputGenerators) {
  json d = pipeline_doc();
  d["generator"] = json{{"kind", "random_conjugated"}, {"size", 12}, {"noise", 0.01}, {"seed", 3}};
  const auto cfg = parse_config(d);
  const ElementSet sup = cfg.test_set;
  const auto alpha = make_input(cfg, sup);
  EXPECT_EQ(alpha.dim(), 12);
  for (const auto& g : sup) EXPECT_LE(unitarity_error(alpha.at(g)), 1e-10);
  const auto again = make_input(cfg, sup);
  for (const auto& g : sup) EXPECT_EQ(alpha.at(g), again.at(g));
}

TEST(Props, DimensionOneIsExact) {
  PropsOptions o;
  o.dims = {1};
  o.samples = kMinPropSamples;
  const PropsReport r = verify_probabilistic_props(o);
  ASSERT_EQ(r.dims.size(), 1u);
  EXPECT_NEAR(r.dims[0].mean, r.dims[0].hs_sq, 1e-12 * r.dims[0].hs_sq);
  EXPECT_LE(r.dims[0].std_error, 1e-10 * r.dims[0].hs_sq);
  EXPECT_TRUE(r.checks.all_asserted_pass());
}

TEST(Props, SmallBudgetIsRejected) {
  PropsOptions o;
  o.samples = 100;
  EXPECT_THROW(verify_probabilistic_props(o), std::invalid_argument);
  o.samples = kMinPropSamples;
  o.tail_c = {1.0};
  EXPECT_THROW(verify_probabilistic_props(o), std::invalid_argument);
}
