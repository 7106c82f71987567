// Copyright 2026 The hwnas Authors
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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hwnas/cli.hpp"
#include "hwnas/graph.hpp"
#include "hwnas/spaces.hpp"
#include "json.hpp"

namespace hwnas {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliRun {
  int code;
  std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hwnas_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Manifest, ContentHashIgnoresCreatedLines) {
  EXPECT_EQ(content_hash("{\n  \"a\": 1,\n  \"created\": \"x\"\n}\n"),
            content_hash("{\n  \"a\": 1,\n  \"created\": \"y\"\n}\n"));
  EXPECT_NE(content_hash("{\"a\": 1}"), content_hash("{\"a\": 2}"));
}

TEST_F(CliTest, ManifestRecordsRelativePathsAndReplaces) {
  save_text(path("a.txt"), "one");
  RunManifest m;
  m.record("lut", path("a.txt"), dir_.string());
  save_text(path("a.txt"), "two");
  m.record("lut", path("a.txt"), dir_.string());
  ASSERT_EQ(m.artifacts.size(), 1u);
  EXPECT_EQ(m.artifacts[0].path, "a.txt");
  EXPECT_EQ(m.artifacts[0].sha256, content_hash("two"));
  const RunManifest back = RunManifest::from_json(m.to_json());
  EXPECT_EQ(back.artifacts.size(), 1u);
  EXPECT_EQ(back.of_kind("lut").size(), 1u);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({}).code, kExitUsageError);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsageError);
  EXPECT_EQ(cli({"lut", "build", "--out", "x.lut.json"}).code, kExitUsageError);
  EXPECT_EQ(cli({"space", "--name", "nope"}).code, kExitUsageError);
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
}

TEST(Cli, ListsSpaces) {
  const CliRun r = cli({"space", "--list"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("toy-sr"), std::string::npos);
}

TEST_F(CliTest, OperationErrorExitsOneWithMessage) {
  save_text(path("bad.net.json"), "{\"format\": \"hwnas.net\"");
  const CliRun r = cli({"lint", "--net", path("bad.net.json")});
  EXPECT_EQ(r.code, kExitOperationError);
  EXPECT_EQ(r.err.rfind("error: ", 0), 0u) << r.err;
}

TEST_F(CliTest, LintWarningsExitThree) {
  const CompactNet net{.input_shape = {16, 8, 8}, .layers = {ops::conv(3, 1, 16, 24)}, .num_classes = 24};
  save_text(path("n.net.json"), serialize(net));
  EXPECT_EQ(cli({"lint", "--net", path("n.net.json")}).code, kExitLintWarnings);
  EXPECT_EQ(cli({"lint", "--net", path("n.net.json"), "--no-fail"}).code, kExitOk);
  const CliRun r = cli({"lint", "--net", path("n.net.json"), "--no-fail", "--out", path("lint.json")});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(json::parse(read_text(path("lint.json")))[0]["rule_id"], "VPU002");
}

TEST_F(CliTest, MissingLutEntryIsAnOperationError) {
  ASSERT_EQ(cli({"space", "--name", "toy-classification", "--out", path("s.net.json")}).code, 0);
  save_text(path("empty.lut.json"), read_text(path("s.net.json")));
  const CliRun r = cli({"search", "run", "--net", path("s.net.json"), "--lut", path("empty.lut.json"), "--out",
                     path("a.arch.json")});
  EXPECT_EQ(r.code, kExitOperationError);
}

TEST_F(CliTest, FullPipelineWritesManifestAndReport) {
  const std::string net = path("space.net.json"), lut = path("space.lut.json"), arch = path("run.arch.json");
  const std::string derived = path("derived.net.json"), ckpt = path("derived.ckpt.json");
  const std::vector<std::string> data{"--samples", "80", "--data-seed", "3"};
  auto with = [&](std::vector<std::string> args, const std::vector<std::string>& extra) {
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
  };

  ASSERT_EQ(cli({"space", "--name", "toy-classification", "--out", net}).code, 0);
  ASSERT_EQ(cli({"lut", "build", "--net", net, "--out", lut, "--seed", "5"}).code, 0);
  const CliRun s = cli(with({"search", "run", "--net", net, "--lut", lut, "--out", arch, "--rounds", "2",
                          "--weight-steps", "2", "--arch-steps", "1", "--batch", "8", "--seed", "7"},
                         data));
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_TRUE(fs::exists(path("run.history.csv")));
  ASSERT_EQ(cli({"derive", "--net", net, "--arch", arch, "--out", derived}).code, 0);
  EXPECT_TRUE(validate(load_compact(derived)).ok());
  ASSERT_EQ(cli(with({"train-compact", "--net", derived, "--out", ckpt, "--epochs", "1"}, data)).code, 0);
  const CliRun e = cli(with({"eval", "--net", derived, "--checkpoint", ckpt, "--lut", lut, "--out",
                          path("metrics.json"), "--json"},
                         data));
  ASSERT_EQ(e.code, 0) << e.err;
  const json metrics = json::parse(read_text(path("metrics.json")));
  EXPECT_EQ(metrics["quality_name"], "accuracy");
  EXPECT_GT(metrics["latency_ms"].get<double>(), 0.0);
  ASSERT_EQ(cli({"calibrate", "--net", net, "--lut", lut, "--out", path("cal.csv"), "--count", "5"}).code, 0);

  const RunManifest m = RunManifest::load_or_empty(path("manifest.json"));
  EXPECT_EQ(m.runs.size(), 7u);
  for (const char* kind : {"supernet", "lut", "arch", "history", "derived_net", "checkpoint", "metrics",
                           "calibration"}) {
    ASSERT_EQ(m.of_kind(kind).size(), 1u) << kind;
    const ManifestArtifact a = m.of_kind(kind)[0];
    EXPECT_EQ(a.sha256, content_hash(read_text(path(a.path)))) << kind;
  }
  EXPECT_EQ(m.runs[2].command, "search run");
  EXPECT_EQ(m.runs[2].seed, 7u);

  const CliRun rep = cli({"report", "--manifest", path("manifest.json"), "--out-dir", path("report")});
  ASSERT_EQ(rep.code, 0) << rep.err;
  for (const char* f : {"calibration.svg", "frontier.csv", "frontier.svg", "report.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "report" / f)) << f;
  }
  EXPECT_NE(read_text(path("report/calibration.svg")).find("<svg"), std::string::npos);
  const json report = json::parse(read_text(path("report/report.json")));
  EXPECT_EQ(report["format"], "hwnas.report");
}

TEST_F(CliTest, SearchIsReproducible) {
  const std::string net = path("s.net.json"), lut = path("s.lut.json");
  ASSERT_EQ(cli({"space", "--name", "toy-classification", "--out", net}).code, 0);
  ASSERT_EQ(cli({"lut", "build", "--net", net, "--out", lut}).code, 0);
  for (const char* name : {"a", "b"}) {
    ASSERT_EQ(cli({"search", "run", "--net", net, "--lut", lut, "--out", path(std::string(name) + ".arch.json"),
                   "--rounds", "2", "--weight-steps", "2", "--arch-steps", "1", "--samples", "60"})
                  .code,
              0);
  }
  EXPECT_EQ(read_text(path("a.history.csv")), read_text(path("b.history.csv")));
  EXPECT_EQ(read_text(path("a.arch.json")), read_text(path("b.arch.json")));
}

}  // namespace
}  // namespace hwnas
