/* Copyright 2026 The AutoLibra Engine Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Drives the installed-style CLI binary through the shell.

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun cli(const std::string& args) {
  const std::string cmd = std::string(AUTOLIBRA_CLI) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    ws_ = fs::temp_directory_path() /
          ("al-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(ws_);
  }
  void TearDown() override { fs::remove_all(ws_); }
  std::string w() const { return "-w " + ws_.string() + " --cassette-mode record "; }
  std::string fixture(const std::string& rel) const {
    return (fs::path(AUTOLIBRA_FIXTURE_DIR) / rel).string();
  }
  fs::path ws_;
};

TEST_F(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(cli("--help").code, 0);
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli(w() + "judge").code, 2);  // --metric-set is required
  EXPECT_EQ(cli(w() + "cluster").code, 2);
  EXPECT_EQ(cli(w() + "ingest").code, 2);
  EXPECT_EQ(cli(w() + "--cassette-mode sometimes report").code, 2);
  EXPECT_EQ(cli(w() + "frobnicate").code, 2);
}

TEST_F(Cli, RuntimeErrorsExitOne) {
  EXPECT_EQ(cli(w() + "report --run nope").code, 1);
  EXPECT_EQ(cli(w() + "ingest --trajectories /nonexistent.jsonl").code, 1);
  EXPECT_EQ(cli(w() + "split").code, 1);  // nothing to split
}

TEST_F(Cli, SplitIsReproducible) {
  ASSERT_EQ(cli(w() + "ingest --trajectories " + fixture("e2e/trajectories.jsonl")).code, 0);
  ASSERT_EQ(cli(w() + "--seed 4 split --fraction 0.25").code, 0);
  const std::string first = slurp(ws_ / "split.json");
  ASSERT_EQ(cli(w() + "--seed 4 split --fraction 0.25").code, 0);
  EXPECT_EQ(slurp(ws_ / "split.json"), first);
  auto j = nlohmann::json::parse(first);
  EXPECT_EQ(j["holdout"].size(), 3u);
}

TEST_F(Cli, OfflinePipelinePrintsJson) {
  ASSERT_EQ(cli(w() + "ingest --trajectories " + fixture("e2e/trajectories.jsonl") +
                " --feedback " + fixture("e2e/feedback.jsonl"))
                .code,
            0);
  ASSERT_EQ(cli(w() + "split").code, 0);
  ASSERT_EQ(cli(w() + "ground").code, 0);
  CliRun c = cli(w() + "cluster -n 3");
  ASSERT_EQ(c.code, 0);
  auto ms = nlohmann::json::parse(c.out);
  EXPECT_EQ(ms["metrics"].size(), 3u);
  const std::string id = ms["id"];
  CliRun j = cli(w() + "judge -m " + id + " --split train");
  ASSERT_EQ(j.code, 0);
  EXPECT_TRUE(nlohmann::json::parse(j.out).is_object());
  CliRun m = cli(w() + "metaeval -m " + id + " --split holdout");
  ASSERT_EQ(m.code, 0);
  EXPECT_EQ(nlohmann::json::parse(m.out)["split"], "holdout");
  CliRun r = cli(w() + "report");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["run_id"], "default");
}

}  // namespace
