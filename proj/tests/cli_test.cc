/*
 * Copyright 2026 The palml Authors.
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

// End-to-end checks that drive the palml binary.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "gtest/gtest.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream s(line);
  for (std::string cell; std::getline(s, cell, ',');) out.push_back(cell);
  return out;
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("palml_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    ASSERT_EQ(run("synth --out " + path("data.csv") + " --rows 400 --seed 3"), 0);
    ASSERT_EQ(run("synth --out " + path("big.csv") + " --rows 1152 --seed 4"), 0);
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static std::string path(const std::string& name) { return (dir_ / name).string(); }

  // Runs the CLI with stdout and stderr captured; returns the exit status.
  static int run(const std::string& args) {
    const std::string cmd = std::string(PALML_CLI_PATH) + " " + args + " >" +
                            path("stdout.txt") + " 2>" + path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  static std::string out() { return slurp(path("stdout.txt")); }
  static std::string err() { return slurp(path("stderr.txt")); }

  static std::string fast_classification(const std::string& out_dir, int seed = 11) {
    return "run --input " + path("data.csv") + " --out " + path(out_dir) +
           " --seed " + std::to_string(seed) + " --set model.n_estimators=15 --set cv.k=3 --set cv.repeats=1";
  }

  static fs::path dir_;
};

fs::path Cli::dir_;

TEST_F(Cli, SummarizeWritesCorrelationMatrix) {
  ASSERT_EQ(run("summarize --input " + path("data.csv") + " --out " + path("summary")), 0) << err();
  const auto rows = lines_of(dir_ / "summary" / "correlation.csv");
  ASSERT_EQ(rows.size(), 10u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = split(rows[i]);
    ASSERT_EQ(cells.size(), 10u);
    EXPECT_EQ(std::stod(cells[i]), 1.0) << rows[i];
  }
  const auto summary = nlohmann::json::parse(slurp(dir_ / "summary" / "summary.json"));
  EXPECT_EQ(summary.at("rows"), 400);
  EXPECT_EQ(summary.at("fields").size(), 9u);
}

TEST_F(Cli, ClassificationRunIsDeterministicAndComplete) {
  ASSERT_EQ(run(fast_classification("clf_a")), 0) << err();
  ASSERT_EQ(run(fast_classification("clf_b")), 0) << err();
  const fs::path a = dir_ / "clf_a";
  EXPECT_EQ(slurp(a / "metrics.json"), slurp(dir_ / "clf_b" / "metrics.json"));
  EXPECT_EQ(slurp(a / "model.json"), slurp(dir_ / "clf_b" / "model.json"));

  const auto confusion = lines_of(a / "confusion.csv");
  ASSERT_EQ(confusion.size(), 5u);
  EXPECT_EQ(confusion[0], "actual,none,weak,strong,complete");
  std::size_t total = 0;
  for (std::size_t i = 1; i < 5; ++i) {
    const auto cells = split(confusion[i]);
    ASSERT_EQ(cells.size(), 5u);
    for (std::size_t c = 1; c < 5; ++c) total += std::stoul(cells[c]);
  }
  EXPECT_EQ(total, 80u);
  EXPECT_EQ(lines_of(a / "pred_vs_actual.csv").size(), 81u);

  const auto metrics = nlohmann::json::parse(slurp(a / "metrics.json"));
  const double acc = metrics.at("test").at("accuracy");
  EXPECT_GT(acc, 0.25);
  EXPECT_LE(acc, 1.0);
  EXPECT_EQ(metrics.at("cv").at("result").at("folds").size(), 3u);
  for (const char* f : {"roc.csv", "importance.csv", "fitted_predictions.csv", "timing.json"}) {
    EXPECT_TRUE(fs::exists(a / f)) << f;
  }
  EXPECT_EQ(lines_of(a / "importance.csv").size(), 13u);
}

TEST_F(Cli, SeedChangesTheSplit) {
  ASSERT_EQ(run(fast_classification("clf_c", 12)), 0) << err();
  EXPECT_NE(slurp(dir_ / "clf_c" / "pred_vs_actual.csv"),
            slurp(dir_ / "clf_a" / "pred_vs_actual.csv"));
}

TEST_F(Cli, PredictReproducesFittedPredictions) {
  if (!fs::exists(dir_ / "clf_a" / "model.json")) {
    ASSERT_EQ(run(fast_classification("clf_a")), 0) << err();
  }
  const std::string model = path("clf_a/model.json");
  ASSERT_EQ(run("predict --model " + model + " --input " + path("data.csv")), 0) << err();
  EXPECT_EQ(out(), slurp(dir_ / "clf_a" / "fitted_predictions.csv"));
  const auto header = split(lines_of(dir_ / "clf_a" / "fitted_predictions.csv")[0]);
  EXPECT_EQ(header, (std::vector<std::string>{"row", "predicted_class", "label", "p_none",
                                               "p_weak", "p_strong", "p_complete"}));

  // Unknown liquid token: still predicts, warns on stderr.
  auto rows = lines_of(dir_ / "data.csv");
  {
    std::ofstream f(dir_ / "odd.csv");
    f << rows[0] << '\n';
    auto cells = split(rows[1]);
    cells[4] = "unheard_of_liquid";
    for (std::size_t i = 0; i < cells.size(); ++i) f << (i ? "," : "") << cells[i];
    f << '\n';
  }
  ASSERT_EQ(run("predict --model " + model + " --input " + path("odd.csv") + " --out " +
                path("odd_pred.csv")),
            0)
      << err();
  EXPECT_EQ(lines_of(dir_ / "odd_pred.csv").size(), 2u);
  EXPECT_NE(err().find("warning:"), std::string::npos);
  EXPECT_NE(err().find("unheard_of_liquid"), std::string::npos);

  // Empty input: empty output, success.
  { std::ofstream f(dir_ / "empty.csv"); }
  ASSERT_EQ(run("predict --model " + model + " --input " + path("empty.csv")), 0) << err();
  EXPECT_TRUE(out().empty());
}

TEST_F(Cli, RegressionRunWritesTestPredictions) {
  ASSERT_EQ(run("run --task regression --input " + path("big.csv") + " --out " + path("reg") +
                " --set model.n_estimators=10 --set model.max_depth=6 --set cv.k=3"),
            0)
      << err();
  const auto pva = lines_of(dir_ / "reg" / "pred_vs_actual.csv");
  ASSERT_EQ(pva.size(), 231u);
  EXPECT_EQ(pva[0], "row,actual,predicted");
  EXPECT_FALSE(fs::exists(dir_ / "reg" / "confusion.csv"));
  const auto metrics = nlohmann::json::parse(slurp(dir_ / "reg" / "metrics.json"));
  EXPECT_TRUE(metrics.at("test").contains("r2"));
  EXPECT_EQ(metrics.at("normalizer"), "robust");
}

TEST_F(Cli, FitOnAllChangesPreprocessing) {
  ASSERT_EQ(run(fast_classification("all") + " --fit-on-all"), 0) << err();
  const auto metrics = nlohmann::json::parse(slurp(dir_ / "all" / "metrics.json"));
  EXPECT_EQ(metrics.at("fit_on_all"), true);
  // Resampling happens before the split, so the split covers the balanced set.
  const auto& rows = metrics.at("rows");
  const std::size_t balanced = rows.at("train").get<std::size_t>() + rows.at("test").get<std::size_t>();
  EXPECT_GT(balanced, 400u);
  EXPECT_EQ(balanced % 4, 0u);
  ASSERT_TRUE(fs::exists(dir_ / "clf_a" / "model.json"));
  const auto a = nlohmann::json::parse(slurp(dir_ / "all" / "model.json")).at("preprocessor");
  const auto b = nlohmann::json::parse(slurp(dir_ / "clf_a" / "model.json")).at("preprocessor");
  EXPECT_NE(a, b);
}

TEST_F(Cli, TuneWritesHistory) {
  ASSERT_EQ(run("tune --input " + path("data.csv") + " --out " + path("tune") +
                " --set ga.generations=2 --set ga.population=4 --set ga.offspring=2 "
                "--set ga.cv_k=3 --set search.n_estimators=int:5:15 "
                "--set search.max_depth=int:2:6"),
            0)
      << err();
  EXPECT_EQ(lines_of(dir_ / "tune" / "history.csv").size(), 4u);
  const auto j = nlohmann::json::parse(slurp(dir_ / "tune" / "tune.json"));
  EXPECT_EQ(j.at("best_spec").at("algorithm"), "rf");
  EXPECT_GE(j.at("evaluations").get<int>(), 1);
}

TEST_F(Cli, ErrorsExitNonZeroWithMessage) {
  EXPECT_EQ(run("run --input " + path("nope.csv") + " --out " + path("x")), 1);
  EXPECT_NE(err().find("nope.csv"), std::string::npos);
  EXPECT_EQ(err().rfind("palml: ", 0), 0u);

  EXPECT_NE(run("run --input " + path("data.csv") + " --set bogus=1"), 0);
  EXPECT_NE(err().find("bogus"), std::string::npos);

  EXPECT_NE(run("predict --model " + path("data.csv") + " --input " + path("data.csv")), 0);
  EXPECT_NE(err().find("SchemaMismatch"), std::string::npos);

  EXPECT_NE(run("frobnicate"), 0);
}

}  // namespace
