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

#include "palml/tune.h"

#include <atomic>
#include <cmath>
#include <map>
#include <stdexcept>

#include "gtest/gtest.h"
#include "test_util.h"

namespace palml {
namespace {

using testing::error_code_of;

SearchSpace forest_space() {
  SearchSpace s;
  s.task = Task::kClassification;
  s.algorithm = Algorithm::kRandomForest;
  s.genes = {parse_gene("n_estimators", "int:1:100"),
             parse_gene("max_features", "real:0.1:1.0"),
             parse_gene("max_depth", "choice:2,4,8")};
  return s;
}

TEST(Gene, ParsesDomains) {
  const Gene i = parse_gene("k", "int:1:9");
  EXPECT_EQ(i.kind, GeneKind::kInt);
  EXPECT_EQ(i.lo, 1.0);
  EXPECT_EQ(i.hi, 9.0);
  const Gene l = parse_gene("alpha", "log:0.001:10");
  EXPECT_EQ(l.kind, GeneKind::kLogReal);
  const Gene c = parse_gene("algorithm", "choice: rf, dt ,knn");
  EXPECT_EQ(c.choices, (std::vector<std::string>{"rf", "dt", "knn"}));
  EXPECT_EQ(error_code_of([] { parse_gene("k", "int:1"); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(error_code_of([] { parse_gene("k", "normal:1:2"); }), ErrorCode::kInvalidConfig);
}

TEST(SearchSpace, ValidationRejectsBadDomains) {
  EXPECT_NO_THROW(validate(default_search_space(Task::kClassification)));
  EXPECT_NO_THROW(validate(default_search_space(Task::kRegression)));
  auto with = [](Gene g) {
    SearchSpace s = forest_space();
    s.genes.push_back(std::move(g));
    return s;
  };
  EXPECT_EQ(error_code_of([&] { validate(with(parse_gene("min_samples_leaf", "int:5:2"))); }),
            ErrorCode::kInvalidConfig);
  EXPECT_EQ(error_code_of([&] { validate(with(parse_gene("min_samples_leaf", "int:0:3"))); }),
            ErrorCode::kInvalidConfig);
  EXPECT_EQ(error_code_of([&] { validate(with(parse_gene("colour", "int:1:3"))); }),
            ErrorCode::kInvalidConfig);
  EXPECT_EQ(error_code_of([&] { validate(with(parse_gene("n_estimators", "int:1:3"))); }),
            ErrorCode::kInvalidConfig);
  EXPECT_EQ(error_code_of([&] { validate(with(parse_gene("algorithm", "choice:rf,ols"))); }),
            ErrorCode::kInvalidConfig);
}

TEST(SampleGenome, StaysInsideDomainsAndValidates) {
  const SearchSpace s = forest_space();
  Rng rng(1);
  for (int i = 0; i < 2000; ++i) {
    const Genome g = sample_genome(s, rng);
    ASSERT_GE(g[0], 1.0);
    ASSERT_LE(g[0], 100.0);
    ASSERT_EQ(g[0], std::floor(g[0]));
    ASSERT_GE(g[1], 0.1);
    ASSERT_LE(g[1], 1.0);
    ASSERT_LT(g[2], 3.0);
    ASSERT_NO_THROW(validate(to_model_spec(s, g, 0)));
  }
}

TEST(SampleGenome, IntegerGeneIsUniform) {
  SearchSpace s;
  s.genes = {parse_gene("n_estimators", "int:1:100")};
  Rng rng(2);
  std::vector<int> counts(101, 0);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) ++counts[static_cast<int>(sample_genome(s, rng)[0])];
  EXPECT_EQ(counts[0], 0);
  double chi2 = 0;
  for (int v = 1; v <= 100; ++v) chi2 += std::pow(counts[v] - 100.0, 2) / 100.0;
  // 99 degrees of freedom; 0.999 quantile is about 148.
  EXPECT_LT(chi2, 148.0);
  EXPECT_GT(counts[1], 0);
  EXPECT_GT(counts[100], 0);
}

TEST(SampleGenome, SingletonDomains) {
  SearchSpace s;
  s.genes = {parse_gene("n_estimators", "int:7:7"), parse_gene("max_features", "real:0.5:0.5"),
             parse_gene("max_depth", "choice:3")};
  Rng rng(3);
  const Genome g = sample_genome(s, rng);
  EXPECT_EQ(g, (Genome{7, 0.5, 0}));
  EXPECT_EQ(to_model_spec(s, g, 0).params.at("max_depth"), 3.0);
}

TEST(SampleGenome, LogGeneSpreadsOverDecades) {
  SearchSpace s;
  s.task = Task::kRegression;
  s.algorithm = Algorithm::kRidge;
  s.genes = {parse_gene("alpha", "log:0.001:1000")};
  Rng rng(4);
  int below_one = 0;
  for (int i = 0; i < 4000; ++i) below_one += sample_genome(s, rng)[0] < 1.0;
  EXPECT_NEAR(below_one / 4000.0, 0.5, 0.05);
}

TEST(ToModelSpec, AlgorithmGeneDropsForeignParams) {
  SearchSpace s;
  s.task = Task::kClassification;
  s.genes = {parse_gene("algorithm", "choice:rf,knn"), parse_gene("k", "int:1:9"),
             parse_gene("n_estimators", "int:5:10")};
  const ModelSpec knn = to_model_spec(s, Genome{1, 4, 6}, 9);
  EXPECT_EQ(knn.algorithm, Algorithm::kKnn);
  EXPECT_EQ(knn.params, (std::map<std::string, double>{{"k", 4}}));
  EXPECT_EQ(knn.seed, 9u);
  const ModelSpec rf = to_model_spec(s, Genome{0, 4, 6}, 9);
  EXPECT_EQ(rf.params, (std::map<std::string, double>{{"n_estimators", 6}}));
}

TEST(FitnessCache, EvaluatesEachGenomeOnce) {
  int calls = 0;
  FitnessCache cache([&](const Genome& g) {
    ++calls;
    if (g[0] < 0) throw std::runtime_error("bad");
    return g[0] * 2;
  });
  EXPECT_EQ(cache(Genome{3}), 6.0);
  EXPECT_EQ(cache(Genome{3}), 6.0);
  EXPECT_EQ(calls, 1);
  EXPECT_TRUE(cache.contains(Genome{3}));
  EXPECT_EQ(cache(Genome{-1}), -std::numeric_limits<double>::infinity());
  EXPECT_EQ(cache.evaluations(), 2u);
}

double peak_fitness(const Genome& g) {
  // Optimum at n_estimators 80; the other genes barely matter.
  return -std::abs(g[0] - 80.0) - 0.01 * g[1];
}

GaConfig small_ga(std::uint64_t seed) {
  GaConfig c;
  c.generations = 15;
  c.population = 20;
  c.offspring = 10;
  c.seed = seed;
  return c;
}

TEST(Evolve, HistoryIsMonotoneAndBudgeted) {
  const SearchSpace s = forest_space();
  std::atomic<int> calls{0};
  const GaConfig c = small_ga(5);
  const TuneResult r = evolve(s, c, [&](const Genome& g) {
    ++calls;
    return peak_fitness(g);
  });
  ASSERT_EQ(r.history.size(), c.generations + 1);
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    EXPECT_GE(r.history[i].best, r.history[i - 1].best);
    EXPECT_GE(r.history[i].evaluations, r.history[i - 1].evaluations);
  }
  EXPECT_LE(r.evaluations, c.population + c.generations * c.offspring);
  EXPECT_EQ(static_cast<std::size_t>(calls.load()), r.evaluations);
  EXPECT_EQ(r.best_fitness, r.history.back().best);
  EXPECT_EQ(r.best_fitness, peak_fitness(r.best_genome));
  EXPECT_NO_THROW(validate(r.best_spec));
}

TEST(Evolve, FindsDominantOptimum) {
  const SearchSpace s = forest_space();
  GaConfig c = small_ga(6);
  c.generations = 40;
  const TuneResult r = evolve(s, c, peak_fitness);
  EXPECT_NEAR(r.best_genome[0], 80.0, 3.0);
  // Better than the best of the initial population.
  EXPECT_GE(r.best_fitness, r.history.front().best);
}

TEST(Evolve, ReproducibleAndSeedSensitive) {
  const SearchSpace s = forest_space();
  const TuneResult a = evolve(s, small_ga(7), peak_fitness);
  const TuneResult b = evolve(s, small_ga(7), peak_fitness);
  const TuneResult c = evolve(s, small_ga(8), peak_fitness);
  EXPECT_EQ(a.best_genome, b.best_genome);
  EXPECT_EQ(a.evaluations, b.evaluations);
  EXPECT_NE(a.history.front().mean, c.history.front().mean);
}

TEST(Evolve, ZeroGenerationsReturnsInitialBest) {
  GaConfig c = small_ga(1);
  c.generations = 0;
  const TuneResult r = evolve(forest_space(), c, peak_fitness);
  EXPECT_EQ(r.history.size(), 1u);
  EXPECT_EQ(r.evaluations, r.history[0].evaluations);
  EXPECT_LE(r.evaluations, c.population);
}

TEST(Evolve, FailingFitnessScoresNegativeInfinity) {
  GaConfig c = small_ga(1);
  c.generations = 2;
  const TuneResult r = evolve(forest_space(), c, [](const Genome& g) -> double {
    if (g[0] > 50) throw std::runtime_error("boom");
    return g[0];
  });
  EXPECT_LE(r.best_genome[0], 50.0);
  EXPECT_TRUE(std::isfinite(r.best_fitness));
}

TEST(Evolve, RejectsBadConfig) {
  GaConfig c = small_ga(1);
  c.offspring = 30;
  EXPECT_EQ(error_code_of([&] { evolve(forest_space(), c, peak_fitness); }),
            ErrorCode::kInvalidConfig);
  c = small_ga(1);
  c.mutation = 1.5;
  EXPECT_EQ(error_code_of([&] { evolve(forest_space(), c, peak_fitness); }),
            ErrorCode::kInvalidConfig);
}

TEST(Evolve, CrossValidatedFitnessOnData) {
  const FeatureMatrix fm = testing::surrogate_matrix(3, 160, TargetKind::kOrdinalClass);
  SearchSpace s;
  s.task = Task::kClassification;
  s.algorithm = Algorithm::kKnn;
  s.genes = {parse_gene("k", "int:1:15")};
  GaConfig c;
  c.generations = 2;
  c.population = 6;
  c.offspring = 3;
  c.cv_k = 4;
  const TuneResult r = evolve(s, c, fm);
  EXPECT_GT(r.best_fitness, 0.25);
  EXPECT_LE(r.best_fitness, 1.0);
  EXPECT_EQ(r.best_spec.algorithm, Algorithm::kKnn);
}

}  // namespace
}  // namespace palml
