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

// Genetic-algorithm hyperparameter search.
//
// A genome holds one number per gene: the integer or real value itself, or
// the index into a choice list. Each generation breeds `offspring` children
// by tournament selection, uniform crossover and per-gene resampling, then
// keeps the best genome of parents + children plus tournament winners until
// the population is full again. Fitness is memoized by genome value.

#ifndef PALML_TUNE_H_
#define PALML_TUNE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "palml/errors.h"
#include "palml/model_spec.h"
#include "palml/preprocess.h"
#include "palml/random.h"

namespace palml {

enum class GeneKind { kInt, kReal, kLogReal, kChoice };

struct Gene {
  // "algorithm" selects the algorithm id from `choices`; any other name is a
  // hyperparameter (choices must then parse as numbers).
  std::string name;
  GeneKind kind = GeneKind::kReal;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::string> choices;
};

struct SearchSpace {
  Task task = Task::kClassification;
  Algorithm algorithm = Algorithm::kRandomForest;  // unless an algorithm gene
  std::vector<Gene> genes;
};

// Random-forest space used when none is configured.
SearchSpace default_search_space(Task task);

// Parses "int:lo:hi", "real:lo:hi", "log:lo:hi" or "choice:a,b,c".
Gene parse_gene(const std::string& name, const std::string& domain);

// Throws InvalidConfig for empty or inverted domains, unknown names and
// bounds the model schema rejects.
void validate(const SearchSpace& space);

using Genome = std::vector<double>;

// Uniform per gene; log-uniform for log-scaled reals.
Genome sample_genome(const SearchSpace& space, Rng& rng);

// Hyperparameters not in the chosen algorithm's schema are dropped.
ModelSpec to_model_spec(const SearchSpace& space, const Genome& genome,
                        std::uint64_t seed);

struct GaConfig {
  std::size_t generations = 10;
  std::size_t population = 20;
  std::size_t offspring = 10;
  std::size_t tournament = 3;
  double crossover = 0.9;
  double mutation = 0.1;
  std::uint64_t seed = 0;
  std::size_t cv_k = 10;  // folds of the fitness cross-validation

  // 100 generations, population 150, 20 offspring.
  static GaConfig full_scale();
};

void validate(const GaConfig& config);

struct GenerationStats {
  std::size_t generation = 0;  // 0 is the initial population
  double best = 0.0;           // best fitness seen so far
  double mean = 0.0;           // over the finite fitnesses of the population
  double std = 0.0;
  std::size_t evaluations = 0;  // cumulative distinct fitness evaluations
};

struct TuneResult {
  Genome best_genome;
  ModelSpec best_spec;
  double best_fitness = 0.0;
  std::vector<GenerationStats> history;
  std::size_t evaluations = 0;
};

using FitnessFn = std::function<double(const Genome&)>;

// Thread-safe memo: each distinct genome is evaluated once.
class FitnessCache {
 public:
  explicit FitnessCache(FitnessFn fn) : fn_(std::move(fn)) {}
  double operator()(const Genome& g);
  bool contains(const Genome& g) const;
  std::size_t evaluations() const;

 private:
  FitnessFn fn_;
  mutable std::mutex mu_;
  std::map<Genome, double> memo_;
};

// Generic search. Fitness exceptions score -inf. Deterministic for a fixed
// config.seed provided `fitness` is.
TuneResult evolve(const SearchSpace& space, const GaConfig& config,
                  const FitnessFn& fitness);

// Fitness = mean validation accuracy (stratified k-fold) or R^2 (k-fold) of
// the decoded spec on `data`, seeded from config.seed.
TuneResult evolve(const SearchSpace& space, const GaConfig& config,
                  const FeatureMatrix& data, Diagnostics* diagnostics = nullptr);

}  // namespace palml

#endif  // PALML_TUNE_H_
