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

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "palml/csv.h"
#include "palml/evaluate.h"
#include "palml/parallel.h"

namespace palml {
namespace {

constexpr double kFailed = -std::numeric_limits<double>::infinity();

std::vector<Algorithm> candidate_algorithms(const SearchSpace& space) {
  for (const Gene& g : space.genes) {
    if (g.name != "algorithm") continue;
    std::vector<Algorithm> out;
    for (const auto& c : g.choices) out.push_back(parse_algorithm(c));
    return out;
  }
  return {space.algorithm};
}

double choice_value(const Gene& g, std::size_t index) {
  const auto v = csv::parse_number(g.choices[index]);
  if (!v) {
    throw Error(ErrorCode::kInvalidConfig,
                "choice '" + g.choices[index] + "' for " + g.name + " is not a number");
  }
  return *v;
}

double sample_gene(const Gene& g, Rng& rng) {
  switch (g.kind) {
    case GeneKind::kInt:
      return static_cast<double>(std::uniform_int_distribution<long long>(
          std::llround(g.lo), std::llround(g.hi))(rng));
    case GeneKind::kReal:
      return g.lo == g.hi ? g.lo : std::uniform_real_distribution<double>(g.lo, g.hi)(rng);
    case GeneKind::kLogReal:
      return g.lo == g.hi ? g.lo
                          : std::exp(std::uniform_real_distribution<double>(
                                std::log(g.lo), std::log(g.hi))(rng));
    case GeneKind::kChoice:
      return static_cast<double>(uniform_index(rng, g.choices.size()));
  }
  return 0.0;
}

}  // namespace

SearchSpace default_search_space(Task task) {
  SearchSpace s;
  s.task = task;
  s.algorithm = Algorithm::kRandomForest;
  s.genes = {
      {"n_estimators", GeneKind::kInt, 20, 100, {}},
      {"max_depth", GeneKind::kInt, 2, 16, {}},
      {"max_features", GeneKind::kReal, 0.1, 1.0, {}},
      {"min_samples_leaf", GeneKind::kInt, 1, 10, {}},
      {"min_samples_split", GeneKind::kInt, 2, 16, {}},
      {"subsample", GeneKind::kReal, 0.5, 1.0, {}},
  };
  return s;
}

Gene parse_gene(const std::string& name, const std::string& domain) {
  Gene g;
  g.name = name;
  const auto colon = domain.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::kInvalidConfig,
                "search domain for " + name + " needs a kind prefix: " + domain);
  }
  const std::string kind = domain.substr(0, colon);
  const std::string rest = domain.substr(colon + 1);
  if (kind == "choice") {
    g.kind = GeneKind::kChoice;
    std::size_t start = 0;
    while (start <= rest.size()) {
      const auto comma = rest.find(',', start);
      const auto end = comma == std::string::npos ? rest.size() : comma;
      const std::string item(csv::trim(std::string_view(rest).substr(start, end - start)));
      if (!item.empty()) g.choices.push_back(item);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return g;
  }
  if (kind == "int") {
    g.kind = GeneKind::kInt;
  } else if (kind == "real") {
    g.kind = GeneKind::kReal;
  } else if (kind == "log") {
    g.kind = GeneKind::kLogReal;
  } else {
    throw Error(ErrorCode::kInvalidConfig, "unknown search domain kind '" + kind + "'");
  }
  const auto sep = rest.find(':');
  const auto lo = csv::parse_number(rest.substr(0, sep));
  const auto hi = sep == std::string::npos ? std::nullopt
                                           : csv::parse_number(rest.substr(sep + 1));
  if (!lo || !hi) {
    throw Error(ErrorCode::kInvalidConfig,
                "search domain for " + name + " must be kind:lo:hi, got " + domain);
  }
  g.lo = *lo;
  g.hi = *hi;
  return g;
}

void validate(const SearchSpace& space) {
  const std::vector<Algorithm> algorithms = candidate_algorithms(space);
  for (Algorithm a : algorithms) {
    if (!supports(a, space.task)) {
      throw Error(ErrorCode::kInvalidConfig,
                  std::string(to_string(a)) + " does not support " +
                      std::string(to_string(space.task)));
    }
  }
  std::set<std::string> seen;
  for (const Gene& g : space.genes) {
    if (!seen.insert(g.name).second) {
      throw Error(ErrorCode::kInvalidConfig, "duplicate search gene " + g.name);
    }
    if (g.kind == GeneKind::kChoice) {
      if (g.choices.empty()) {
        throw Error(ErrorCode::kInvalidConfig, "empty choice set for " + g.name);
      }
    } else {
      if (!(g.lo <= g.hi)) {
        throw Error(ErrorCode::kInvalidConfig, "empty range for " + g.name);
      }
      if (g.kind == GeneKind::kLogReal && !(g.lo > 0.0)) {
        throw Error(ErrorCode::kInvalidConfig, "log range for " + g.name + " must be positive");
      }
      if (g.kind == GeneKind::kInt &&
          (std::floor(g.lo) != g.lo || std::floor(g.hi) != g.hi)) {
        throw Error(ErrorCode::kInvalidConfig, "integer range for " + g.name + " has fractional bounds");
      }
    }
    if (g.name == "algorithm") {
      if (g.kind != GeneKind::kChoice) {
        throw Error(ErrorCode::kInvalidConfig, "algorithm gene must be a choice");
      }
      continue;
    }
    // Every value of the domain must validate for each algorithm that has
    // the parameter; checking the bounds (or each choice) covers the range.
    std::vector<double> probes;
    if (g.kind == GeneKind::kChoice) {
      for (std::size_t i = 0; i < g.choices.size(); ++i) probes.push_back(choice_value(g, i));
    } else {
      probes = {g.lo, g.hi};
    }
    bool known = false;
    for (Algorithm a : algorithms) {
      if (find_param(a, space.task, g.name) == nullptr) continue;
      known = true;
      for (double v : probes) {
        ModelSpec spec{space.task, a, {{g.name, v}}, 0};
        try {
          validate(spec);
        } catch (const Error& e) {
          throw Error(ErrorCode::kInvalidConfig,
                      "search domain for " + g.name + " is invalid: " + e.what());
        }
      }
    }
    if (!known) {
      throw Error(ErrorCode::kInvalidConfig,
                  "no searched algorithm has a parameter named " + g.name);
    }
  }
}

Genome sample_genome(const SearchSpace& space, Rng& rng) {
  Genome g;
  g.reserve(space.genes.size());
  for (const Gene& gene : space.genes) g.push_back(sample_gene(gene, rng));
  return g;
}

ModelSpec to_model_spec(const SearchSpace& space, const Genome& genome,
                        std::uint64_t seed) {
  ModelSpec spec{space.task, space.algorithm, {}, seed};
  for (std::size_t i = 0; i < space.genes.size(); ++i) {
    const Gene& g = space.genes[i];
    if (g.name == "algorithm") {
      spec.algorithm = parse_algorithm(g.choices[static_cast<std::size_t>(genome[i])]);
    }
  }
  for (std::size_t i = 0; i < space.genes.size(); ++i) {
    const Gene& g = space.genes[i];
    if (g.name == "algorithm") continue;
    if (find_param(spec.algorithm, spec.task, g.name) == nullptr) continue;
    spec.params[g.name] = g.kind == GeneKind::kChoice
                              ? choice_value(g, static_cast<std::size_t>(genome[i]))
                              : genome[i];
  }
  return spec;
}

GaConfig GaConfig::full_scale() {
  GaConfig c;
  c.generations = 100;
  c.population = 150;
  c.offspring = 20;
  return c;
}

void validate(const GaConfig& c) {
  if (c.population < 1) throw Error(ErrorCode::kInvalidConfig, "population must be at least 1");
  if (c.offspring > c.population) {
    throw Error(ErrorCode::kInvalidConfig, "offspring must not exceed population");
  }
  if (c.tournament < 1) throw Error(ErrorCode::kInvalidConfig, "tournament size must be at least 1");
  for (double p : {c.crossover, c.mutation}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::kInvalidConfig, "probabilities must lie in [0, 1]");
    }
  }
  if (c.cv_k < 2) throw Error(ErrorCode::kInvalidConfig, "cv_k must be at least 2");
}

double FitnessCache::operator()(const Genome& g) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    const auto it = memo_.find(g);
    if (it != memo_.end()) return it->second;
  }
  double value = kFailed;
  try {
    value = fn_(g);
    if (std::isnan(value)) value = kFailed;
  } catch (const std::exception&) {
    value = kFailed;
  }
  std::lock_guard<std::mutex> lock(mu_);
  return memo_.emplace(g, value).first->second;
}

bool FitnessCache::contains(const Genome& g) const {
  std::lock_guard<std::mutex> lock(mu_);
  return memo_.count(g) > 0;
}

std::size_t FitnessCache::evaluations() const {
  std::lock_guard<std::mutex> lock(mu_);
  return memo_.size();
}

namespace {

struct Individual {
  Genome genome;
  double fitness = kFailed;
};

// Evaluates all not-yet-cached genomes in parallel, then fills fitnesses.
void evaluate(std::vector<Individual>& pop, FitnessCache& cache) {
  std::vector<Genome> pending;
  std::set<Genome> queued;
  for (const auto& ind : pop) {
    if (!cache.contains(ind.genome) && queued.insert(ind.genome).second) {
      pending.push_back(ind.genome);
    }
  }
  parallel_for(pending.size(), [&](std::size_t i) { cache(pending[i]); });
  for (auto& ind : pop) ind.fitness = cache(ind.genome);
}

const Individual& tournament(const std::vector<Individual>& pool,
                             std::size_t size, Rng& rng) {
  const Individual* best = &pool[uniform_index(rng, pool.size())];
  for (std::size_t i = 1; i < size; ++i) {
    const Individual& c = pool[uniform_index(rng, pool.size())];
    if (c.fitness > best->fitness) best = &c;
  }
  return *best;
}

GenerationStats stats_of(const std::vector<Individual>& pop, std::size_t gen,
                         double best_ever, std::size_t evaluations) {
  GenerationStats s;
  s.generation = gen;
  s.best = best_ever;
  s.evaluations = evaluations;
  std::vector<double> finite;
  for (const auto& ind : pop) {
    if (std::isfinite(ind.fitness)) finite.push_back(ind.fitness);
  }
  if (finite.empty()) {
    s.mean = kFailed;
    return s;
  }
  for (double f : finite) s.mean += f;
  s.mean /= static_cast<double>(finite.size());
  for (double f : finite) s.std += (f - s.mean) * (f - s.mean);
  s.std = std::sqrt(s.std / static_cast<double>(finite.size()));
  return s;
}

}  // namespace

TuneResult evolve(const SearchSpace& space, const GaConfig& config,
                  const FitnessFn& fitness) {
  validate(space);
  validate(config);
  FitnessCache cache(fitness);
  Rng rng = make_rng(config.seed, {0});

  std::vector<Individual> pop(config.population);
  for (auto& ind : pop) ind.genome = sample_genome(space, rng);
  evaluate(pop, cache);

  Individual best = pop.front();
  auto track_best = [&](const std::vector<Individual>& group) {
    for (const auto& ind : group) {
      if (ind.fitness > best.fitness) best = ind;
    }
  };
  track_best(pop);

  TuneResult result;
  result.history.push_back(stats_of(pop, 0, best.fitness, cache.evaluations()));
  for (std::size_t gen = 1; gen <= config.generations; ++gen) {
    std::vector<Individual> children(config.offspring);
    for (auto& child : children) {
      const Individual& a = tournament(pop, config.tournament, rng);
      const Individual& b = tournament(pop, config.tournament, rng);
      child.genome = a.genome;
      if (uniform01(rng) < config.crossover) {
        for (std::size_t i = 0; i < child.genome.size(); ++i) {
          if (uniform01(rng) < 0.5) child.genome[i] = b.genome[i];
        }
      }
      for (std::size_t i = 0; i < child.genome.size(); ++i) {
        if (uniform01(rng) < config.mutation) {
          child.genome[i] = sample_gene(space.genes[i], rng);
        }
      }
    }
    evaluate(children, cache);
    track_best(children);

    std::vector<Individual> pool = pop;
    pool.insert(pool.end(), children.begin(), children.end());
    std::vector<Individual> next;
    next.reserve(config.population);
    next.push_back(best);
    while (next.size() < config.population) {
      next.push_back(tournament(pool, config.tournament, rng));
    }
    pop = std::move(next);
    result.history.push_back(stats_of(pop, gen, best.fitness, cache.evaluations()));
  }

  result.best_genome = best.genome;
  result.best_fitness = best.fitness;
  result.best_spec = to_model_spec(space, best.genome, config.seed);
  result.evaluations = cache.evaluations();
  return result;
}

TuneResult evolve(const SearchSpace& space, const GaConfig& config,
                  const FeatureMatrix& data, Diagnostics* diagnostics) {
  validate(config);
  const FoldPlan plan =
      space.task == Task::kClassification
          ? make_stratified_plan(data.classes, config.cv_k, 1, config.seed)
          : make_kfold_plan(data.rows(), config.cv_k, 1, config.seed);
  auto fitness = [&](const Genome& g) {
    const ModelSpec spec = to_model_spec(space, g, config.seed);
    return cross_validate(spec, data, plan, diagnostics).primary_score();
  };
  return evolve(space, config, fitness);
}

}  // namespace palml
