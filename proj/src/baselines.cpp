// Copyright 2026 The relaxround Authors
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

#include "relaxround/baselines.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "relaxround/rng.hpp"

namespace relaxround {

namespace {

void CheckSize(std::size_t n) {
  if (n > kMaxBruteForceVariables) {
    throw std::invalid_argument("brute force is capped at " +
                                std::to_string(kMaxBruteForceVariables) + " variables, got " +
                                std::to_string(n));
  }
}

}  // namespace

OracleResult BruteForce(std::size_t n, const BinaryFunction& f, const BinaryFunction& g) {
  CheckSize(n);
  OracleResult out;
  BinaryVector x(n, 0);
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::uint8_t>((mask >> i) & 1U);
    ++out.evaluations;
    if (!(g(x) < 1.0)) continue;
    const double v = f(x);
    ++out.feasible_count;
    if (!out.best_X || v < out.best_value) {
      out.best_value = v;
      out.best_X = x;
    }
  }
  return out;
}

OracleResult RecursiveEnumerate(std::size_t n, const BinaryFunction& f, const BinaryFunction& g) {
  CheckSize(n);
  OracleResult out;
  BinaryVector x(n, 0);
  std::function<void(std::size_t)> visit = [&](std::size_t depth) {
    if (depth == n) {
      ++out.evaluations;
      if (g(x) >= 1.0) return;
      ++out.feasible_count;
      const double v = f(x);
      if (out.feasible_count == 1 || v < out.best_value) {
        out.best_value = v;
        out.best_X = x;
      }
      return;
    }
    for (std::uint8_t bit : {std::uint8_t{1}, std::uint8_t{0}}) {
      x[depth] = bit;
      visit(depth + 1);
    }
    x[depth] = 0;
  };
  visit(0);
  return out;
}

int MaxCliqueSize(const GraphInstance& g) {
  const int n = g.node_count();
  if (n > 64) throw std::invalid_argument("MaxCliqueSize supports at most 64 nodes");
  if (n == 0) return 0;
  std::vector<std::uint64_t> adj(static_cast<std::size_t>(n), 0);
  for (const auto& e : g.edges()) {
    adj[static_cast<std::size_t>(e.u)] |= std::uint64_t{1} << e.v;
    adj[static_cast<std::size_t>(e.v)] |= std::uint64_t{1} << e.u;
  }
  int best = 0;
  std::function<void(int, std::uint64_t, std::uint64_t)> expand = [&](int size, std::uint64_t p,
                                                                       std::uint64_t x) {
    if (p == 0 && x == 0) {
      best = std::max(best, size);
      return;
    }
    if (size + std::popcount(p) <= best) return;
    const std::uint64_t px = p | x;
    int pivot = std::countr_zero(px);
    int pivot_hits = -1;
    for (std::uint64_t rest = px; rest != 0; rest &= rest - 1) {
      const int u = std::countr_zero(rest);
      const int hits = std::popcount(p & adj[static_cast<std::size_t>(u)]);
      if (hits > pivot_hits) {
        pivot_hits = hits;
        pivot = u;
      }
    }
    for (std::uint64_t cand = p & ~adj[static_cast<std::size_t>(pivot)]; cand != 0;
         cand &= cand - 1) {
      const int v = std::countr_zero(cand);
      const std::uint64_t bit = std::uint64_t{1} << v;
      expand(size + 1, p & adj[static_cast<std::size_t>(v)], x & adj[static_cast<std::size_t>(v)]);
      p &= ~bit;
      x |= bit;
    }
  };
  const std::uint64_t all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  expand(0, all, 0);
  return best;
}

bool IsClique(const GraphInstance& g, const BinaryVector& x) {
  if (x.size() != static_cast<std::size_t>(g.node_count())) {
    throw std::invalid_argument("clique indicator length differs from the node count");
  }
  for (int u = 0; u < g.node_count(); ++u) {
    if (!x[static_cast<std::size_t>(u)]) continue;
    for (int v = u + 1; v < g.node_count(); ++v) {
      if (x[static_cast<std::size_t>(v)] && !g.adjacent(u, v)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

void AnnealingConfig::Validate() const {
  if (!(initial_temperature > 0.0)) throw std::invalid_argument("initial temperature must be positive");
  if (!(final_temperature > 0.0)) throw std::invalid_argument("final temperature must be positive");
  if (!(cooling > 0.0 && cooling < 1.0)) throw std::invalid_argument("cooling must lie in (0, 1)");
  if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0)) {
    throw std::invalid_argument("mutation probability must lie in [0, 1]");
  }
}

nlohmann::json AnnealingConfig::ToJson() const {
  return {{"initial_temperature", initial_temperature},
          {"cooling", cooling},
          {"final_temperature", final_temperature},
          {"jumps_per_temperature", jumps_per_temperature},
          {"mutation_prob", mutation_prob}};
}

AnnealingConfig AnnealingConfig::FromJson(const nlohmann::json& j) {
  AnnealingConfig c;
  c.initial_temperature = j.value("initial_temperature", c.initial_temperature);
  c.cooling = j.value("cooling", c.cooling);
  c.final_temperature = j.value("final_temperature", c.final_temperature);
  c.jumps_per_temperature = j.value("jumps_per_temperature", c.jumps_per_temperature);
  c.mutation_prob = j.value("mutation_prob", c.mutation_prob);
  c.Validate();
  return c;
}

std::vector<double> TemperatureSchedule(const AnnealingConfig& config) {
  config.Validate();
  std::vector<double> temps;
  for (double t = config.initial_temperature; t > config.final_temperature; t *= config.cooling) {
    temps.push_back(t);
  }
  return temps;
}

BinaryVector SimulatedAnnealing(std::size_t n, const BinaryFunction& objective,
                                const AnnealingConfig& config, std::uint64_t seed) {
  Rng rng = Rng(seed).Split("annealing");
  BinaryVector x(n);
  for (auto& b : x) b = rng.Bernoulli(0.5) ? 1 : 0;
  if (n == 0) return x;
  double value = objective(x);
  BinaryVector best = x;
  double best_value = value;
  for (double t : TemperatureSchedule(config)) {
    for (std::size_t jump = 0; jump < config.jumps_per_temperature; ++jump) {
      BinaryVector y = x;
      y[rng.Below(n)] ^= 1U;
      if (rng.Bernoulli(config.mutation_prob)) y[rng.Below(n)] ^= 1U;
      const double vy = objective(y);
      const double delta = vy - value;
      if (delta <= 0.0 || rng.Uniform() < std::exp(-delta / t)) {
        x = std::move(y);
        value = vy;
        if (value < best_value) {
          best_value = value;
          best = x;
        }
      }
    }
  }
  return best;
}

void GeneticConfig::Validate() const {
  if (population < 1) throw std::invalid_argument("population must be at least 1");
  if (tournament < 1) throw std::invalid_argument("tournament size must be at least 1");
  if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0)) {
    throw std::invalid_argument("crossover probability must lie in [0, 1]");
  }
  if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0)) {
    throw std::invalid_argument("mutation probability must lie in [0, 1]");
  }
}

nlohmann::json GeneticConfig::ToJson() const {
  return {{"population", population},
          {"crossover_prob", crossover_prob},
          {"mutation_prob", mutation_prob},
          {"generations", generations},
          {"tournament", tournament}};
}

GeneticConfig GeneticConfig::FromJson(const nlohmann::json& j) {
  GeneticConfig c;
  c.population = j.value("population", c.population);
  c.crossover_prob = j.value("crossover_prob", c.crossover_prob);
  c.mutation_prob = j.value("mutation_prob", c.mutation_prob);
  c.generations = j.value("generations", c.generations);
  c.tournament = j.value("tournament", c.tournament);
  c.Validate();
  return c;
}

BinaryVector GeneticAlgorithm(std::size_t n, const BinaryFunction& objective,
                              const GeneticConfig& config, std::uint64_t seed) {
  config.Validate();
  Rng rng = Rng(seed).Split("genetic");
  const std::size_t pop = config.population;
  std::vector<BinaryVector> individuals(pop, BinaryVector(n));
  for (auto& ind : individuals) {
    for (auto& b : ind) b = rng.Bernoulli(0.5) ? 1 : 0;
  }
  std::vector<double> fitness(pop);
  for (std::size_t i = 0; i < pop; ++i) fitness[i] = objective(individuals[i]);

  auto best_index = [&] {
    return static_cast<std::size_t>(std::min_element(fitness.begin(), fitness.end()) -
                                    fitness.begin());
  };
  std::size_t b = best_index();
  BinaryVector best = individuals[b];
  double best_value = fitness[b];

  auto select = [&]() -> const BinaryVector& {
    std::size_t winner = rng.Below(pop);
    for (std::size_t k = 1; k < config.tournament; ++k) {
      const std::size_t c = rng.Below(pop);
      if (fitness[c] < fitness[winner]) winner = c;
    }
    return individuals[winner];
  };

  for (std::size_t gen = 0; gen < config.generations; ++gen) {
    std::vector<BinaryVector> next;
    next.reserve(pop);
    next.push_back(individuals[best_index()]);
    while (next.size() < pop) {
      BinaryVector a = select();
      BinaryVector c = select();
      if (rng.Bernoulli(config.crossover_prob)) {
        for (std::size_t i = 0; i < n; ++i) {
          if (rng.Bernoulli(0.5)) std::swap(a[i], c[i]);
        }
      }
      for (BinaryVector* child : {&a, &c}) {
        if (next.size() >= pop) break;
        for (auto& bit : *child) {
          if (rng.Bernoulli(config.mutation_prob)) bit ^= 1U;
        }
        next.push_back(std::move(*child));
      }
    }
    individuals = std::move(next);
    for (std::size_t i = 0; i < pop; ++i) fitness[i] = objective(individuals[i]);
    b = best_index();
    if (fitness[b] < best_value) {
      best_value = fitness[b];
      best = individuals[b];
    }
  }
  return best;
}

BinaryVector NaiveThresholdRound(std::span<const double> x) {
  BinaryVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0 && x[i] <= 1.0)) {
      throw std::invalid_argument("soft entry " + std::to_string(i) + " is outside [0, 1]");
    }
    out[i] = x[i] >= 0.5 ? 1 : 0;
  }
  return out;
}

BinaryFunction PenalizedAtBinary(const PenalizedLoss& loss) {
  return [loss](const BinaryVector& x) {
    const std::vector<double> v(x.begin(), x.end());
    return loss(v);
  };
}

}  // namespace relaxround
