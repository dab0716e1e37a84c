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

#ifndef RELAXROUND_BASELINES_HPP
#define RELAXROUND_BASELINES_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "relaxround/graph.hpp"
#include "relaxround/solver.hpp"

namespace relaxround {

struct OracleResult {
  std::optional<BinaryVector> best_X;  // unset when nothing is feasible
  double best_value = 0.0;
  std::size_t feasible_count = 0;
  std::size_t evaluations = 0;
};

inline constexpr std::size_t kMaxBruteForceVariables = 24;

// Exhaustive minimum of f over {X : g(X) < 1}, scanning X in increasing
// binary order (bit i = X_i). Ties keep the first point found.
OracleResult BruteForce(std::size_t n, const BinaryFunction& f, const BinaryFunction& g);

// Depth-first enumeration of the same problem with an explicit recursion.
// Written separately so the two can check each other.
OracleResult RecursiveEnumerate(std::size_t n, const BinaryFunction& f, const BinaryFunction& g);

// Size of a maximum clique (Bron-Kerbosch with pivoting). n <= 64.
int MaxCliqueSize(const GraphInstance& g);

// Selected nodes of X form a clique.
bool IsClique(const GraphInstance& g, const BinaryVector& x);

// ---------------------------------------------------------------------------

struct AnnealingConfig {
  double initial_temperature = 1000.0;
  double cooling = 0.99;
  double final_temperature = 699.0;
  std::size_t jumps_per_temperature = 20;
  double mutation_prob = 0.1;  // chance of flipping a second random bit

  void Validate() const;
  nlohmann::json ToJson() const;
  static AnnealingConfig FromJson(const nlohmann::json& j);
};

// Temperatures visited: T0, T0 c, T0 c^2, ... while above the final temperature.
std::vector<double> TemperatureSchedule(const AnnealingConfig& config);

// Annealing over single-bit flips on `objective` from a uniform random start.
// Returns the best point visited.
BinaryVector SimulatedAnnealing(std::size_t n, const BinaryFunction& objective,
                                const AnnealingConfig& config, std::uint64_t seed);

struct GeneticConfig {
  std::size_t population = 256;
  double crossover_prob = 0.6;
  double mutation_prob = 0.01;  // per bit
  std::size_t generations = 100;
  std::size_t tournament = 2;

  void Validate() const;
  nlohmann::json ToJson() const;
  static GeneticConfig FromJson(const nlohmann::json& j);
};

// Generational GA: tournament selection, uniform crossover, bit-flip mutation,
// one elite carried over. Returns the best individual seen.
BinaryVector GeneticAlgorithm(std::size_t n, const BinaryFunction& objective,
                              const GeneticConfig& config, std::uint64_t seed);

// X_i = 1 iff x_i >= 0.5.
BinaryVector NaiveThresholdRound(std::span<const double> x);

// The penalized loss at a binary point.
BinaryFunction PenalizedAtBinary(const PenalizedLoss& loss);

}  // namespace relaxround

#endif  // RELAXROUND_BASELINES_HPP
