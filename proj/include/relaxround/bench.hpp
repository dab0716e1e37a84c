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

#ifndef RELAXROUND_BENCH_HPP
#define RELAXROUND_BENCH_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "relaxround/baselines.hpp"
#include "relaxround/problems.hpp"
#include "relaxround/solver.hpp"

namespace relaxround {

inline constexpr int kBenchSchemaVersion = 1;

// Suite JSON:
//   {"name": "...", "problem": {problem spec} or "maxclique", "instances": 50,
//    "seed": 1, "methods": ["solver", "badloss", "sa", "ga", "naive", "oracle"],
//    "graph": {"family": "erdos_renyi" | "grid", "nodes": 20, "p": 0.5,
//              "rows": 3, "cols": 3, "digit_max": 99},
//    "optimize": {...}, "order": "by_confidence", "concavity_trials": 200,
//    "baseline": {"sa": {...}, "ga": {...}}, "checkpoint": "path", "threads": 0}
struct SuiteSpec {
  std::string name = "suite";
  ProblemSpec problem;
  std::size_t instances = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> methods = {"solver", "naive", "oracle"};
  std::string graph_family = "erdos_renyi";
  int nodes = 20;
  double edge_prob = 0.5;
  int rows = 3;
  int cols = 3;
  int digit_max = 99;
  OptimizeConfig optimize;
  RoundingOrder order = RoundingOrder::kByConfidence;
  std::size_t concavity_trials = 200;
  AnnealingConfig sa;
  GeneticConfig ga;
  std::optional<std::filesystem::path> checkpoint;
  std::size_t threads = 0;  // 0: hardware concurrency

  static SuiteSpec FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;
};

SuiteSpec LoadSuite(const std::filesystem::path& path);

// Instance `index` of the suite; depends only on (seed, index).
GraphInstance SuiteInstance(const SuiteSpec& suite, std::size_t index);

struct BenchRow {
  std::size_t instance = 0;
  std::string method;
  std::string status = "ok";  // ok | error | skipped
  std::string message;
  double objective = 0.0;
  bool feasible = false;
  std::optional<double> l_r_initial;
  std::optional<bool> guarantee_applicable;
  std::optional<bool> guarantee_holds;
  std::optional<bool> strict_decrease;
  std::optional<double> oracle_objective;
  std::optional<double> gap;           // |objective - oracle| / max(|oracle|, 1e-12)
  std::optional<double> approx_ratio;  // found / optimal (maximize) or optimal / found
  double wall_seconds = 0.0;           // JSON only
};

struct BenchAggregate {
  std::string method;
  std::size_t rows = 0;
  std::size_t ok_rows = 0;
  double mean_objective = 0.0;  // over ok rows
  double feasibility_rate = 0.0;
  std::optional<double> mean_gap;
  std::optional<double> mean_approx_ratio;
  std::size_t applicable = 0;
  std::size_t holds = 0;
  std::size_t violations = 0;  // applicable and not holds
};

struct BenchReport {
  SuiteSpec suite;
  std::vector<BenchRow> rows;  // ordered by (instance, method position in the suite)
  std::vector<BenchAggregate> aggregates;

  std::string RowsCsv() const;
  std::string AggregatesCsv() const;
  nlohmann::json ToJson() const;
  std::size_t violations() const;
};

// Runs every (instance, method) pair. Row failures are caught and recorded.
BenchReport RunBench(const SuiteSpec& suite);

// Writes bench.csv, summary.csv and bench.json under `dir`.
void WriteBenchReport(const BenchReport& report, const std::filesystem::path& dir);

}  // namespace relaxround

#endif  // RELAXROUND_BENCH_HPP
