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

#ifndef RELAXROUND_PROBLEMS_HPP
#define RELAXROUND_PROBLEMS_HPP

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "relaxround/graph.hpp"
#include "relaxround/proxy.hpp"
#include "relaxround/solver.hpp"

namespace relaxround {

enum class ProblemKind { kMaxClique, kEdgeCover, kNodeMatching, kCardinality, kProxy };

const char* ProblemKindName(ProblemKind kind);
ProblemKind ParseProblemKind(const std::string& name);
// Whether larger natural objective values are better (clique size).
bool Maximizes(ProblemKind kind);

// Problem spec as JSON:
//   {"type": "maxclique" | "edge_cover" | "node_matching" | "cardinality" | "proxy",
//    "beta": number?, "t": integer (cardinality), "weights": [..]?,
//    "normalization": {"g_min": .., "g_min_plus": ..}?, "badloss": bool?,
//    "ground_truth": "toy"? (proxy)}
struct ProblemSpec {
  ProblemKind kind = ProblemKind::kMaxClique;
  std::optional<double> beta;
  std::size_t t = 0;
  std::optional<std::vector<double>> weights;
  std::optional<NormalizationSpec> normalization;
  bool badloss = false;
  std::string ground_truth;

  static ProblemSpec FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;
};

// A problem name, or a path to a JSON problem spec.
ProblemSpec ParseProblemSpec(const std::string& text);

// Maximum clique with f = |E| - (selected edges) >= 0, g = selected
// non-adjacent pairs, beta = |E| + 1. With `badloss` both relaxations are
// sine-warped.
ProblemDefinition MaxCliqueProblem(const GraphInstance& g, bool badloss = false);

// Edge cover / perfect matching on edge variables. The objective is `proxy`
// when given, else the linear form with `weights`. A proxy objective is
// shifted so its minimum over all binary points is >= 0.
ProblemDefinition EdgeProblem(const GraphInstance& g, ProblemKind kind,
                              const std::vector<double>& weights,
                              const ProxyModel* proxy = nullptr);

// Weights used when a spec gives none: the cover / matching attribute rules
// when the instance has attributes, else all ones.
std::vector<double> DefaultEdgeWeights(const GraphInstance& g, ProblemKind kind);

// Pick at least t + 1 nodes minimising sum w_v x_v.
ProblemDefinition CardinalityProblem(const std::vector<double>& weights, std::size_t t);

// Unconstrained proxy objective. Ground truth "toy" attaches the two-node
// toy cost as the exact objective.
ProblemDefinition ProxyProblem(const GraphInstance& g, const ProxyModel& model,
                               const std::string& ground_truth = "");

// Dispatch on the spec. `proxy` is required for kind kProxy and optional for
// edge problems.
ProblemDefinition BuildProblem(const ProblemSpec& spec, const GraphInstance& g,
                               const ProxyModel* proxy = nullptr);

// Natural objective of a binary point: clique size, or the exact cost.
double NaturalObjective(const ProblemDefinition& problem, ProblemKind kind, const BinaryVector& x);

// Exact feasibility of a binary point.
bool ExactlyFeasible(const ProblemDefinition& problem, const BinaryVector& x);

}  // namespace relaxround

#endif  // RELAXROUND_PROBLEMS_HPP
