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

#include "relaxround/problems.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <stdexcept>

namespace relaxround {

namespace {

std::vector<double> AsDoubles(const BinaryVector& x) { return {x.begin(), x.end()}; }

BinaryFunction AtBinary(const RelaxedFunction& f) {
  return [f](const BinaryVector& x) { return f(AsDoubles(x)); };
}

BinaryFunction LinearAtBinary(std::vector<double> weights) {
  return [weights = std::move(weights)](const BinaryVector& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += weights[i] * x[i];
    return s;
  };
}

// Shifts the objective so min over {0,1}^n is >= 0. Exhaustive, so only for
// small n; larger problems are left unshifted with no declaration.
void ShiftToNonnegative(ProblemDefinition& p) {
  const std::size_t n = p.objective.arity();
  if (n > static_cast<std::size_t>(kMaxBetaEnumeration)) return;
  double lo = std::numeric_limits<double>::infinity();
  std::vector<double> x(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>((mask >> i) & 1U);
    lo = std::min(lo, p.objective(x));
  }
  p.f_offset = lo < 0.0 ? -lo : 0.0;
  p.min_f_nonnegative = true;
}

}  // namespace

const char* ProblemKindName(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kMaxClique:
      return "maxclique";
    case ProblemKind::kEdgeCover:
      return "edge_cover";
    case ProblemKind::kNodeMatching:
      return "node_matching";
    case ProblemKind::kCardinality:
      return "cardinality";
    case ProblemKind::kProxy:
      return "proxy";
  }
  return "maxclique";
}

ProblemKind ParseProblemKind(const std::string& name) {
  if (name == "maxclique") return ProblemKind::kMaxClique;
  if (name == "edge_cover") return ProblemKind::kEdgeCover;
  if (name == "node_matching") return ProblemKind::kNodeMatching;
  if (name == "cardinality") return ProblemKind::kCardinality;
  if (name == "proxy") return ProblemKind::kProxy;
  throw std::invalid_argument("unknown problem type '" + name +
                              "' (expected maxclique, edge_cover, node_matching, cardinality "
                              "or proxy)");
}

bool Maximizes(ProblemKind kind) { return kind == ProblemKind::kMaxClique; }

ProblemSpec ProblemSpec::FromJson(const nlohmann::json& j) {
  ProblemSpec s;
  s.kind = ParseProblemKind(j.at("type").get<std::string>());
  if (j.contains("beta") && !j.at("beta").is_null()) {
    s.beta = j.at("beta").get<double>();
    if (!(*s.beta > 0.0)) throw std::invalid_argument("beta must be positive");
  }
  s.t = j.value("t", std::size_t{0});
  if (j.contains("weights")) s.weights = j.at("weights").get<std::vector<double>>();
  if (j.contains("normalization")) {
    NormalizationSpec n;
    n.g_min = j.at("normalization").at("g_min").get<double>();
    n.g_min_plus = j.at("normalization").at("g_min_plus").get<double>();
    s.normalization = n;
  }
  s.badloss = j.value("badloss", false);
  s.ground_truth = j.value("ground_truth", "");
  return s;
}

nlohmann::json ProblemSpec::ToJson() const {
  nlohmann::json j = {{"type", ProblemKindName(kind)}};
  if (beta) j["beta"] = *beta;
  if (kind == ProblemKind::kCardinality) j["t"] = t;
  if (weights) j["weights"] = *weights;
  if (normalization) {
    j["normalization"] = {{"g_min", normalization->g_min},
                          {"g_min_plus", normalization->g_min_plus}};
  }
  if (badloss) j["badloss"] = true;
  if (!ground_truth.empty()) j["ground_truth"] = ground_truth;
  return j;
}

ProblemSpec ParseProblemSpec(const std::string& text) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(text, ec)) {
    std::ifstream in(text);
    if (!in) throw std::runtime_error("cannot open problem spec " + text);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("malformed problem spec " + text + ": " + e.what());
    }
    return ProblemSpec::FromJson(j);
  }
  if (!text.empty() && text.front() == '{') return ProblemSpec::FromJson(nlohmann::json::parse(text));
  return ProblemSpec::FromJson({{"type", text}});
}

ProblemDefinition MaxCliqueProblem(const GraphInstance& g, bool badloss) {
  const CliqueRelaxation rel = MaxCliqueRelaxation(g);
  ProblemDefinition p;
  p.name = badloss ? "maxclique_badloss" : "maxclique";
  p.scope = Scope::kNode;
  p.objective = badloss ? BadlossWarp(rel.objective) : rel.objective;
  p.constraints = {badloss ? BadlossWarp(rel.constraint) : rel.constraint};
  const double m = static_cast<double>(g.edge_count());
  p.f_offset = m;
  p.beta = m + 1.0;
  p.min_f_nonnegative = true;
  p.exact_f = AtBinary(rel.objective);
  p.exact_g = AtBinary(rel.constraint);
  return p;
}

std::vector<double> DefaultEdgeWeights(const GraphInstance& g, ProblemKind kind) {
  if (g.attr_dim() == 0) return std::vector<double>(static_cast<std::size_t>(g.edge_count()), 1.0);
  return Application1EdgeWeights(
      g, kind == ProblemKind::kEdgeCover ? EdgeWeightRule::kCover : EdgeWeightRule::kMatch);
}

ProblemDefinition EdgeProblem(const GraphInstance& g, ProblemKind kind,
                              const std::vector<double>& weights, const ProxyModel* proxy) {
  if (kind != ProblemKind::kEdgeCover && kind != ProblemKind::kNodeMatching) {
    throw std::invalid_argument("EdgeProblem needs edge_cover or node_matching");
  }
  if (weights.size() != static_cast<std::size_t>(g.edge_count())) {
    throw std::invalid_argument("expected " + std::to_string(g.edge_count()) +
                                " edge weights, got " + std::to_string(weights.size()));
  }
  ProblemDefinition p;
  p.name = ProblemKindName(kind);
  p.scope = Scope::kEdge;
  const RelaxedFunction constraint =
      kind == ProblemKind::kEdgeCover ? EdgeCoverConstraint(g) : NodeMatchingConstraint(g);
  p.constraints = {constraint};
  p.exact_f = LinearAtBinary(weights);
  p.exact_g = AtBinary(constraint);
  if (proxy != nullptr) {
    if (proxy->scope() != Scope::kEdge) {
      throw std::invalid_argument("edge problems need an edge-scope proxy");
    }
    p.objective = ProxyRelaxation(*proxy, g);
    p.proxy_objective = true;
    ShiftToNonnegative(p);
  } else {
    p.objective = LinearObjective(weights);
    double lo = 0.0;
    for (double w : weights) lo += std::min(0.0, w);
    p.f_offset = -lo;
    p.min_f_nonnegative = true;
  }
  return p;
}

ProblemDefinition CardinalityProblem(const std::vector<double>& weights, std::size_t t) {
  ProblemDefinition p;
  p.name = "cardinality";
  p.scope = Scope::kNode;
  p.objective = LinearObjective(weights);
  const RelaxedFunction constraint = CardinalityConstraint(weights.size(), t);
  p.constraints = {constraint};
  p.exact_f = LinearAtBinary(weights);
  p.exact_g = AtBinary(constraint);
  double lo = 0.0;
  for (double w : weights) lo += std::min(0.0, w);
  p.f_offset = -lo;
  p.min_f_nonnegative = true;
  return p;
}

ProblemDefinition ProxyProblem(const GraphInstance& g, const ProxyModel& model,
                               const std::string& ground_truth) {
  ProblemDefinition p;
  p.name = "proxy";
  p.scope = model.scope();
  p.objective = ProxyRelaxation(model, g);
  p.proxy_objective = true;
  if (ground_truth == "toy") {
    if (g.node_count() != 2 || g.attr_dim() < 1 || model.scope() != Scope::kNode) {
      throw std::invalid_argument("toy ground truth needs a two-node instance with attributes");
    }
    const double c1 = g.node_attrs(0)[0];
    const double c2 = g.node_attrs(1)[0];
    p.exact_f = [c1, c2](const BinaryVector& x) { return ToyGroundTruthCost(c1, c2, x[0], x[1]); };
  } else if (!ground_truth.empty()) {
    throw std::invalid_argument("unknown ground truth '" + ground_truth + "'");
  }
  ShiftToNonnegative(p);
  return p;
}

ProblemDefinition BuildProblem(const ProblemSpec& spec, const GraphInstance& g,
                               const ProxyModel* proxy) {
  ProblemDefinition p;
  switch (spec.kind) {
    case ProblemKind::kMaxClique:
      p = MaxCliqueProblem(g, spec.badloss);
      break;
    case ProblemKind::kEdgeCover:
    case ProblemKind::kNodeMatching:
      p = EdgeProblem(g, spec.kind, spec.weights ? *spec.weights : DefaultEdgeWeights(g, spec.kind),
                      proxy);
      break;
    case ProblemKind::kCardinality: {
      std::vector<double> w;
      if (spec.weights) {
        w = *spec.weights;
      } else {
        if (g.attr_dim() == 0) throw std::invalid_argument("cardinality needs weights or node attributes");
        for (int v = 0; v < g.node_count(); ++v) w.push_back(g.node_attrs(v)[0]);
      }
      p = CardinalityProblem(w, spec.t);
      break;
    }
    case ProblemKind::kProxy:
      if (proxy == nullptr) throw std::invalid_argument("problem type proxy needs a checkpoint");
      p = ProxyProblem(g, *proxy, spec.ground_truth);
      break;
  }
  if (spec.normalization) {
    for (auto& c : p.constraints) c = NormalizeConstraint(c, *spec.normalization);
    if (p.exact_g) {
      const NormalizationSpec n = *spec.normalization;
      BinaryFunction raw = p.exact_g;
      p.exact_g = [raw, n](const BinaryVector& x) {
        return (raw(x) - n.g_min) / (n.g_min_plus - n.g_min);
      };
    }
  }
  if (spec.badloss && spec.kind != ProblemKind::kMaxClique) {
    p.objective = BadlossWarp(p.objective);
    for (auto& c : p.constraints) c = BadlossWarp(c);
    p.name += "_badloss";
  }
  if (spec.beta) p.beta = spec.beta;
  return p;
}

double NaturalObjective(const ProblemDefinition& problem, ProblemKind kind,
                        const BinaryVector& x) {
  if (kind == ProblemKind::kMaxClique) {
    double k = 0.0;
    for (auto b : x) k += b;
    return k;
  }
  if (problem.exact_f) return problem.exact_f(x);
  return problem.objective(AsDoubles(x));
}

bool ExactlyFeasible(const ProblemDefinition& problem, const BinaryVector& x) {
  if (problem.exact_g) return problem.exact_g(x) < 1.0;
  double g = 0.0;
  for (const auto& c : problem.constraints) g += c(AsDoubles(x));
  return g < 1.0;
}

}  // namespace relaxround
