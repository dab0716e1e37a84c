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

#include "relaxround/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace relaxround {

namespace {

void CheckScope(const GraphInstance& g, Scope scope, std::size_t got, const char* what) {
  const std::size_t want = g.variable_count(scope);
  if (got != want) {
    throw std::invalid_argument(std::string(what) + ": expected " + ScopeName(scope) +
                                "-scope values of length " + std::to_string(want) + ", got " +
                                std::to_string(got));
  }
}

double SelectedEdgeMass(const GraphInstance& g, std::span<const double> x) {
  double s = 0.0;
  for (const Edge& e : g.edges()) {
    s += x[static_cast<std::size_t>(e.u)] * x[static_cast<std::size_t>(e.v)];
  }
  return s;
}

// Product of (1 - x_e) over incident edges, and its partials via prefix/suffix
// products so zero factors are handled without division.
double UncoveredProduct(const std::vector<int>& inc, std::span<const double> x,
                        std::vector<double>* partials) {
  const std::size_t d = inc.size();
  double prod = 1.0;
  for (int e : inc) prod *= 1.0 - x[static_cast<std::size_t>(e)];
  if (partials != nullptr) {
    partials->assign(d, 0.0);
    double prefix = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      (*partials)[k] = prefix;
      prefix *= 1.0 - x[static_cast<std::size_t>(inc[k])];
    }
    double suffix = 1.0;
    for (std::size_t k = d; k-- > 0;) {
      (*partials)[k] *= -suffix;
      suffix *= 1.0 - x[static_cast<std::size_t>(inc[k])];
    }
  }
  return prod;
}

double ConflictSum(const std::vector<int>& inc, std::span<const double> x, double* sum_out) {
  double s = 0.0;
  double sq = 0.0;
  for (int e : inc) {
    const double v = x[static_cast<std::size_t>(e)];
    s += v;
    sq += v * v;
  }
  if (sum_out != nullptr) *sum_out = s;
  if (inc.size() < 2) return 0.0;
  return 0.5 * (s * s - sq);
}

}  // namespace

double MaxCliqueLoss(const GraphInstance& g, std::span<const double> x, double beta) {
  CheckScope(g, Scope::kNode, x.size(), "max clique loss");
  double ordered_pairs = 0.0;
  double s = 0.0;
  double sq = 0.0;
  for (double v : x) {
    s += v;
    sq += v * v;
  }
  ordered_pairs = s * s - sq;
  return -(beta + 1.0) * SelectedEdgeMass(g, x) + 0.5 * beta * ordered_pairs;
}

CliqueRelaxation MaxCliqueRelaxation(const GraphInstance& g) {
  auto shared = std::make_shared<const GraphInstance>(g);
  const auto n = static_cast<std::size_t>(g.node_count());
  RelaxedFunction objective(
      n, Structure::kAffine,
      [shared](std::span<const double> x) {
        CheckScope(*shared, Scope::kNode, x.size(), "clique objective");
        return -SelectedEdgeMass(*shared, x);
      },
      [shared](std::span<const double> x, std::span<double> grad) {
        CheckScope(*shared, Scope::kNode, x.size(), "clique objective");
        for (int v = 0; v < shared->node_count(); ++v) {
          double s = 0.0;
          for (int u : shared->neighbors(v)) s += x[static_cast<std::size_t>(u)];
          grad[static_cast<std::size_t>(v)] = -s;
        }
        return -SelectedEdgeMass(*shared, x);
      },
      "clique_edges");
  RelaxedFunction constraint(
      n, Structure::kAffine,
      [shared](std::span<const double> x) {
        CheckScope(*shared, Scope::kNode, x.size(), "clique constraint");
        double s = 0.0;
        double sq = 0.0;
        for (double v : x) {
          s += v;
          sq += v * v;
        }
        return 0.5 * (s * s - sq) - SelectedEdgeMass(*shared, x);
      },
      [shared](std::span<const double> x, std::span<double> grad) {
        CheckScope(*shared, Scope::kNode, x.size(), "clique constraint");
        double s = 0.0;
        double sq = 0.0;
        for (double v : x) {
          s += v;
          sq += v * v;
        }
        for (int v = 0; v < shared->node_count(); ++v) {
          double nb = 0.0;
          for (int u : shared->neighbors(v)) nb += x[static_cast<std::size_t>(u)];
          grad[static_cast<std::size_t>(v)] = (s - x[static_cast<std::size_t>(v)]) - nb;
        }
        return 0.5 * (s * s - sq) - SelectedEdgeMass(*shared, x);
      },
      "clique_non_edges");
  return {std::move(objective), std::move(constraint)};
}

// ---------------------------------------------------------------------------

double EdgeCoverPenalty(const GraphInstance& g, std::span<const double> x) {
  CheckScope(g, Scope::kEdge, x.size(), "edge cover penalty");
  double total = 0.0;
  for (int v = 0; v < g.node_count(); ++v) total += UncoveredProduct(g.incident(v), x, nullptr);
  return total;
}

double EdgeCoverPenaltyLogSumExp(const GraphInstance& g, std::span<const double> x) {
  CheckScope(g, Scope::kEdge, x.size(), "edge cover penalty");
  constexpr double kFloor = 1e-12;
  double total = 0.0;
  for (int v = 0; v < g.node_count(); ++v) {
    double log_sum = 0.0;
    for (int e : g.incident(v)) {
      log_sum += std::log(std::max(kFloor, 1.0 - x[static_cast<std::size_t>(e)]));
    }
    total += std::exp(log_sum);
  }
  return total;
}

double NodeMatchingPenalty(const GraphInstance& g, std::span<const double> x) {
  CheckScope(g, Scope::kEdge, x.size(), "node matching penalty");
  double total = 0.0;
  for (int v = 0; v < g.node_count(); ++v) {
    total += UncoveredProduct(g.incident(v), x, nullptr) + ConflictSum(g.incident(v), x, nullptr);
  }
  return total;
}

RelaxedFunction EdgeCoverConstraint(const GraphInstance& g) {
  auto shared = std::make_shared<const GraphInstance>(g);
  return RelaxedFunction(
      g.variable_count(Scope::kEdge), Structure::kAffine,
      [shared](std::span<const double> x) { return EdgeCoverPenalty(*shared, x); },
      [shared](std::span<const double> x, std::span<double> grad) {
        CheckScope(*shared, Scope::kEdge, x.size(), "edge cover penalty");
        std::fill(grad.begin(), grad.end(), 0.0);
        std::vector<double> partials;
        double total = 0.0;
        for (int v = 0; v < shared->node_count(); ++v) {
          const auto& inc = shared->incident(v);
          total += UncoveredProduct(inc, x, &partials);
          for (std::size_t k = 0; k < inc.size(); ++k) {
            grad[static_cast<std::size_t>(inc[k])] += partials[k];
          }
        }
        return total;
      },
      "edge_cover");
}

RelaxedFunction NodeMatchingConstraint(const GraphInstance& g) {
  auto shared = std::make_shared<const GraphInstance>(g);
  return RelaxedFunction(
      g.variable_count(Scope::kEdge), Structure::kAffine,
      [shared](std::span<const double> x) { return NodeMatchingPenalty(*shared, x); },
      [shared](std::span<const double> x, std::span<double> grad) {
        CheckScope(*shared, Scope::kEdge, x.size(), "node matching penalty");
        std::fill(grad.begin(), grad.end(), 0.0);
        std::vector<double> partials;
        double total = 0.0;
        for (int v = 0; v < shared->node_count(); ++v) {
          const auto& inc = shared->incident(v);
          double s = 0.0;
          total += UncoveredProduct(inc, x, &partials) + ConflictSum(inc, x, &s);
          for (std::size_t k = 0; k < inc.size(); ++k) {
            const auto e = static_cast<std::size_t>(inc[k]);
            grad[e] += partials[k];
            if (inc.size() >= 2) grad[e] += s - x[e];
          }
        }
        return total;
      },
      "node_matching");
}

// ---------------------------------------------------------------------------

double CardinalityPenalty(std::size_t n, std::size_t t, std::span<const double> x) {
  if (t >= n) {
    throw std::invalid_argument("cardinality threshold t=" + std::to_string(t) +
                                " must be below n=" + std::to_string(n));
  }
  if (x.size() != n) throw std::invalid_argument("cardinality penalty: arity mismatch");
  double s = 0.0;
  for (double v : x) s += v;
  return (static_cast<double>(n) - s) / static_cast<double>(n - t);
}

RelaxedFunction CardinalityConstraint(std::size_t n, std::size_t t) {
  if (t >= n) {
    throw std::invalid_argument("cardinality threshold t=" + std::to_string(t) +
                                " must be below n=" + std::to_string(n));
  }
  const double slope = -1.0 / static_cast<double>(n - t);
  return RelaxedFunction(
      n, Structure::kAffine, [n, t](std::span<const double> x) { return CardinalityPenalty(n, t, x); },
      [n, t, slope](std::span<const double> x, std::span<double> grad) {
        std::fill(grad.begin(), grad.end(), slope);
        return CardinalityPenalty(n, t, x);
      },
      "cardinality");
}

RelaxedFunction NormalizeConstraint(const RelaxedFunction& g, const NormalizationSpec& spec) {
  if (!(spec.g_min_plus > spec.g_min)) {
    throw std::invalid_argument("normalization needs g_min_plus > g_min");
  }
  const double span = spec.g_min_plus - spec.g_min;
  return AffineTransform(g, 1.0 / span, -spec.g_min / span);
}

RelaxedFunction LinearObjective(std::vector<double> weights) {
  auto w = std::make_shared<const std::vector<double>>(std::move(weights));
  const std::size_t n = w->size();
  auto value = [w](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (*w)[i] * x[i];
    return s;
  };
  return RelaxedFunction(
      n, Structure::kAffine, value,
      [w, value](std::span<const double> x, std::span<double> grad) {
        std::copy(w->begin(), w->end(), grad.begin());
        return value(x);
      },
      "linear");
}

// ---------------------------------------------------------------------------

double PenalizedLoss::ValueAndGradient(std::span<const double> x, std::span<double> grad) const {
  std::vector<double> gg(grad.size());
  const double f = objective.ValueAndGradient(x, grad);
  const double g = constraint_sum.ValueAndGradient(x, gg);
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += beta * gg[i];
  return f + f_offset + beta * g;
}

PenalizedLoss AssemblePenalized(RelaxedFunction objective, std::vector<RelaxedFunction> constraints,
                                double beta, double f_offset) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("beta must be positive and finite");
  }
  const std::size_t n = objective.arity();
  for (const auto& c : constraints) {
    if (c.arity() != n) {
      throw std::invalid_argument("constraint '" + c.name() + "' has arity " +
                                  std::to_string(c.arity()) + ", objective has " +
                                  std::to_string(n));
    }
  }
  PenalizedLoss loss;
  loss.constraint_sum = SumOf(n, constraints);
  loss.objective = std::move(objective);
  loss.constraints = std::move(constraints);
  loss.beta = beta;
  loss.f_offset = f_offset;
  return loss;
}

// ---------------------------------------------------------------------------

double BetaMargin(double max_f) { return std::max(1.0, 0.01 * std::abs(max_f)); }

BetaBound EnumerateBetaBound(std::size_t n, const std::function<double(const BinaryVector&)>& f,
                             const std::function<bool(const BinaryVector&)>& feasible) {
  if (n > static_cast<std::size_t>(kMaxBetaEnumeration)) {
    throw std::invalid_argument("beta enumeration capped at n=" +
                                std::to_string(kMaxBetaEnumeration) + "; supply a bound");
  }
  BetaBound bound;
  bound.provenance = "enumerated";
  double max_feasible = -std::numeric_limits<double>::infinity();
  double min_feasible = std::numeric_limits<double>::infinity();
  double min_all = std::numeric_limits<double>::infinity();
  BinaryVector x(n, 0);
  const std::size_t total = std::size_t{1} << n;
  for (std::size_t k = 0; k < total; ++k) {
    for (std::size_t j = 0; j < n; ++j) x[j] = (k >> j) & 1U;
    const double v = f(x);
    min_all = std::min(min_all, v);
    if (feasible(x)) {
      ++bound.feasible_count;
      max_feasible = std::max(max_feasible, v);
      min_feasible = std::min(min_feasible, v);
    }
  }
  if (bound.feasible_count == 0) {
    throw NoFeasiblePointError("no feasible point among all " + std::to_string(total) +
                               " binary assignments");
  }
  bound.max_feasible_f = max_feasible;
  bound.min_feasible_f = min_feasible;
  bound.min_f = min_all;
  bound.beta = max_feasible + BetaMargin(max_feasible);
  return bound;
}

BetaBound UserBetaBound(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("user beta must be positive and finite");
  }
  BetaBound bound;
  bound.beta = beta;
  bound.provenance = "user";
  return bound;
}

// ---------------------------------------------------------------------------

RelaxedFunction BadlossWarp(const RelaxedFunction& f) {
  constexpr double kFreq = 4.5 * std::numbers::pi;
  auto warp = [](std::span<const double> x) {
    std::vector<double> w(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) w[i] = std::sin(kFreq * x[i]);
    // sin(9 pi / 2) is 1 only up to rounding; pin the vertices exactly.
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0.0) w[i] = 0.0;
      if (x[i] == 1.0) w[i] = 1.0;
    }
    return w;
  };
  return RelaxedFunction(
      f.arity(), Structure::kUnconstrained,
      [f, warp](std::span<const double> x) { return f(warp(x)); },
      [f, warp](std::span<const double> x, std::span<double> grad) {
        const auto w = warp(x);
        const double v = f.ValueAndGradient(w, grad);
        for (std::size_t i = 0; i < x.size(); ++i) grad[i] *= kFreq * std::cos(kFreq * x[i]);
        return v;
      },
      "badloss(" + f.name() + ")");
}

}  // namespace relaxround
