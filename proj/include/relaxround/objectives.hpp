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

#ifndef RELAXROUND_OBJECTIVES_HPP
#define RELAXROUND_OBJECTIVES_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relaxround/graph.hpp"
#include "relaxround/relaxed.hpp"

namespace relaxround {

// ---------------------------------------------------------------------------
// Max clique (node variables)

// -(beta + 1) sum_{(i,j) in E} x_i x_j + (beta / 2) sum_{i != j} x_i x_j,
// the second sum running over ordered pairs.
double MaxCliqueLoss(const GraphInstance& g, std::span<const double> x, double beta);

// The same loss split as f + beta * g:
//   f = -sum_{E} x_i x_j         (minus the number of selected edges)
//   g = sum_{non-edges i<j} x_i x_j  (selected non-adjacent pairs; g < 1 iff clique)
struct CliqueRelaxation {
  RelaxedFunction objective;
  RelaxedFunction constraint;
};
CliqueRelaxation MaxCliqueRelaxation(const GraphInstance& g);

// ---------------------------------------------------------------------------
// Edge-variable constraints

// sum_v prod_{e ni v} (1 - x_e). Isolated nodes contribute 1.
double EdgeCoverPenalty(const GraphInstance& g, std::span<const double> x);
// Same quantity through exp(sum log(1 - x_e)), with log arguments floored at
// 1e-12. Agrees with EdgeCoverPenalty up to that floor.
double EdgeCoverPenaltyLogSumExp(const GraphInstance& g, std::span<const double> x);
// sum_v [prod_{e ni v} (1 - x_e) + sum_{unordered e1 != e2 ni v} x_e1 x_e2].
double NodeMatchingPenalty(const GraphInstance& g, std::span<const double> x);

RelaxedFunction EdgeCoverConstraint(const GraphInstance& g);
RelaxedFunction NodeMatchingConstraint(const GraphInstance& g);

// ---------------------------------------------------------------------------
// Cardinality: at least t + 1 of n selected, normalized so g < 1 iff sum x > t.

double CardinalityPenalty(std::size_t n, std::size_t t, std::span<const double> x);
RelaxedFunction CardinalityConstraint(std::size_t n, std::size_t t);

// ---------------------------------------------------------------------------
// Normalization g -> (g - g_min) / (g_min_plus - g_min)

struct NormalizationSpec {
  double g_min = 0.0;
  double g_min_plus = 1.0;
};

RelaxedFunction NormalizeConstraint(const RelaxedFunction& g, const NormalizationSpec& spec);

// sum_i w_i x_i
RelaxedFunction LinearObjective(std::vector<double> weights);

// ---------------------------------------------------------------------------
// Penalized loss  l_r = f_r + f_offset + beta * sum_j g_r^(j)

struct PenalizedLoss {
  RelaxedFunction objective;
  std::vector<RelaxedFunction> constraints;
  RelaxedFunction constraint_sum;
  double beta = 1.0;
  // Constant added to the objective (the shift making min f >= 0).
  double f_offset = 0.0;

  std::size_t arity() const { return objective.arity(); }
  Structure structure() const {
    return JoinStructure(objective.structure(), constraint_sum.structure());
  }
  double F(std::span<const double> x) const { return objective(x) + f_offset; }
  double G(std::span<const double> x) const { return constraint_sum(x); }
  double operator()(std::span<const double> x) const { return F(x) + beta * G(x); }
  double ValueAndGradient(std::span<const double> x, std::span<double> grad) const;
};

PenalizedLoss AssemblePenalized(RelaxedFunction objective, std::vector<RelaxedFunction> constraints,
                                double beta, double f_offset = 0.0);

// ---------------------------------------------------------------------------
// Penalty weight

struct BetaBound {
  double beta = 0.0;
  // Max and min of f over feasible points, and min over all points, when enumerated.
  std::optional<double> max_feasible_f;
  std::optional<double> min_feasible_f;
  std::optional<double> min_f;
  std::size_t feasible_count = 0;
  std::string provenance;  // "enumerated" or "user"
};

inline constexpr int kMaxBetaEnumeration = 22;

class NoFeasiblePointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact max of f over {X : feasible(X)} plus max(1, 1% of |max|). n is capped
// at kMaxBetaEnumeration. Throws NoFeasiblePointError when nothing is feasible.
BetaBound EnumerateBetaBound(std::size_t n, const std::function<double(const BinaryVector&)>& f,
                             const std::function<bool(const BinaryVector&)>& feasible);
// Passthrough of a caller-supplied bound.
BetaBound UserBetaBound(double beta);

double BetaMargin(double max_f);

// ---------------------------------------------------------------------------
// Ablation warp: x -> f(sin(9 pi x / 2)) per entry. Agrees with f on {0,1}^n.

RelaxedFunction BadlossWarp(const RelaxedFunction& f);

}  // namespace relaxround

#endif  // RELAXROUND_OBJECTIVES_HPP
