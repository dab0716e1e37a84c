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

#ifndef RELAXROUND_SOLVER_HPP
#define RELAXROUND_SOLVER_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "relaxround/graph.hpp"
#include "relaxround/objectives.hpp"
#include "relaxround/relaxed.hpp"

namespace relaxround {

enum class Parameterization { kLogistic, kClipped };
enum class RoundingOrder { kIndex, kByConfidence, kByValue };

const char* ParameterizationName(Parameterization p);
Parameterization ParseParameterization(const std::string& name);
const char* RoundingOrderName(RoundingOrder order);
RoundingOrder ParseRoundingOrder(const std::string& name);

struct OptimizeConfig {
  std::size_t restarts = 8;
  std::size_t steps = 500;
  double step_size = 0.1;
  Parameterization parameterization = Parameterization::kLogistic;
  double momentum = 0.9;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument.
  void Validate() const;
  nlohmann::json ToJson() const;
  // Missing keys keep their defaults.
  static OptimizeConfig FromJson(const nlohmann::json& j);
};

class OptimizationError : public std::runtime_error {
 public:
  OptimizationError(const std::string& what, std::size_t restart)
      : std::runtime_error(what), restart_(restart) {}
  std::size_t restart() const { return restart_; }

 private:
  std::size_t restart_;
};

// Adam-style descent on x = sigmoid(z) (logistic) or on x projected to the box
// (clipped), from `restarts` uniform starting points. Returns the restart with
// the lowest final loss; ties go to the lower restart index.
SoftAssignment OptimizeRelaxed(const PenalizedLoss& loss, Scope scope, const OptimizeConfig& config);

struct SolveResult {
  SoftAssignment soft;
  BinaryVector rounded;
  // l_r at the soft point, then after every rounding decision.
  std::vector<double> loss_trace;
  std::vector<std::size_t> rounding_sequence;  // coordinates in the order they were fixed
  double l_r_initial = 0.0;
  double f_final = 0.0;  // f_r(X) + f_offset
  double g_final = 0.0;  // sum of g_r(X)
  double beta = 0.0;
  double f_offset = 0.0;
  RoundingOrder order = RoundingOrder::kByConfidence;

  // Filled by VerifyGuarantee.
  bool objective_concave = false;
  bool constraint_concave = false;
  bool min_f_nonnegative = false;
  bool guarantee_applicable = false;
  // g(X) < 1 and f(X) <= l_r_initial. The inequality on f is strict unless
  // rounding left the loss unchanged (for example a binary soft point with
  // g = 0); strict_decrease records which.
  bool guarantee_holds = false;
  bool strict_decrease = false;
  bool proxy_values = false;  // f_final / g_final come from learned proxies
  std::optional<double> exact_f;
  std::optional<double> exact_g;

  // Feasible under the exact constraint when known, else under g_final.
  bool feasible() const { return exact_g ? *exact_g < 1.0 : g_final < 1.0; }
  nlohmann::json ToJson() const;
};

// Fixes coordinates one at a time to argmin over {0, 1} of the loss with the
// remaining coordinates soft. Ties: lower g wins, then 0. Coordinates that
// are already exactly 0 or 1 are kept and produce no trace entry.
SolveResult SequentialRound(const PenalizedLoss& loss, const SoftAssignment& soft,
                            RoundingOrder order);

// Permutation used by SequentialRound. by_confidence: descending |x - 1/2|;
// by_value: descending x; stable on ties.
std::vector<std::size_t> RoundingPermutation(const std::vector<double>& x, RoundingOrder order);

struct GuaranteeOptions {
  bool min_f_nonnegative = false;  // declared by the problem, with the shift applied
  bool proxy_values = false;
  std::size_t concavity_trials = 200;
  std::uint64_t seed = 0;
};

// Sets the structure flags, guarantee_applicable and guarantee_holds on
// `result`. Returns applicable => holds.
bool VerifyGuarantee(SolveResult& result, const PenalizedLoss& loss, std::optional<double> exact_f,
                     std::optional<double> exact_g, const GuaranteeOptions& options);

// ---------------------------------------------------------------------------
// End-to-end pipeline

using BinaryFunction = std::function<double(const BinaryVector&)>;

struct ProblemDefinition {
  std::string name;
  Scope scope = Scope::kNode;
  RelaxedFunction objective;                 // f_r
  std::vector<RelaxedFunction> constraints;  // normalized g_r
  double f_offset = 0.0;
  // Ground truth at binary points. Unset means "use the relaxations".
  BinaryFunction exact_f;
  BinaryFunction exact_g;
  // Known penalty weight. Unset means enumerate (n <= kMaxBetaEnumeration).
  std::optional<double> beta;
  // Declared min f >= 0 over all of {0,1}^n (shift included). Unset means
  // decide it from the enumeration.
  std::optional<bool> min_f_nonnegative;
  bool proxy_objective = false;
};

struct SolveConfig {
  OptimizeConfig optimize;
  RoundingOrder order = RoundingOrder::kByConfidence;
  std::size_t concavity_trials = 200;
};

// beta bound -> assemble -> optimize -> round -> verify.
SolveResult Solve(const ProblemDefinition& problem, const SolveConfig& config);

// Beta bound the pipeline would use for `problem`.
BetaBound ResolveBeta(const ProblemDefinition& problem);

}  // namespace relaxround

#endif  // RELAXROUND_SOLVER_HPP
