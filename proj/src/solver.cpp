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

#include "relaxround/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "relaxround/ewconcave.hpp"
#include "relaxround/rng.hpp"

namespace relaxround {

namespace {

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::vector<double> AsDoubles(const BinaryVector& x) { return {x.begin(), x.end()}; }

}  // namespace

const char* ParameterizationName(Parameterization p) {
  return p == Parameterization::kLogistic ? "logistic" : "clipped";
}

Parameterization ParseParameterization(const std::string& name) {
  if (name == "logistic") return Parameterization::kLogistic;
  if (name == "clipped") return Parameterization::kClipped;
  throw std::invalid_argument("unknown parameterization '" + name + "'");
}

const char* RoundingOrderName(RoundingOrder order) {
  switch (order) {
    case RoundingOrder::kIndex:
      return "index";
    case RoundingOrder::kByConfidence:
      return "by_confidence";
    case RoundingOrder::kByValue:
      return "by_value";
  }
  return "index";
}

RoundingOrder ParseRoundingOrder(const std::string& name) {
  if (name == "index") return RoundingOrder::kIndex;
  if (name == "by_confidence") return RoundingOrder::kByConfidence;
  if (name == "by_value") return RoundingOrder::kByValue;
  throw std::invalid_argument("unknown rounding order '" + name +
                              "' (expected index, by_confidence or by_value)");
}

void OptimizeConfig::Validate() const {
  if (restarts < 1) throw std::invalid_argument("restarts must be at least 1");
  if (!(step_size > 0.0)) throw std::invalid_argument("step_size must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw std::invalid_argument("momentum must lie in [0, 1)");
  }
}

nlohmann::json OptimizeConfig::ToJson() const {
  return {{"restarts", restarts},
          {"steps", steps},
          {"step_size", step_size},
          {"parameterization", ParameterizationName(parameterization)},
          {"momentum", momentum},
          {"seed", seed}};
}

OptimizeConfig OptimizeConfig::FromJson(const nlohmann::json& j) {
  OptimizeConfig c;
  c.restarts = j.value("restarts", c.restarts);
  c.steps = j.value("steps", c.steps);
  c.step_size = j.value("step_size", c.step_size);
  if (j.contains("parameterization")) {
    c.parameterization = ParseParameterization(j.at("parameterization").get<std::string>());
  }
  c.momentum = j.value("momentum", c.momentum);
  c.seed = j.value("seed", c.seed);
  c.Validate();
  return c;
}

SoftAssignment OptimizeRelaxed(const PenalizedLoss& loss, Scope scope,
                               const OptimizeConfig& config) {
  config.Validate();
  const std::size_t n = loss.arity();
  const double b1 = config.momentum;
  const double b2 = 0.999;
  const double eps = 1e-8;
  const Rng base = Rng(config.seed).Split("optimize");

  std::vector<double> best_x(n, 0.5);
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<double> param(n), x(n), grad(n), m(n), v(n);
  for (std::size_t r = 0; r < config.restarts; ++r) {
    Rng rng = base.Split(static_cast<std::uint64_t>(r));
    for (std::size_t i = 0; i < n; ++i) {
      const double x0 = rng.Uniform(0.05, 0.95);
      param[i] = config.parameterization == Parameterization::kLogistic
                     ? std::log(x0 / (1.0 - x0))
                     : x0;
    }
    std::fill(m.begin(), m.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
    auto to_box = [&] {
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = config.parameterization == Parameterization::kLogistic ? Sigmoid(param[i])
                                                                      : param[i];
      }
    };
    for (std::size_t t = 1; t <= config.steps; ++t) {
      to_box();
      const double value = loss.ValueAndGradient(x, grad);
      if (!std::isfinite(value)) {
        throw OptimizationError("non-finite loss in restart " + std::to_string(r) + " at step " +
                                    std::to_string(t),
                                r);
      }
      const double c1 = b1 > 0.0 ? 1.0 - std::pow(b1, static_cast<double>(t)) : 1.0;
      const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
      for (std::size_t i = 0; i < n; ++i) {
        double g = grad[i];
        if (config.parameterization == Parameterization::kLogistic) g *= x[i] * (1.0 - x[i]);
        m[i] = b1 * m[i] + (1.0 - b1) * g;
        v[i] = b2 * v[i] + (1.0 - b2) * g * g;
        param[i] -= config.step_size * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
        if (config.parameterization == Parameterization::kClipped) {
          param[i] = std::clamp(param[i], 0.0, 1.0);
        }
      }
    }
    to_box();
    const double value = loss(x);
    if (!std::isfinite(value)) {
      throw OptimizationError("non-finite loss in restart " + std::to_string(r), r);
    }
    if (value < best_value) {
      best_value = value;
      best_x = x;
    }
  }
  return SoftAssignment(scope, std::move(best_x));
}

std::vector<std::size_t> RoundingPermutation(const std::vector<double>& x, RoundingOrder order) {
  std::vector<std::size_t> perm(x.size());
  std::iota(perm.begin(), perm.end(), 0);
  if (order == RoundingOrder::kByConfidence) {
    std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(x[a] - 0.5) > std::abs(x[b] - 0.5);
    });
  } else if (order == RoundingOrder::kByValue) {
    std::stable_sort(perm.begin(), perm.end(),
                     [&](std::size_t a, std::size_t b) { return x[a] > x[b]; });
  }
  return perm;
}

SolveResult SequentialRound(const PenalizedLoss& loss, const SoftAssignment& soft,
                            RoundingOrder order) {
  const std::size_t n = loss.arity();
  if (soft.size() != n) {
    throw std::invalid_argument("soft assignment has " + std::to_string(soft.size()) +
                                " entries, loss expects " + std::to_string(n));
  }
  SolveResult result;
  result.soft = soft;
  result.order = order;
  result.beta = loss.beta;
  result.f_offset = loss.f_offset;

  std::vector<double> x = soft.values();
  auto checked = [](double v, const char* what) {
    if (!std::isfinite(v)) throw std::runtime_error(std::string("non-finite ") + what + " during rounding");
    return v;
  };
  result.l_r_initial = checked(loss(x), "loss");
  result.loss_trace.push_back(result.l_r_initial);

  for (std::size_t i : RoundingPermutation(x, order)) {
    if (x[i] == 0.0 || x[i] == 1.0) continue;
    x[i] = 0.0;
    const double g0 = checked(loss.G(x), "constraint");
    const double l0 = checked(loss.F(x) + loss.beta * g0, "loss");
    x[i] = 1.0;
    const double g1 = checked(loss.G(x), "constraint");
    const double l1 = checked(loss.F(x) + loss.beta * g1, "loss");
    const bool pick_one = l1 < l0 || (l1 == l0 && g1 < g0);
    x[i] = pick_one ? 1.0 : 0.0;
    result.loss_trace.push_back(pick_one ? l1 : l0);
    result.rounding_sequence.push_back(i);
  }

  result.rounded.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.rounded[i] = x[i] == 1.0 ? 1 : 0;
  result.f_final = loss.F(x);
  result.g_final = loss.G(x);
  return result;
}

bool VerifyGuarantee(SolveResult& result, const PenalizedLoss& loss, std::optional<double> exact_f,
                     std::optional<double> exact_g, const GuaranteeOptions& options) {
  const std::size_t n = loss.arity();
  result.objective_concave =
      loss.objective.structure() != Structure::kUnconstrained &&
      CheckEntrywiseConcave(loss.objective, n, options.concavity_trials, kDefaultStructureTol,
                            options.seed)
          .passed;
  result.constraint_concave =
      loss.constraint_sum.structure() != Structure::kUnconstrained &&
      CheckEntrywiseConcave(loss.constraint_sum, n, options.concavity_trials, kDefaultStructureTol,
                            options.seed + 1)
          .passed;
  result.min_f_nonnegative = options.min_f_nonnegative;
  result.proxy_values = options.proxy_values;
  result.exact_f = exact_f;
  result.exact_g = exact_g;
  result.guarantee_applicable = result.objective_concave && result.constraint_concave &&
                                result.l_r_initial < loss.beta && options.min_f_nonnegative;
  result.guarantee_holds = result.g_final < 1.0 && result.f_final <= result.l_r_initial;
  result.strict_decrease = result.f_final < result.l_r_initial;
  return !result.guarantee_applicable || result.guarantee_holds;
}

nlohmann::json SolveResult::ToJson() const {
  nlohmann::json j;
  j["soft"] = soft.values();
  j["scope"] = ScopeName(soft.scope());
  j["rounded"] = std::vector<int>(rounded.begin(), rounded.end());
  j["loss_trace"] = loss_trace;
  j["rounding_sequence"] = rounding_sequence;
  j["order"] = RoundingOrderName(order);
  j["l_r_initial"] = l_r_initial;
  j["f_final"] = f_final;
  j["g_final"] = g_final;
  j["beta"] = beta;
  j["f_offset"] = f_offset;
  j["objective_concave"] = objective_concave;
  j["constraint_concave"] = constraint_concave;
  j["min_f_nonnegative"] = min_f_nonnegative;
  j["guarantee_applicable"] = guarantee_applicable;
  j["guarantee_holds"] = guarantee_holds;
  j["strict_decrease"] = strict_decrease;
  j["proxy_values"] = proxy_values;
  j["exact_f"] = exact_f ? nlohmann::json(*exact_f) : nlohmann::json(nullptr);
  j["exact_g"] = exact_g ? nlohmann::json(*exact_g) : nlohmann::json(nullptr);
  j["feasible"] = feasible();
  return j;
}

// ---------------------------------------------------------------------------

namespace {

void CheckProblem(const ProblemDefinition& problem) {
  if (!problem.objective) throw std::invalid_argument("problem has no objective");
  for (const auto& c : problem.constraints) {
    if (c.arity() != problem.objective.arity()) {
      throw std::invalid_argument("constraint arity differs from the objective's");
    }
  }
}

RelaxedFunction ConstraintSum(const ProblemDefinition& problem) {
  return SumOf(problem.objective.arity(), problem.constraints);
}

}  // namespace

BetaBound ResolveBeta(const ProblemDefinition& problem) {
  CheckProblem(problem);
  if (problem.beta) return UserBetaBound(*problem.beta);
  const std::size_t n = problem.objective.arity();
  const RelaxedFunction g = ConstraintSum(problem);
  const RelaxedFunction& f = problem.objective;
  const double offset = problem.f_offset;
  auto value = [&](const BinaryVector& x) { return f(AsDoubles(x)) + offset; };
  try {
    return EnumerateBetaBound(n, value, [&](const BinaryVector& x) { return g(AsDoubles(x)) < 1.0; });
  } catch (const NoFeasiblePointError&) {
    // Nothing is feasible: bound over every point so the run still produces a report.
    BetaBound bound = EnumerateBetaBound(n, value, [](const BinaryVector&) { return true; });
    bound.max_feasible_f.reset();
    bound.min_feasible_f.reset();
    bound.feasible_count = 0;
    bound.provenance = "no_feasible_point";
    return bound;
  }
}

SolveResult Solve(const ProblemDefinition& problem, const SolveConfig& config) {
  CheckProblem(problem);
  const std::size_t n = problem.objective.arity();
  const BetaBound bound = ResolveBeta(problem);

  bool min_f_nonnegative = false;
  if (problem.min_f_nonnegative) {
    min_f_nonnegative = *problem.min_f_nonnegative;
  } else if (bound.min_f) {
    min_f_nonnegative = *bound.min_f >= 0.0;
  } else if (n <= static_cast<std::size_t>(kMaxBetaEnumeration)) {
    double lo = std::numeric_limits<double>::infinity();
    std::vector<double> x(n);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>((mask >> i) & 1U);
      lo = std::min(lo, problem.objective(x) + problem.f_offset);
    }
    min_f_nonnegative = lo >= 0.0;
  }

  const PenalizedLoss loss =
      AssemblePenalized(problem.objective, problem.constraints, bound.beta, problem.f_offset);
  const SoftAssignment soft = OptimizeRelaxed(loss, problem.scope, config.optimize);
  SolveResult result = SequentialRound(loss, soft, config.order);

  std::optional<double> exact_f, exact_g;
  if (problem.exact_f) exact_f = problem.exact_f(result.rounded);
  if (problem.exact_g) exact_g = problem.exact_g(result.rounded);
  GuaranteeOptions options;
  options.min_f_nonnegative = min_f_nonnegative;
  options.proxy_values = problem.proxy_objective;
  options.concavity_trials = config.concavity_trials;
  options.seed = Rng(config.optimize.seed).Split("concavity").NextU64();
  VerifyGuarantee(result, loss, exact_f, exact_g, options);
  return result;
}

}  // namespace relaxround
