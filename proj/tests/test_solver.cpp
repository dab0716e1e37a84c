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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "relaxround/baselines.hpp"
#include "relaxround/ewconcave.hpp"
#include "relaxround/objectives.hpp"
#include "relaxround/problems.hpp"
#include "relaxround/solver.hpp"

using namespace relaxround;

namespace {

ProblemDefinition ToyProblem(double c1, double c2) {
  ProblemDefinition p;
  p.name = "toy";
  p.scope = Scope::kNode;
  p.objective = MultilinearExtension(BooleanTable::Tabulate(
      2, [&](const BinaryVector& x) { return ToyGroundTruthCost(c1, c2, x[0], x[1]); }));
  p.exact_f = [=](const BinaryVector& x) { return ToyGroundTruthCost(c1, c2, x[0], x[1]); };
  return p;
}

GraphInstance GridWithAttrs(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> attrs;
  for (int v = 0; v < rows * cols; ++v) attrs.push_back({static_cast<double>(rng.Below(100))});
  return MakeGrid(rows, cols, attrs);
}

}  // namespace

TEST_CASE("separable linear objective goes to the cheaper vertex") {
  const std::vector<double> c{3.0, -2.0, 0.5, -0.1, 4.0};
  const PenalizedLoss loss = AssemblePenalized(LinearObjective(c), {}, 1.0);
  for (Parameterization param : {Parameterization::kLogistic, Parameterization::kClipped}) {
    OptimizeConfig config;
    config.parameterization = param;
    config.seed = 5;
    const SoftAssignment x = OptimizeRelaxed(loss, Scope::kNode, config);
    for (std::size_t i = 0; i < c.size(); ++i) {
      CHECK(std::abs(x.values()[i] - (c[i] < 0 ? 1.0 : 0.0)) <= 0.01);
    }
  }
}

TEST_CASE("toy relaxed optimum is close to the discrete optimum") {
  const ProblemDefinition p = ToyProblem(33, 33);
  const BetaBound b = ResolveBeta(p);
  const PenalizedLoss loss = AssemblePenalized(p.objective, {}, b.beta);
  const SoftAssignment x = OptimizeRelaxed(loss, Scope::kNode, OptimizeConfig{});
  CHECK(loss(x.values()) <= 50.0 + 0.5);

  const SolveResult r = Solve(p, SolveConfig{});
  CHECK(r.rounded == BinaryVector{0, 0});
  CHECK(r.f_final == doctest::Approx(50.0));
  CHECK(r.beta == doctest::Approx(b.beta));
}

TEST_CASE("constant loss") {
  const PenalizedLoss loss = AssemblePenalized(ConstantFunction(3, 2.5), {}, 1.0);
  const SoftAssignment x = OptimizeRelaxed(loss, Scope::kNode, OptimizeConfig{});
  CHECK(loss(x.values()) == 2.5);
}

TEST_CASE("optimizer config validation") {
  OptimizeConfig c;
  c.restarts = 0;
  CHECK_THROWS(c.Validate());
  c = OptimizeConfig{};
  c.momentum = 1.0;
  CHECK_THROWS(c.Validate());
  const OptimizeConfig parsed = OptimizeConfig::FromJson({{"steps", 7}, {"parameterization", "clipped"}});
  CHECK(parsed.steps == 7);
  CHECK(parsed.parameterization == Parameterization::kClipped);
  CHECK(parsed.restarts == 8);
}

TEST_CASE("non-finite loss reports the restart") {
  const RelaxedFunction bad(1, Structure::kUnconstrained, [](std::span<const double> x) {
    return x[0] > 0.5 ? std::nan("") : x[0];
  });
  OptimizeConfig config;
  config.restarts = 3;
  try {
    OptimizeRelaxed(AssemblePenalized(bad, {}, 1.0), Scope::kNode, config);
    FAIL("expected OptimizationError");
  } catch (const OptimizationError& e) {
    CHECK(e.restart() < 3);
  }
}

TEST_CASE("rounding example with a linear objective") {
  const PenalizedLoss loss = AssemblePenalized(LinearObjective({1.0, 1.0}), {}, 10.0);
  for (RoundingOrder order : {RoundingOrder::kIndex, RoundingOrder::kByConfidence, RoundingOrder::kByValue}) {
    const SolveResult r = SequentialRound(loss, SoftAssignment(Scope::kNode, {0.3, 0.7}), order);
    CHECK(r.rounded == BinaryVector{0, 0});
    CHECK(r.f_final == 0.0);
    CHECK(r.l_r_initial == doctest::Approx(1.0));
    CHECK(r.loss_trace.size() == 3);
  }
}

TEST_CASE("binary soft point is left unchanged") {
  const PenalizedLoss loss = AssemblePenalized(LinearObjective({1.0, -1.0, 2.0}), {}, 1.0);
  const SolveResult r = SequentialRound(loss, SoftAssignment(Scope::kNode, {1.0, 0.0, 1.0}),
                                        RoundingOrder::kIndex);
  CHECK(r.rounded == BinaryVector{1, 0, 1});
  CHECK(r.loss_trace.size() == 1);
}

TEST_CASE("triangle rounds to the full clique") {
  const CliqueRelaxation rel = MaxCliqueRelaxation(MakeComplete(3));
  const PenalizedLoss loss = AssemblePenalized(rel.objective, {rel.constraint}, 4.0);
  const SolveResult r =
      SequentialRound(loss, SoftAssignment(Scope::kNode, {0.9, 0.9, 0.9}), RoundingOrder::kIndex);
  CHECK(r.rounded == BinaryVector{1, 1, 1});
  CHECK(r.f_final == doctest::Approx(-3.0));
  for (std::size_t k = 1; k < r.loss_trace.size(); ++k) CHECK(r.loss_trace[k] <= r.loss_trace[k - 1]);
}

TEST_CASE("ties go to lower g, then to zero") {
  // l_r = 2x + 2(1 - x) = 2 everywhere; x = 1 has the lower g.
  const RelaxedFunction f(1, Structure::kAffine, [](std::span<const double> x) { return 2.0 * x[0]; });
  const RelaxedFunction g(1, Structure::kAffine, [](std::span<const double> x) { return 1.0 - x[0]; });
  const PenalizedLoss loss = AssemblePenalized(f, {g}, 2.0);
  const SolveResult r = SequentialRound(loss, SoftAssignment(Scope::kNode, {0.4}), RoundingOrder::kIndex);
  CHECK(r.rounded == BinaryVector{1});
  const PenalizedLoss flat = AssemblePenalized(ConstantFunction(1, 1.0), {}, 1.0);
  CHECK(SequentialRound(flat, SoftAssignment(Scope::kNode, {0.6}), RoundingOrder::kIndex).rounded ==
        BinaryVector{0});
}

TEST_CASE("rounding permutations") {
  const std::vector<double> x{0.5, 0.9, 0.2, 0.05, 0.9};
  CHECK(RoundingPermutation(x, RoundingOrder::kIndex) == std::vector<std::size_t>{0, 1, 2, 3, 4});
  CHECK(RoundingPermutation(x, RoundingOrder::kByConfidence) == std::vector<std::size_t>{3, 1, 4, 2, 0});
  CHECK(RoundingPermutation(x, RoundingOrder::kByValue) == std::vector<std::size_t>{1, 4, 0, 2, 3});
}

TEST_CASE("guarantee is not claimed outside its hypotheses") {
  const GraphInstance g = MakeGrid(2, 2);
  const auto weights = DefaultEdgeWeights(g, ProblemKind::kEdgeCover);
  const ProblemDefinition p = EdgeProblem(g, ProblemKind::kEdgeCover, weights);
  const PenalizedLoss small_beta = AssemblePenalized(p.objective, p.constraints, 0.5, p.f_offset);
  SolveResult r = SequentialRound(small_beta, SoftAssignment(Scope::kEdge, {0.5, 0.5, 0.5, 0.5}),
                                  RoundingOrder::kIndex);
  CHECK(r.l_r_initial >= r.beta);
  CHECK(VerifyGuarantee(r, small_beta, std::nullopt, std::nullopt, GuaranteeOptions{true}));
  CHECK_FALSE(r.guarantee_applicable);

  const ProblemDefinition warped = MaxCliqueProblem(MakeComplete(4), true);
  const SolveResult w = Solve(warped, SolveConfig{});
  CHECK_FALSE(w.objective_concave);
  CHECK_FALSE(w.guarantee_applicable);
}

TEST_CASE("degenerate rounding: holds without strict decrease") {
  const PenalizedLoss loss = AssemblePenalized(LinearObjective({1.0, 2.0}), {}, 10.0);
  SolveResult r = SequentialRound(loss, SoftAssignment(Scope::kNode, {1.0, 0.0}), RoundingOrder::kIndex);
  CHECK(VerifyGuarantee(r, loss, std::nullopt, std::nullopt, GuaranteeOptions{true}));
  CHECK(r.guarantee_applicable);
  CHECK(r.guarantee_holds);
  CHECK_FALSE(r.strict_decrease);
}

TEST_CASE("single-edge cover selects the edge") {
  const GraphInstance g = MakePath(2);
  for (double w : {-3.0, 0.0, 7.5}) {
    const SolveResult r = Solve(EdgeProblem(g, ProblemKind::kEdgeCover, {w}), SolveConfig{});
    CHECK(r.rounded == BinaryVector{1});
    CHECK(r.feasible());
  }
}

TEST_CASE("grid matching") {
  const GraphInstance g34 = GridWithAttrs(3, 4, 1);
  const auto weights = DefaultEdgeWeights(g34, ProblemKind::kNodeMatching);
  const ProblemDefinition p = EdgeProblem(g34, ProblemKind::kNodeMatching, weights);
  const SolveResult r = Solve(p, SolveConfig{});
  CHECK(r.feasible());
  CHECK(oracle::IsPerfectMatching(g34, r.rounded));
  const OracleResult best = BruteForce(weights.size(), p.exact_f, p.exact_g);
  REQUIRE(best.best_X);
  CHECK(p.exact_f(r.rounded) >= best.best_value);

  // Nine nodes admit no perfect matching.
  const GraphInstance g33 = GridWithAttrs(3, 3, 1);
  const ProblemDefinition odd =
      EdgeProblem(g33, ProblemKind::kNodeMatching, DefaultEdgeWeights(g33, ProblemKind::kNodeMatching));
  const SolveResult ro = Solve(odd, SolveConfig{});
  CHECK_FALSE(ro.feasible());
  CHECK_FALSE(ro.guarantee_applicable);
}

TEST_CASE("guarantee soundness and order robustness on random grids") {
  std::size_t applicable = 0;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const GraphInstance g = GridWithAttrs(seed % 2 == 0 ? 3 : 2, 3, seed);
    for (ProblemKind kind : {ProblemKind::kEdgeCover, ProblemKind::kNodeMatching}) {
      const ProblemDefinition p = EdgeProblem(g, kind, DefaultEdgeWeights(g, kind));
      for (RoundingOrder order : {RoundingOrder::kIndex, RoundingOrder::kByConfidence, RoundingOrder::kByValue}) {
        SolveConfig config;
        config.order = order;
        config.optimize.seed = seed;
        const SolveResult r = Solve(p, config);
        if (!r.guarantee_applicable) continue;
        ++applicable;
        CHECK(ExactlyFeasible(p, r.rounded));
        CHECK(r.strict_decrease);
        CHECK(*r.exact_f < r.l_r_initial);
      }
    }
  }
  CHECK(applicable > 0);
}

TEST_CASE("solve is deterministic") {
  const GraphInstance g = GridWithAttrs(3, 3, 4);
  const ProblemDefinition p = EdgeProblem(g, ProblemKind::kEdgeCover, DefaultEdgeWeights(g, ProblemKind::kEdgeCover));
  SolveConfig config;
  config.optimize.seed = 99;
  CHECK(Solve(p, config).ToJson().dump() == Solve(p, config).ToJson().dump());
}

TEST_CASE("result json carries the trace") {
  const SolveResult r = Solve(MaxCliqueProblem(MakeComplete(4)), SolveConfig{});
  const auto j = r.ToJson();
  CHECK(j.at("loss_trace").size() == r.loss_trace.size());
  CHECK(j.at("rounded").size() == 4);
  CHECK(j.contains("guarantee_applicable"));
  CHECK(j.contains("guarantee_holds"));
}
