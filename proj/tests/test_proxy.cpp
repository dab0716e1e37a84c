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

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "oracles.hpp"
#include "random_proxy.hpp"
#include "relaxround/ewconcave.hpp"
#include "relaxround/proxy.hpp"

using namespace relaxround;
using oracle::ParamsFunction;
using oracle::RandomConnectedish;
using oracle::RandomParams;

namespace {

// Single edge, F = 1, W = 1, U = (2, 3), Q = 4, w = 1.
ProxyParams SingleEdge(const GraphInstance& g) {
  ProxyParams p = ProxyParams::Zeros(LatentKind::kSecondOrder, HeadKind::kAffine, 1, g);
  p.W = {1.0};
  p.U = {{2.0}, {3.0}};
  p.Q = {{4.0}};
  p.w = {1.0};
  return p;
}

ProxyParams Scalar(const GraphInstance& g, double W, double w, double b) {
  ProxyParams p = ProxyParams::Zeros(LatentKind::kSecondOrder, HeadKind::kConcave, 1, g);
  p.W = {W};
  p.w = {w};
  p.b = b;
  return p;
}

// Path of three nodes with edge weights linear in the endpoint attributes.
std::vector<DatasetRow> LinearEdgeDataset(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<DatasetRow> rows;
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<std::vector<double>> attrs;
    for (int v = 0; v < 3; ++v) attrs.push_back({rng.Uniform()});
    const GraphInstance g = MakePath(3, attrs);
    DatasetRow row{g, {}};
    double cost = 0.0;
    for (int e = 0; e < 2; ++e) {
      const std::uint8_t bit = rng.Bernoulli(0.5) ? 1 : 0;
      row.label.assignment.push_back(bit);
      const Edge& ed = g.edge(e);
      cost += bit * (g.node_attrs(ed.u)[0] + g.node_attrs(ed.v)[0] + 0.5);
    }
    row.label.cost = cost;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

TEST_CASE("second-order latent examples") {
  const GraphInstance g = MakePath(2);
  const ProxyParams p = SingleEdge(g);
  const std::vector<double> zero{0, 0}, ones{1, 1};
  CHECK(PhiSecondOrder(p, g, zero) == p.W);
  CHECK(PhiSecondOrder(p, g, ones)[0] == 10.0);
  const ProxyGradient grad = ProxyGradientOf(p, g, ones);
  CHECK(grad.value == 10.0);
  CHECK(grad.dx[0] == 6.0);
  CHECK(grad.dx[1] == 7.0);
}

TEST_CASE("higher-order latent examples") {
  Rng rng(1);
  const GraphInstance g = MakePath(4);
  ProxyParams p = RandomParams(g, LatentKind::kHigherOrder, HeadKind::kAffine, 2, rng);
  for (auto& q : p.Q) std::fill(q.begin(), q.end(), 0.0);
  for (auto& q : p.Q_bias) std::fill(q.begin(), q.end(), 1.0);
  const std::vector<double> x{0.1, 0.7, 0.3, 0.9};
  const auto phi = PhiHigherOrder(p, g, x);
  for (std::size_t f = 0; f < 2; ++f) {
    double expect = 0.0;
    for (std::size_t v = 0; v < 4; ++v) expect += p.U[v][f] * x[v] + p.U_bias[v][f];
    CHECK(phi[f] == doctest::Approx(expect));
  }

  // Star with centre 0: the centre term is x_c x_a x_b.
  const GraphInstance star = GraphInstance::Create(3, {{0, 1}, {0, 2}});
  ProxyParams s = ProxyParams::Zeros(LatentKind::kHigherOrder, HeadKind::kAffine, 1, star);
  s.U[0] = {1.0};
  s.Q = {{1.0}, {1.0}};
  s.w = {1.0};
  const std::vector<double> y{0.5, 0.4, 0.3};
  CHECK(PhiHigherOrder(s, star, y)[0] == doctest::Approx(0.5 * 0.4 * 0.3));
}

TEST_CASE("concave head examples") {
  const GraphInstance g = MakePath(2);
  const std::vector<double> x{0.3, 0.6};
  CHECK(ConEval(Scalar(g, 3.0, 0.0, 1.5), g, x) == 1.5);
  CHECK(ConEval(Scalar(g, -2.0, 1.0, 0.0), g, x) == 0.0);
  CHECK(ConEval(Scalar(g, 3.0, 2.0, 1.0), g, x) == -5.0);
  const ProxyGradient grad = ProxyGradientOf(Scalar(g, 3.0, 0.0, 1.5), g, x);
  CHECK(grad.dx == std::vector<double>{0.0, 0.0});
  CHECK_THROWS(Scalar(g, 1.0, -0.5, 0.0).Validate(g));
}

TEST_CASE("structure holds for random parameters") {
  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + static_cast<int>(rng.Below(5));
    const GraphInstance g = RandomConnectedish(n, 0.5, rng);
    const std::size_t arity = static_cast<std::size_t>(n);
    const auto con = ParamsFunction(RandomParams(g, LatentKind::kSecondOrder, HeadKind::kConcave, 4, rng), g);
    CHECK(CheckEntrywiseConcave(con, arity, 50, kDefaultStructureTol, rng.NextU64()).passed);
    const auto aff = ParamsFunction(RandomParams(g, LatentKind::kSecondOrder, HeadKind::kAffine, 4, rng), g);
    CHECK(CheckEntrywiseAffine(aff, arity, 50, kDefaultStructureTol, rng.NextU64()).passed);
    const auto hi = ParamsFunction(RandomParams(g, LatentKind::kHigherOrder, HeadKind::kAffine, 4, rng), g);
    CHECK(CheckEntrywiseAffine(hi, arity, 50, kDefaultStructureTol, rng.NextU64()).passed);
  }
}

TEST_CASE("gradients match central differences") {
  Rng rng(3);
  for (int t = 0; t < 60; ++t) {
    const GraphInstance g = RandomConnectedish(4, 0.5, rng);
    const auto latent = t % 2 == 0 ? LatentKind::kSecondOrder : LatentKind::kHigherOrder;
    const ProxyParams p = RandomParams(g, latent, HeadKind::kAffine, 3, rng);
    std::vector<double> x(4);
    for (double& v : x) v = rng.Uniform();
    const auto fd = oracle::CentralDifference([&](std::span<const double> y) { return ProxyEval(p, g, y); },
                                              x, 1e-5);
    CHECK(oracle::RelativeError(ProxyGradientOf(p, g, x).dx, fd) <= 1e-5);
  }
}

TEST_CASE("feature-map gradients match central differences") {
  DatasetConfig dc;
  dc.family = "cover";
  dc.count = 1;
  dc.grid_rows = 2;
  dc.grid_cols = 2;
  const auto row = SampleDataset(dc, 3).front();
  for (Architecture arch : {Architecture::kAff, Architecture::kCon, Architecture::kHigher}) {
    ProxyModel model(arch, Scope::kEdge, 3, 2, 0, 7);
    const GraphInstance prepared = model.Prepare(row.instance);
    const std::vector<double> x{0.2, 0.9, 0.4, 0.6};
    auto value = [&](const ProxyModel& m) { return ProxyEval(m.Encode(prepared), prepared, x); };
    std::vector<double> analytic(model.weights().size(), 0.0);
    model.Backward(prepared, ProxyGradientOf(model.Encode(prepared), prepared, x).dparams, analytic);
    std::vector<double> fd(analytic.size());
    for (std::size_t k = 0; k < fd.size(); ++k) {
      ProxyModel m = model;
      m.weights()[k] += 1e-5;
      const double up = value(m);
      m.weights()[k] -= 2e-5;
      fd[k] = (up - value(m)) / 2e-5;
    }
    CHECK(oracle::RelativeError(analytic, fd) <= 1e-5);
  }
}

TEST_CASE("linear edge objective is learned to MSE below 1e-4") {
  const auto data = LinearEdgeDataset(200, 5);
  TrainConfig tc;
  tc.steps = 600;
  tc.step_size = 0.03;
  tc.batch = 32;
  tc.width = 4;
  const TrainResult r = TrainProxy(data, tc, Architecture::kAff, Scope::kEdge);
  CHECK(r.final_mse < 1e-4);
  CHECK(r.loss_curve.size() == tc.steps);
}

TEST_CASE("constant labels are fit by the concave head") {
  auto data = LinearEdgeDataset(50, 6);
  for (auto& row : data) row.label.cost = 4.25;
  TrainConfig tc;
  tc.steps = 500;
  tc.step_size = 0.1;
  const TrainResult r = TrainProxy(data, tc, Architecture::kCon, Scope::kEdge);
  CHECK(r.final_mse < 1e-8);
}

TEST_CASE("toy landscape: concave proxy generalizes") {
  DatasetConfig dc;
  dc.count = 1500;
  const auto train = SampleDataset(dc, 21);
  dc.count = 300;
  const auto held_out = SampleDataset(dc, 22);
  TrainConfig tc;
  tc.steps = 300;
  tc.seed = 4;
  const TrainResult r = TrainProxy(train, tc, Architecture::kCon, Scope::kNode);
  double mae = 0.0;
  for (const auto& row : held_out) {
    const RelaxedFunction f = ProxyRelaxation(r.model, row.instance);
    const std::vector<double> x(row.label.assignment.begin(), row.label.assignment.end());
    mae += std::abs(f(x) - row.label.cost);
  }
  mae /= static_cast<double>(held_out.size());
  CHECK(mae < 1.0);
}

TEST_CASE("training is deterministic and keeps concave heads nonnegative") {
  DatasetConfig dc;
  dc.count = 200;
  const auto data = SampleDataset(dc, 8);
  TrainConfig tc;
  tc.steps = 20;
  tc.step_size = 0.2;
  tc.seed = 3;
  for (std::size_t steps = 1; steps <= 20; steps += 19) {
    tc.steps = steps;
    const TrainResult a = TrainProxy(data, tc, Architecture::kCon, Scope::kNode);
    const TrainResult b = TrainProxy(data, tc, Architecture::kCon, Scope::kNode);
    CHECK(a.model.weights() == b.model.weights());
    const auto head = a.model.head_weights();
    CHECK(*std::min_element(head.begin(), head.end()) >= 0.0);
  }
  tc.projection = false;
  const TrainResult free = TrainProxy(data, tc, Architecture::kCon, Scope::kNode);
  CHECK(std::isfinite(free.final_mse));
}

TEST_CASE("divergence is reported") {
  DatasetConfig dc;
  dc.count = 20;
  auto data = SampleDataset(dc, 1);
  data[3].label.cost = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(TrainProxy(data, TrainConfig{}, Architecture::kAff, Scope::kNode), std::exception);
  CHECK_THROWS(TrainProxy({}, TrainConfig{}, Architecture::kAff, Scope::kNode));
}

TEST_CASE("checkpoint round trip") {
  DatasetConfig dc;
  dc.family = "match";
  dc.count = 30;
  dc.grid_rows = 2;
  dc.grid_cols = 2;
  const auto data = SampleDataset(dc, 2);
  TrainConfig tc;
  tc.steps = 5;
  for (Architecture arch : {Architecture::kAff, Architecture::kCon, Architecture::kHigher}) {
    const TrainResult r = TrainProxy(data, tc, arch, Scope::kEdge);
    const auto path = std::filesystem::temp_directory_path() / "relaxround_ckpt.json";
    SaveCheckpoint(r.model, path);
    const ProxyModel back = LoadCheckpoint(path);
    CHECK(back.architecture() == arch);
    CHECK(back.weights() == r.model.weights());
    CHECK(back.config_hash == tc.Hash());
    const std::vector<double> x{0.1, 0.5, 0.7, 0.2};
    CHECK(ProxyRelaxation(back, data[0].instance)(x) == ProxyRelaxation(r.model, data[0].instance)(x));
  }
  nlohmann::json bad = CheckpointToJson(ProxyModel(Architecture::kAff, Scope::kNode, 2, 1, 0, 1));
  bad["version"] = 99;
  CHECK_THROWS(CheckpointFromJson(bad));
}

TEST_CASE("unstructured baseline trains") {
  DatasetConfig dc;
  dc.count = 400;
  const auto data = SampleDataset(dc, 12);
  TrainConfig tc;
  tc.steps = 100;
  const MlpTrainResult r = TrainMlpProxy(data, tc, Scope::kNode, 16);
  REQUIRE(r.mse_curve.size() == 100);
  CHECK(r.mse_curve.back() < r.mse_curve.front());
  const RelaxedFunction f = MlpRelaxation(r.model, data[0].instance);
  CHECK(f.structure() == Structure::kUnconstrained);
  const std::vector<double> x{0.3, 0.8};
  std::vector<double> grad(2);
  f.ValueAndGradient(x, grad);
  const auto fd = oracle::CentralDifference([&](std::span<const double> y) { return f(y); }, x, 1e-5);
  CHECK(oracle::RelativeError(grad, fd) <= 1e-5);
}
