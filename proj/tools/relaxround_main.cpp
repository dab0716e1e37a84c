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

// Command-line front end: dataset generation, proxy training, solving and
// benchmark suites.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "relaxround/baselines.hpp"
#include "relaxround/bench.hpp"
#include "relaxround/graph.hpp"
#include "relaxround/problems.hpp"
#include "relaxround/proxy.hpp"
#include "relaxround/solver.hpp"

namespace fs = std::filesystem;
using namespace relaxround;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitGuaranteeViolation = 3;

constexpr const char* kOutDirEnv = "RELAXROUND_OUT_DIR";

fs::path DefaultOutDir() {
  const char* env = std::getenv(kOutDirEnv);
  return env != nullptr && *env != '\0' ? fs::path(env) : fs::path("relaxround-out");
}

struct GenArgs {
  std::string family = "toy";
  std::size_t count = 1000;
  std::uint64_t seed = 0;
  int rows = 3;
  int cols = 3;
  std::string out;
};

struct InstanceArgs {
  std::string graph = "erdos_renyi";
  int nodes = 20;
  double p = 0.5;
  int rows = 3;
  int cols = 3;
  std::vector<double> attrs;
  std::uint64_t seed = 0;
  std::string out;
};

struct TrainArgs {
  std::string data;
  std::string arch;
  std::string scope = "node";
  std::string loss = "squared";
  TrainConfig config;
  bool no_projection = false;
  std::string resume;
  std::string out;
};

struct SolveArgs {
  std::string instance;
  std::string problem = "maxclique";
  std::optional<double> beta;
  std::string order = "by_confidence";
  std::size_t restarts = 8;
  std::size_t steps = 500;
  double step_size = 0.1;
  std::string parameterization = "logistic";
  std::uint64_t seed = 0;
  std::string checkpoint;
  std::string method = "solver";
  std::string out;
};

struct BenchArgs {
  std::string suite;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
};

void WriteText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int RunGen(const GenArgs& a) {
  DatasetConfig config;
  config.family = a.family;
  config.count = a.count;
  config.grid_rows = a.rows;
  config.grid_cols = a.cols;
  const auto rows = SampleDataset(config, a.seed);
  const fs::path out = a.out.empty() ? DefaultOutDir() / (a.family + ".csv") : fs::path(a.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  WriteDataset(rows, out);
  std::cout << out.string() << "\n";
  return kExitOk;
}

int RunInstance(const InstanceArgs& a) {
  GraphInstance g;
  Rng rng(a.seed);
  if (a.graph == "erdos_renyi") {
    g = MakeErdosRenyi(a.nodes, a.p, rng);
  } else if (a.graph == "grid") {
    std::vector<std::vector<double>> attrs;
    if (!a.attrs.empty()) {
      if (a.attrs.size() != static_cast<std::size_t>(a.rows * a.cols)) {
        throw CLI::ValidationError("--attrs", "expected one attribute per grid node");
      }
      for (double v : a.attrs) attrs.push_back({v});
    } else {
      for (int i = 0; i < a.rows * a.cols; ++i) attrs.push_back({static_cast<double>(rng.Below(100))});
    }
    g = MakeGrid(a.rows, a.cols, std::move(attrs));
  } else if (a.graph == "path" || a.graph == "cycle" || a.graph == "complete") {
    std::vector<std::vector<double>> attrs;
    for (double v : a.attrs) attrs.push_back({v});
    if (!attrs.empty() && attrs.size() != static_cast<std::size_t>(a.nodes)) {
      throw CLI::ValidationError("--attrs", "expected one attribute per node");
    }
    g = a.graph == "path"    ? MakePath(a.nodes, std::move(attrs))
        : a.graph == "cycle" ? MakeCycle(a.nodes, std::move(attrs))
                             : MakeComplete(a.nodes, std::move(attrs));
  } else if (a.graph == "toy") {
    if (a.attrs.size() != 2) throw CLI::ValidationError("--attrs", "toy needs two attributes c1,c2");
    g = GraphInstance::Create(2, {{0, 1}}, {{a.attrs[0]}, {a.attrs[1]}});
  } else {
    throw CLI::ValidationError("--graph", "unknown graph '" + a.graph + "'");
  }
  if (a.out.empty()) {
    std::cout << InstanceToJson(g).dump(2) << "\n";
  } else {
    SaveInstance(g, a.out);
    std::cout << a.out << "\n";
  }
  return kExitOk;
}

int RunTrain(TrainArgs a) {
  const Architecture arch = ParseArchitecture(a.arch);
  const Scope scope = ParseScope(a.scope);
  if (a.loss == "squared") {
    a.config.loss = LossKind::kSquared;
  } else if (a.loss == "huber") {
    a.config.loss = LossKind::kHuber;
  } else {
    throw CLI::ValidationError("--loss", "expected squared or huber");
  }
  a.config.projection = !a.no_projection;
  const auto data = ReadDataset(a.data);
  std::optional<ProxyModel> resume;
  if (!a.resume.empty()) resume = LoadCheckpoint(a.resume);
  const TrainResult r = TrainProxy(data, a.config, arch, scope, resume ? &*resume : nullptr);
  const fs::path out = a.out.empty() ? DefaultOutDir() / (std::string(ArchitectureName(arch)) + ".ckpt.json")
                                     : fs::path(a.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  SaveCheckpoint(r.model, out);
  nlohmann::json summary = {{"checkpoint", out.string()},
                            {"architecture", ArchitectureName(arch)},
                            {"final_loss", r.loss_curve.empty() ? 0.0 : r.loss_curve.back()},
                            {"final_mse", r.final_mse},
                            {"loss_curve", r.loss_curve}};
  std::cout << summary.dump() << "\n";
  return kExitOk;
}

int RunSolve(const SolveArgs& a) {
  const GraphInstance g = LoadInstance(a.instance);
  ProblemSpec spec = ParseProblemSpec(a.problem);
  if (a.beta) {
    if (!(*a.beta > 0.0)) throw CLI::ValidationError("--beta", "must be positive");
    spec.beta = a.beta;
  }
  std::optional<ProxyModel> proxy;
  if (!a.checkpoint.empty()) proxy = LoadCheckpoint(a.checkpoint);
  if (a.method == "badloss") spec.badloss = true;
  const ProblemDefinition problem = BuildProblem(spec, g, proxy ? &*proxy : nullptr);

  SolveConfig config;
  config.optimize.restarts = a.restarts;
  config.optimize.steps = a.steps;
  config.optimize.step_size = a.step_size;
  config.optimize.parameterization = ParseParameterization(a.parameterization);
  config.optimize.seed = a.seed;
  config.order = ParseRoundingOrder(a.order);

  nlohmann::json report;
  bool feasible = false;
  bool violation = false;
  if (a.method == "solver" || a.method == "badloss") {
    const SolveResult r = Solve(problem, config);
    report = r.ToJson();
    feasible = ExactlyFeasible(problem, r.rounded);
    violation = r.guarantee_applicable && !r.guarantee_holds;
  } else {
    BinaryVector x;
    const BetaBound bound = ResolveBeta(problem);
    const PenalizedLoss loss =
        AssemblePenalized(problem.objective, problem.constraints, bound.beta, problem.f_offset);
    const std::size_t n = loss.arity();
    if (a.method == "naive") {
      x = NaiveThresholdRound(OptimizeRelaxed(loss, problem.scope, config.optimize).values());
    } else if (a.method == "sa") {
      x = SimulatedAnnealing(n, PenalizedAtBinary(loss), AnnealingConfig{}, a.seed);
    } else if (a.method == "ga") {
      x = GeneticAlgorithm(n, PenalizedAtBinary(loss), GeneticConfig{}, a.seed);
    } else if (a.method == "oracle") {
      const ProblemDefinition& pref = problem;
      const OracleResult o = BruteForce(
          n, pref.exact_f ? pref.exact_f : PenalizedAtBinary(loss),
          [&pref](const BinaryVector& v) { return ExactlyFeasible(pref, v) ? 0.0 : 1.0; });
      x = o.best_X.value_or(BinaryVector(n, 0));
    } else {
      throw CLI::ValidationError("--method", "expected solver, badloss, naive, sa, ga or oracle");
    }
    report = {{"rounded", std::vector<int>(x.begin(), x.end())}, {"beta", bound.beta}};
    feasible = ExactlyFeasible(problem, x);
    report["objective"] = NaturalObjective(problem, spec.kind, x);
  }
  report["method"] = a.method;
  report["problem"] = spec.ToJson();
  report["feasible"] = feasible;
  if (a.method == "solver" || a.method == "badloss") {
    report["objective"] = NaturalObjective(problem, spec.kind,
                                           BinaryVector(report["rounded"].begin(), report["rounded"].end()));
  }
  const std::string text = report.dump(2) + "\n";
  std::cout << text;
  if (!a.out.empty()) WriteText(a.out, text);
  if (violation) {
    std::cerr << "guarantee violated on an applicable run\n";
    return kExitGuaranteeViolation;
  }
  return feasible ? kExitOk : kExitInfeasible;
}

int RunBenchCommand(const BenchArgs& a) {
  SuiteSpec suite = LoadSuite(a.suite);
  if (a.seed) suite.seed = *a.seed;
  if (a.threads) suite.threads = *a.threads;
  const BenchReport report = RunBench(suite);
  const fs::path out = a.out.empty() ? DefaultOutDir() / suite.name : fs::path(a.out);
  WriteBenchReport(report, out);
  std::cout << report.AggregatesCsv();
  std::cout << "report written to " << out.string() << "\n";
  return report.violations() > 0 ? kExitGuaranteeViolation : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relaxation-and-rounding toolkit for combinatorial optimisation with proxies"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Sample a labelled dataset (CSV plus instance sidecar)");
  gen_cmd->add_option("--family", gen.family, "toy | cover | match | table")->check(CLI::IsMember({"toy", "cover", "match", "table"}));
  gen_cmd->add_option("--count", gen.count, "Number of rows");
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--rows", gen.rows, "Grid rows (cover, match)");
  gen_cmd->add_option("--cols", gen.cols, "Grid columns (cover, match)");
  gen_cmd->add_option("--out", gen.out, "Output CSV path");

  InstanceArgs inst;
  auto* inst_cmd = app.add_subcommand("instance", "Write a single instance as JSON");
  inst_cmd->add_option("--graph", inst.graph, "erdos_renyi | grid | path | cycle | complete | toy");
  inst_cmd->add_option("--nodes", inst.nodes, "Node count");
  inst_cmd->add_option("--p", inst.p, "Edge probability (erdos_renyi)");
  inst_cmd->add_option("--rows", inst.rows, "Grid rows");
  inst_cmd->add_option("--cols", inst.cols, "Grid columns");
  inst_cmd->add_option("--attrs", inst.attrs, "Scalar node attributes")->delimiter(',');
  inst_cmd->add_option("--seed", inst.seed, "Random seed");
  inst_cmd->add_option("--out", inst.out, "Output path (stdout when omitted)");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Fit a proxy to a labelled dataset");
  train_cmd->add_option("--data", train.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--arch", train.arch, "AFF | CON | higher")->required()->check(CLI::IsMember({"AFF", "CON", "higher"}));
  train_cmd->add_option("--scope", train.scope, "node | edge")->check(CLI::IsMember({"node", "edge"}));
  train_cmd->add_option("--loss", train.loss, "squared | huber");
  train_cmd->add_option("--huber-delta", train.config.huber_delta, "Huber threshold");
  train_cmd->add_option("--steps", train.config.steps, "Epochs");
  train_cmd->add_option("--step-size", train.config.step_size, "Adam step size")->check(CLI::PositiveNumber);
  train_cmd->add_option("--batch", train.config.batch, "Mini-batch size")->check(CLI::PositiveNumber);
  train_cmd->add_option("--width", train.config.width, "Representation width F")->check(CLI::PositiveNumber);
  train_cmd->add_option("--hidden", train.config.hidden, "Hidden width of the feature maps (0: affine)");
  train_cmd->add_option("--seed", train.config.seed, "Random seed");
  train_cmd->add_flag("--no-projection", train.no_projection, "Skip the concave-head projection");
  train_cmd->add_option("--resume", train.resume, "Checkpoint to continue from")->check(CLI::ExistingFile);
  train_cmd->add_option("--out", train.out, "Checkpoint output path");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Optimise, round and verify one instance");
  solve_cmd->add_option("--instance", solve.instance, "Instance JSON")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--problem", solve.problem, "Problem name, JSON text or JSON file");
  solve_cmd->add_option("--beta", solve.beta, "Penalty weight (overrides the bound)");
  solve_cmd->add_option("--order", solve.order, "index | by_confidence | by_value")->check(CLI::IsMember({"index", "by_confidence", "by_value"}));
  solve_cmd->add_option("--restarts", solve.restarts, "Optimiser restarts")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--steps", solve.steps, "Optimiser steps per restart");
  solve_cmd->add_option("--step-size", solve.step_size, "Optimiser step size")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--parameterization", solve.parameterization, "logistic | clipped")->check(CLI::IsMember({"logistic", "clipped"}));
  solve_cmd->add_option("--seed", solve.seed, "Random seed");
  solve_cmd->add_option("--checkpoint", solve.checkpoint, "Proxy checkpoint for the objective")->check(CLI::ExistingFile);
  solve_cmd->add_option("--method", solve.method, "solver | badloss | naive | sa | ga | oracle")->check(CLI::IsMember({"solver", "badloss", "naive", "sa", "ga", "oracle"}));
  solve_cmd->add_option("--out", solve.out, "Also write the JSON report here");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark suite and write CSV and JSON reports");
  bench_cmd->add_option("--suite", bench.suite, "Suite JSON")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--out", bench.out, std::string("Report directory (default $") + kOutDirEnv + "/<suite name>)");
  bench_cmd->add_option("--seed", bench.seed, "Override the suite seed");
  bench_cmd->add_option("--threads", bench.threads, "Worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return RunGen(gen);
    if (inst_cmd->parsed()) return RunInstance(inst);
    if (train_cmd->parsed()) return RunTrain(train);
    if (solve_cmd->parsed()) return RunSolve(solve);
    if (bench_cmd->parsed()) return RunBenchCommand(bench);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
