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

#include "relaxround/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "relaxround/proxy.hpp"
#include "relaxround/rng.hpp"

namespace relaxround {

namespace {

const std::vector<std::string>& KnownMethods() {
  static const std::vector<std::string> methods = {"solver", "badloss", "sa", "ga", "naive",
                                                   "oracle"};
  return methods;
}

std::string Opt(const std::optional<double>& v) { return v ? FormatDouble(*v) : ""; }
std::string Opt(const std::optional<bool>& v) { return v ? (*v ? "1" : "0") : ""; }

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

template <typename T>
nlohmann::json JsonOpt(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::uint64_t MethodSeed(const SuiteSpec& suite, std::size_t instance, const std::string& method) {
  return Rng(suite.seed).Split("rows").Split(static_cast<std::uint64_t>(instance)).Split(method).NextU64();
}

struct Oracle {
  double objective = 0.0;
  bool feasible = false;
};

void Score(BenchRow& row, const std::optional<Oracle>& oracle, bool maximize) {
  if (!oracle || !oracle->feasible) return;
  row.oracle_objective = oracle->objective;
  const double opt = oracle->objective;
  if (!row.feasible) {
    row.approx_ratio = 0.0;
    return;
  }
  const double obj = row.objective;
  row.gap = (maximize ? opt - obj : obj - opt) / std::max(std::abs(opt), 1e-12);
  if (maximize) {
    row.approx_ratio = opt > 0.0 ? obj / opt : 1.0;
  } else {
    row.approx_ratio = obj > 0.0 ? opt / obj : (opt == obj ? 1.0 : 0.0);
  }
}

}  // namespace

SuiteSpec SuiteSpec::FromJson(const nlohmann::json& j) {
  SuiteSpec s;
  s.name = j.value("name", s.name);
  const auto& problem = j.at("problem");
  s.problem = problem.is_string() ? ProblemSpec::FromJson({{"type", problem.get<std::string>()}})
                                  : ProblemSpec::FromJson(problem);
  s.instances = j.value("instances", s.instances);
  s.seed = j.value("seed", s.seed);
  if (j.contains("methods")) s.methods = j.at("methods").get<std::vector<std::string>>();
  for (const auto& m : s.methods) {
    const auto& known = KnownMethods();
    if (std::find(known.begin(), known.end(), m) == known.end()) {
      throw std::invalid_argument("unknown bench method '" + m + "'");
    }
  }
  if (j.contains("graph")) {
    const auto& g = j.at("graph");
    s.graph_family = g.value("family", s.graph_family);
    s.nodes = g.value("nodes", s.nodes);
    s.edge_prob = g.value("p", s.edge_prob);
    s.rows = g.value("rows", s.rows);
    s.cols = g.value("cols", s.cols);
    s.digit_max = g.value("digit_max", s.digit_max);
  } else if (s.problem.kind == ProblemKind::kEdgeCover ||
             s.problem.kind == ProblemKind::kNodeMatching) {
    s.graph_family = "grid";
  }
  if (s.graph_family != "erdos_renyi" && s.graph_family != "grid" && s.graph_family != "toy") {
    throw std::invalid_argument("unknown graph family '" + s.graph_family + "'");
  }
  if (j.contains("optimize")) s.optimize = OptimizeConfig::FromJson(j.at("optimize"));
  if (j.contains("order")) s.order = ParseRoundingOrder(j.at("order").get<std::string>());
  s.concavity_trials = j.value("concavity_trials", s.concavity_trials);
  if (j.contains("baseline")) {
    const auto& b = j.at("baseline");
    if (b.contains("sa")) s.sa = AnnealingConfig::FromJson(b.at("sa"));
    if (b.contains("ga")) s.ga = GeneticConfig::FromJson(b.at("ga"));
  }
  if (j.contains("checkpoint") && !j.at("checkpoint").is_null()) {
    s.checkpoint = j.at("checkpoint").get<std::string>();
  }
  s.threads = j.value("threads", s.threads);
  return s;
}

nlohmann::json SuiteSpec::ToJson() const {
  nlohmann::json j = {{"name", name},
                      {"problem", problem.ToJson()},
                      {"instances", instances},
                      {"seed", seed},
                      {"methods", methods},
                      {"graph",
                       {{"family", graph_family},
                        {"nodes", nodes},
                        {"p", edge_prob},
                        {"rows", rows},
                        {"cols", cols},
                        {"digit_max", digit_max}}},
                      {"optimize", optimize.ToJson()},
                      {"order", RoundingOrderName(order)},
                      {"concavity_trials", concavity_trials},
                      {"baseline", {{"sa", sa.ToJson()}, {"ga", ga.ToJson()}}}};
  j["checkpoint"] = checkpoint ? nlohmann::json(checkpoint->string()) : nlohmann::json(nullptr);
  return j;
}

SuiteSpec LoadSuite(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open suite " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("malformed suite " + path.string() + ": " + e.what());
  }
  return SuiteSpec::FromJson(j);
}

GraphInstance SuiteInstance(const SuiteSpec& suite, std::size_t index) {
  Rng rng = Rng(suite.seed).Split("instances").Split(static_cast<std::uint64_t>(index));
  if (suite.graph_family == "erdos_renyi") return MakeErdosRenyi(suite.nodes, suite.edge_prob, rng);
  if (suite.graph_family == "toy") {
    const double c1 = rng.Uniform(0.0, 60.0);
    const double c2 = rng.Uniform(0.0, 60.0);
    return GraphInstance::Create(2, {{0, 1}}, {{c1}, {c2}});
  }
  std::vector<std::vector<double>> attrs(static_cast<std::size_t>(suite.rows * suite.cols));
  for (auto& a : attrs) {
    a = {static_cast<double>(rng.Below(static_cast<std::uint64_t>(suite.digit_max) + 1))};
  }
  return MakeGrid(suite.rows, suite.cols, std::move(attrs));
}

namespace {

void FillFromSolve(BenchRow& row, const SolveResult& r, const ProblemDefinition& p,
                   ProblemKind kind) {
  row.objective = NaturalObjective(p, kind, r.rounded);
  row.feasible = ExactlyFeasible(p, r.rounded);
  row.l_r_initial = r.l_r_initial;
  row.guarantee_applicable = r.guarantee_applicable;
  row.guarantee_holds = r.guarantee_holds;
  row.strict_decrease = r.strict_decrease;
}

void RunInstance(const SuiteSpec& suite, const ProxyModel* proxy, std::size_t index,
                 std::vector<BenchRow>& out) {
  const std::size_t m = suite.methods.size();
  auto rows = out.begin() + static_cast<std::ptrdiff_t>(index * m);
  for (std::size_t k = 0; k < m; ++k) {
    rows[static_cast<std::ptrdiff_t>(k)].instance = index;
    rows[static_cast<std::ptrdiff_t>(k)].method = suite.methods[k];
  }
  auto fail_all = [&](const std::string& msg) {
    for (std::size_t k = 0; k < m; ++k) {
      rows[static_cast<std::ptrdiff_t>(k)].status = "error";
      rows[static_cast<std::ptrdiff_t>(k)].message = msg;
    }
  };

  GraphInstance g;
  ProblemDefinition problem;
  try {
    g = SuiteInstance(suite, index);
    problem = BuildProblem(suite.problem, g, proxy);
  } catch (const std::exception& e) {
    fail_all(e.what());
    return;
  }
  const ProblemKind kind = suite.problem.kind;
  const bool maximize = Maximizes(kind);
  const std::size_t n = problem.objective.arity();
  auto has = [&](const std::string& name) {
    return std::find(suite.methods.begin(), suite.methods.end(), name) != suite.methods.end();
  };

  std::optional<Oracle> oracle;
  std::optional<SolveResult> solved;
  SolveConfig config;
  config.optimize = suite.optimize;
  config.order = suite.order;
  config.concavity_trials = suite.concavity_trials;

  auto run = [&](BenchRow& row, auto&& body) {
    const auto start = std::chrono::steady_clock::now();
    try {
      body(row);
    } catch (const std::exception& e) {
      row.status = "error";
      row.message = e.what();
    }
    row.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  // The oracle runs first so the other rows can be scored against it.
  std::vector<std::size_t> order(m);
  for (std::size_t k = 0; k < m; ++k) order[k] = k;
  std::stable_partition(order.begin(), order.end(),
                        [&](std::size_t k) { return suite.methods[k] == "oracle"; });

  for (std::size_t k : order) {
    BenchRow& row = rows[static_cast<std::ptrdiff_t>(k)];
    const std::string& method = suite.methods[k];
    const std::uint64_t seed = MethodSeed(suite, index, method == "naive" ? "solver" : method);
    run(row, [&](BenchRow& r) {
      if (method == "oracle") {
        if (kind == ProblemKind::kMaxClique) {
          if (g.node_count() > 64) {
            r.status = "skipped";
            r.message = "graph too large for the clique oracle";
            return;
          }
          r.objective = MaxCliqueSize(g);
          r.feasible = true;
        } else {
          if (n > kMaxBruteForceVariables) {
            r.status = "skipped";
            r.message = "too many variables for brute force";
            return;
          }
          BinaryFunction f = problem.exact_f;
          if (!f) {
            const RelaxedFunction obj = problem.objective;
            f = [obj](const BinaryVector& x) { return obj(std::vector<double>(x.begin(), x.end())); };
          }
          const ProblemDefinition& pref = problem;
          const OracleResult o = BruteForce(
              n, f, [&pref](const BinaryVector& x) { return ExactlyFeasible(pref, x) ? 0.0 : 1.0; });
          r.feasible = o.best_X.has_value();
          r.objective = o.best_X ? o.best_value : 0.0;
        }
        oracle = Oracle{r.objective, r.feasible};
        if (r.feasible) {
          r.oracle_objective = r.objective;
          r.gap = 0.0;
          r.approx_ratio = 1.0;
        }
        return;
      }
      if (method == "solver" || method == "naive") {
        if (!solved) {
          SolveConfig c = config;
          c.optimize.seed = MethodSeed(suite, index, "solver");
          solved = Solve(problem, c);
        }
        if (method == "solver") {
          FillFromSolve(r, *solved, problem, kind);
        } else {
          const BinaryVector x = NaiveThresholdRound(solved->soft.values());
          r.objective = NaturalObjective(problem, kind, x);
          r.feasible = ExactlyFeasible(problem, x);
          r.l_r_initial = solved->l_r_initial;
        }
      } else if (method == "badloss") {
        ProblemSpec warped = suite.problem;
        warped.badloss = true;
        const ProblemDefinition bad = BuildProblem(warped, g, proxy);
        SolveConfig c = config;
        c.optimize.seed = seed;
        FillFromSolve(r, Solve(bad, c), bad, kind);
      } else {
        const BetaBound beta = ResolveBeta(problem);
        const PenalizedLoss loss =
            AssemblePenalized(problem.objective, problem.constraints, beta.beta, problem.f_offset);
        const BinaryFunction objective = PenalizedAtBinary(loss);
        const BinaryVector x = method == "sa" ? SimulatedAnnealing(n, objective, suite.sa, seed)
                                              : GeneticAlgorithm(n, objective, suite.ga, seed);
        r.objective = NaturalObjective(problem, kind, x);
        r.feasible = ExactlyFeasible(problem, x);
      }
      Score(r, oracle, maximize);
    });
  }
}

}  // namespace

BenchReport RunBench(const SuiteSpec& suite) {
  BenchReport report;
  report.suite = suite;
  std::optional<ProxyModel> proxy;
  if (suite.checkpoint) proxy = LoadCheckpoint(*suite.checkpoint);
  const ProxyModel* proxy_ptr = proxy ? &*proxy : nullptr;

  const std::size_t m = suite.methods.size();
  report.rows.resize(suite.instances * m);
  std::size_t threads = suite.threads != 0 ? suite.threads : std::thread::hardware_concurrency();
  threads = std::max<std::size_t>(1, std::min(threads, suite.instances));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < suite.instances; i = next++) {
      RunInstance(suite, proxy_ptr, i, report.rows);
    }
  };
  if (suite.instances > 0) {
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
  }

  for (const std::string& method : suite.methods) {
    BenchAggregate agg;
    agg.method = method;
    double obj = 0.0, gap = 0.0, ratio = 0.0;
    std::size_t feasible = 0, gaps = 0, ratios = 0;
    for (const auto& row : report.rows) {
      if (row.method != method) continue;
      ++agg.rows;
      if (row.status != "ok") continue;
      ++agg.ok_rows;
      obj += row.objective;
      feasible += row.feasible ? 1 : 0;
      if (row.gap) {
        gap += *row.gap;
        ++gaps;
      }
      if (row.approx_ratio) {
        ratio += *row.approx_ratio;
        ++ratios;
      }
      if (row.guarantee_applicable.value_or(false)) {
        ++agg.applicable;
        if (row.guarantee_holds.value_or(false)) {
          ++agg.holds;
        } else {
          ++agg.violations;
        }
      }
    }
    if (agg.ok_rows > 0) {
      agg.mean_objective = obj / static_cast<double>(agg.ok_rows);
      agg.feasibility_rate = static_cast<double>(feasible) / static_cast<double>(agg.ok_rows);
    }
    if (gaps > 0) agg.mean_gap = gap / static_cast<double>(gaps);
    if (ratios > 0) agg.mean_approx_ratio = ratio / static_cast<double>(ratios);
    report.aggregates.push_back(agg);
  }
  return report;
}

std::string BenchReport::RowsCsv() const {
  std::ostringstream out;
  out << "# relaxround bench schema " << kBenchSchemaVersion << "\n";
  out << "instance,method,status,objective,feasible,l_r_initial,guarantee_applicable,"
         "guarantee_holds,strict_decrease,oracle_objective,gap,approx_ratio,message\n";
  for (const auto& r : rows) {
    out << r.instance << ',' << r.method << ',' << r.status << ','
        << (r.status == "ok" ? FormatDouble(r.objective) : "") << ','
        << (r.status == "ok" ? (r.feasible ? "1" : "0") : "") << ',' << Opt(r.l_r_initial) << ','
        << Opt(r.guarantee_applicable) << ',' << Opt(r.guarantee_holds) << ','
        << Opt(r.strict_decrease) << ',' << Opt(r.oracle_objective) << ',' << Opt(r.gap) << ','
        << Opt(r.approx_ratio) << ',' << CsvField(r.message) << '\n';
  }
  return out.str();
}

std::string BenchReport::AggregatesCsv() const {
  std::ostringstream out;
  out << "# relaxround bench schema " << kBenchSchemaVersion << "\n";
  out << "method,rows,ok_rows,mean_objective,feasibility_rate,mean_gap,mean_approx_ratio,"
         "applicable,holds,violations\n";
  for (const auto& a : aggregates) {
    out << a.method << ',' << a.rows << ',' << a.ok_rows << ',' << FormatDouble(a.mean_objective)
        << ',' << FormatDouble(a.feasibility_rate) << ',' << Opt(a.mean_gap) << ','
        << Opt(a.mean_approx_ratio) << ',' << a.applicable << ',' << a.holds << ','
        << a.violations << '\n';
  }
  return out.str();
}

nlohmann::json BenchReport::ToJson() const {
  nlohmann::json j;
  j["schema"] = kBenchSchemaVersion;
  j["suite"] = suite.ToJson();
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    j["rows"].push_back({{"instance", r.instance},
                         {"method", r.method},
                         {"status", r.status},
                         {"objective", r.status == "ok" ? nlohmann::json(r.objective) : nlohmann::json(nullptr)},
                         {"feasible", r.status == "ok" ? nlohmann::json(r.feasible) : nlohmann::json(nullptr)},
                         {"l_r_initial", JsonOpt(r.l_r_initial)},
                         {"guarantee_applicable", JsonOpt(r.guarantee_applicable)},
                         {"guarantee_holds", JsonOpt(r.guarantee_holds)},
                         {"strict_decrease", JsonOpt(r.strict_decrease)},
                         {"oracle_objective", JsonOpt(r.oracle_objective)},
                         {"gap", JsonOpt(r.gap)},
                         {"approx_ratio", JsonOpt(r.approx_ratio)},
                         {"message", r.message},
                         {"wall_seconds", r.wall_seconds}});
  }
  j["aggregates"] = nlohmann::json::array();
  for (const auto& a : aggregates) {
    j["aggregates"].push_back({{"method", a.method},
                               {"rows", a.rows},
                               {"ok_rows", a.ok_rows},
                               {"mean_objective", a.mean_objective},
                               {"feasibility_rate", a.feasibility_rate},
                               {"mean_gap", JsonOpt(a.mean_gap)},
                               {"mean_approx_ratio", JsonOpt(a.mean_approx_ratio)},
                               {"applicable", a.applicable},
                               {"holds", a.holds},
                               {"violations", a.violations}});
  }
  return j;
}

std::size_t BenchReport::violations() const {
  std::size_t v = 0;
  for (const auto& a : aggregates) v += a.violations;
  return v;
}

void WriteBenchReport(const BenchReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << text;
  };
  write("bench.csv", report.RowsCsv());
  write("summary.csv", report.AggregatesCsv());
  write("bench.json", report.ToJson().dump(2) + "\n");
}

}  // namespace relaxround
