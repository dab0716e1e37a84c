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

#include "relaxround/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace relaxround {

namespace {

constexpr int kBitsetLimit = 4096;

std::string EdgeText(const Edge& e) {
  return "[" + std::to_string(e.u) + "," + std::to_string(e.v) + "]";
}

std::vector<std::vector<double>> ZeroAttrs(int n) {
  return std::vector<std::vector<double>>(static_cast<std::size_t>(n));
}

}  // namespace

const char* ScopeName(Scope scope) { return scope == Scope::kNode ? "node" : "edge"; }

Scope ParseScope(const std::string& name) {
  if (name == "node") return Scope::kNode;
  if (name == "edge") return Scope::kEdge;
  throw std::invalid_argument("unknown scope '" + name + "'");
}

GraphInstance GraphInstance::Create(int node_count, std::vector<Edge> edges,
                                    std::vector<std::vector<double>> node_attrs,
                                    std::vector<std::vector<double>> edge_attrs) {
  if (node_count <= 0) throw InstanceError("node_count must be positive");
  GraphInstance g;
  g.node_count_ = node_count;
  const auto n = static_cast<std::size_t>(node_count);

  if (node_attrs.empty()) node_attrs = ZeroAttrs(node_count);
  if (node_attrs.size() != n) {
    throw InstanceError("node_attrs has " + std::to_string(node_attrs.size()) +
                        " entries, expected " + std::to_string(n));
  }
  g.attr_dim_ = node_attrs.front().size();
  for (std::size_t v = 0; v < n; ++v) {
    if (node_attrs[v].size() != g.attr_dim_) {
      throw InstanceError("node " + std::to_string(v) + " has attribute dimension " +
                          std::to_string(node_attrs[v].size()) + ", expected " +
                          std::to_string(g.attr_dim_));
    }
    for (double a : node_attrs[v]) {
      if (!std::isfinite(a)) throw InstanceError("node " + std::to_string(v) + " has a non-finite attribute");
    }
  }

  g.incident_.assign(n, {});
  g.neighbors_.assign(n, {});
  const bool use_bits = node_count <= kBitsetLimit;
  const std::size_t words = (n + 63) / 64;
  if (use_bits) g.adjacency_bits_.assign(n * words, 0);
  std::vector<std::pair<int, int>> seen;
  seen.reserve(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Edge& ed = edges[e];
    if (ed.u < 0 || ed.v < 0 || ed.u >= node_count || ed.v >= node_count) {
      throw InstanceError("edge " + std::to_string(e) + " " + EdgeText(ed) +
                          " has an endpoint outside [0, " + std::to_string(node_count) + ")");
    }
    if (ed.u == ed.v) {
      throw InstanceError("edge " + std::to_string(e) + " " + EdgeText(ed) + " is a self-loop");
    }
    seen.emplace_back(std::min(ed.u, ed.v), std::max(ed.u, ed.v));
  }
  {
    auto sorted = seen;
    std::sort(sorted.begin(), sorted.end());
    auto dup = std::adjacent_find(sorted.begin(), sorted.end());
    if (dup != sorted.end()) {
      throw InstanceError("duplicate edge [" + std::to_string(dup->first) + "," +
                          std::to_string(dup->second) + "]");
    }
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [u, v] = edges[e];
    g.incident_[static_cast<std::size_t>(u)].push_back(static_cast<int>(e));
    g.incident_[static_cast<std::size_t>(v)].push_back(static_cast<int>(e));
    g.neighbors_[static_cast<std::size_t>(u)].push_back(v);
    g.neighbors_[static_cast<std::size_t>(v)].push_back(u);
    if (use_bits) {
      g.adjacency_bits_[static_cast<std::size_t>(u) * words + static_cast<std::size_t>(v) / 64] |=
          1ULL << (v % 64);
      g.adjacency_bits_[static_cast<std::size_t>(v) * words + static_cast<std::size_t>(u) / 64] |=
          1ULL << (u % 64);
    }
  }

  if (!edge_attrs.empty()) {
    if (edge_attrs.size() != edges.size()) {
      throw InstanceError("edge_attrs has " + std::to_string(edge_attrs.size()) +
                          " entries, expected " + std::to_string(edges.size()));
    }
    g.edge_attr_dim_ = edge_attrs.front().size();
    for (std::size_t e = 0; e < edge_attrs.size(); ++e) {
      if (edge_attrs[e].size() != g.edge_attr_dim_) {
        throw InstanceError("edge " + std::to_string(e) + " has attribute dimension " +
                            std::to_string(edge_attrs[e].size()) + ", expected " +
                            std::to_string(g.edge_attr_dim_));
      }
    }
  }
  g.edges_ = std::move(edges);
  g.node_attrs_ = std::move(node_attrs);
  g.edge_attrs_ = std::move(edge_attrs);
  return g;
}

bool GraphInstance::adjacent(int u, int v) const {
  if (!adjacency_bits_.empty()) {
    const std::size_t words = (static_cast<std::size_t>(node_count_) + 63) / 64;
    return (adjacency_bits_[static_cast<std::size_t>(u) * words + static_cast<std::size_t>(v) / 64] >>
            (v % 64)) & 1ULL;
  }
  const auto& nb = neighbors(u);
  return std::find(nb.begin(), nb.end(), v) != nb.end();
}

std::vector<double> GraphInstance::mean_node_attrs() const {
  std::vector<double> mean(attr_dim_, 0.0);
  for (const auto& a : node_attrs_) {
    for (std::size_t k = 0; k < attr_dim_; ++k) mean[k] += a[k];
  }
  for (double& m : mean) m /= node_count_;
  return mean;
}

SoftAssignment::SoftAssignment(Scope scope, std::vector<double> values)
    : scope_(scope), values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double x = values_[i];
    if (!(x >= 0.0 && x <= 1.0)) {
      throw std::invalid_argument("soft assignment entry " + std::to_string(i) + " = " +
                                  FormatDouble(x) + " is outside [0,1]");
    }
  }
}

SoftAssignment::SoftAssignment(const GraphInstance& instance, Scope scope,
                               std::vector<double> values)
    : SoftAssignment(scope, std::move(values)) {
  if (values_.size() != instance.variable_count(scope)) {
    throw std::invalid_argument("soft assignment has length " + std::to_string(values_.size()) +
                                ", " + ScopeName(scope) + " scope needs " +
                                std::to_string(instance.variable_count(scope)));
  }
}

bool SoftAssignment::is_binary() const {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return x == 0.0 || x == 1.0; });
}

// ---------------------------------------------------------------------------

GraphInstance MakeGrid(int rows, int cols, std::vector<std::vector<double>> node_attrs) {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("grid dimensions must be positive");
  std::vector<Edge> edges;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c + 1 < cols; ++c) edges.push_back({r * cols + c, r * cols + c + 1});
  }
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r + 1 < rows; ++r) edges.push_back({r * cols + c, (r + 1) * cols + c});
  }
  return GraphInstance::Create(rows * cols, std::move(edges), std::move(node_attrs));
}

GraphInstance MakePath(int n, std::vector<std::vector<double>> node_attrs) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return GraphInstance::Create(n, std::move(edges), std::move(node_attrs));
}

GraphInstance MakeCycle(int n, std::vector<std::vector<double>> node_attrs) {
  if (n < 3) throw std::invalid_argument("a cycle needs at least 3 nodes");
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n});
  return GraphInstance::Create(n, std::move(edges), std::move(node_attrs));
}

GraphInstance MakeComplete(int n, std::vector<std::vector<double>> node_attrs) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
  }
  return GraphInstance::Create(n, std::move(edges), std::move(node_attrs));
}

GraphInstance MakeErdosRenyi(int n, double p, Rng& rng) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.Bernoulli(p)) edges.push_back({i, j});
    }
  }
  return GraphInstance::Create(n, std::move(edges));
}

GraphInstance LineGraph(const GraphInstance& g) {
  const int m = g.edge_count();
  if (m == 0) throw InstanceError("line graph of an edgeless graph is empty");
  const std::size_t d = g.attr_dim();
  std::vector<std::vector<double>> attrs(static_cast<std::size_t>(m));
  for (int e = 0; e < m; ++e) {
    const auto zu = g.node_attrs(g.edge(e).u);
    const auto zv = g.node_attrs(g.edge(e).v);
    auto& a = attrs[static_cast<std::size_t>(e)];
    a.resize(2 * d);
    for (std::size_t k = 0; k < d; ++k) {
      a[k] = zu[k] + zv[k];
      a[d + k] = zu[k] * zv[k];
    }
  }
  std::vector<Edge> lifted;
  for (int v = 0; v < g.node_count(); ++v) {
    const auto& inc = g.incident(v);
    for (std::size_t i = 0; i < inc.size(); ++i) {
      for (std::size_t j = i + 1; j < inc.size(); ++j) lifted.push_back({inc[i], inc[j]});
    }
  }
  // Two edges share at most one endpoint in a simple graph, so no duplicates.
  return GraphInstance::Create(m, std::move(lifted), std::move(attrs));
}

// ---------------------------------------------------------------------------

double ToyGroundTruthCost(double c1, double c2, int x1, int x2) {
  const double g1 = (580.0 - 10.0 * c1 - 3.0 * c2) / 33.0;
  const double g2 = (580.0 - 10.0 * c2 - 3.0 * c1) / 33.0;
  const double g3 = (3.0 * c1 + 3.0 * c2) / 45.0;
  const double g4 = -(5.0 * c1 + 5.0 * c2) / 33.0 + 60.0;
  return g1 * x1 + g2 * x2 + g3 * x1 * x2 + g4;
}

double Application1EdgeWeight(EdgeWeightRule rule, double zv, double zu) {
  if (rule == EdgeWeightRule::kCover) return (zv + zu) / 3.0 + zv * zu / 100.0;
  return zv * zu;
}

std::vector<double> Application1EdgeWeights(const GraphInstance& g, EdgeWeightRule rule) {
  if (g.attr_dim() < 1) throw InstanceError("edge weights need at least one node attribute");
  std::vector<double> w;
  w.reserve(g.edges().size());
  for (const Edge& e : g.edges()) {
    w.push_back(Application1EdgeWeight(rule, g.node_attrs(e.v)[0], g.node_attrs(e.u)[0]));
  }
  return w;
}

// ---------------------------------------------------------------------------

std::vector<DatasetRow> SampleDataset(const DatasetConfig& config, std::uint64_t seed) {
  const std::string& fam = config.family;
  if (fam != "toy" && fam != "cover" && fam != "match" && fam != "table") {
    throw std::invalid_argument("unknown dataset family '" + fam + "'");
  }
  Rng root(seed);
  std::vector<DatasetRow> rows;
  rows.reserve(config.count);

  std::vector<double> table;
  if (fam == "table") {
    if (config.table_arity <= 0 || config.table_arity > 20) {
      throw std::invalid_argument("table_arity must be in [1, 20]");
    }
    Rng trng = root.Split("table");
    table.resize(std::size_t{1} << config.table_arity);
    for (double& v : table) v = trng.Uniform(-1.0, 1.0);
  }

  for (std::size_t i = 0; i < config.count; ++i) {
    Rng rng = root.Split(i);
    DatasetRow row;
    if (fam == "toy") {
      const double c1 = rng.Uniform(0.0, config.toy_attr_max);
      const double c2 = rng.Uniform(0.0, config.toy_attr_max);
      row.instance = GraphInstance::Create(2, {{0, 1}}, {{c1}, {c2}});
      const int x1 = static_cast<int>(rng.Below(2));
      const int x2 = static_cast<int>(rng.Below(2));
      row.label.assignment = {static_cast<std::uint8_t>(x1), static_cast<std::uint8_t>(x2)};
      row.label.cost = ToyGroundTruthCost(c1, c2, x1, x2);
    } else if (fam == "cover" || fam == "match") {
      const int n = config.grid_rows * config.grid_cols;
      std::vector<std::vector<double>> attrs(static_cast<std::size_t>(n));
      for (auto& a : attrs) {
        a = {static_cast<double>(rng.Below(static_cast<std::uint64_t>(config.digit_max) + 1))};
      }
      row.instance = MakeGrid(config.grid_rows, config.grid_cols, std::move(attrs));
      const auto w = Application1EdgeWeights(
          row.instance, fam == "cover" ? EdgeWeightRule::kCover : EdgeWeightRule::kMatch);
      row.label.assignment.resize(w.size());
      double cost = 0.0;
      for (std::size_t e = 0; e < w.size(); ++e) {
        row.label.assignment[e] = static_cast<std::uint8_t>(rng.Below(2));
        cost += w[e] * row.label.assignment[e];
      }
      row.label.cost = cost;
    } else {
      const int n = config.table_arity;
      std::vector<std::vector<double>> attrs(static_cast<std::size_t>(n));
      for (auto& a : attrs) a = {rng.Uniform()};
      row.instance = GraphInstance::Create(n, {}, std::move(attrs));
      std::size_t index = 0;
      row.label.assignment.resize(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j) {
        row.label.assignment[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(rng.Below(2));
        index |= std::size_t{row.label.assignment[static_cast<std::size_t>(j)]} << j;
      }
      row.label.cost = table[index];
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------

std::string FormatDouble(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return std::to_string(value);
  return std::string(buf, ptr);
}

nlohmann::json InstanceToJson(const GraphInstance& g) {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (int v = 0; v < g.node_count(); ++v) {
    const auto a = g.node_attrs(v);
    j["nodes"].push_back({{"attrs", std::vector<double>(a.begin(), a.end())}});
  }
  j["edges"] = nlohmann::json::array();
  for (const Edge& e : g.edges()) j["edges"].push_back({e.u, e.v});
  if (g.has_edge_attrs()) {
    j["edge_attrs"] = nlohmann::json::array();
    for (int e = 0; e < g.edge_count(); ++e) {
      const auto a = g.edge_attrs(e);
      j["edge_attrs"].push_back(std::vector<double>(a.begin(), a.end()));
    }
  }
  return j;
}

GraphInstance InstanceFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw InstanceError("instance must be a JSON object");
  if (!j.contains("nodes") || !j["nodes"].is_array()) {
    throw InstanceError("instance needs a \"nodes\" array");
  }
  if (!j.contains("edges") || !j["edges"].is_array()) {
    throw InstanceError("instance needs an \"edges\" array");
  }
  const auto& nodes = j["nodes"];
  std::vector<std::vector<double>> attrs;
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    const auto& node = nodes[v];
    if (!node.is_object()) throw InstanceError("nodes[" + std::to_string(v) + "] must be an object");
    std::vector<double> a;
    if (node.contains("attrs")) {
      if (!node["attrs"].is_array()) {
        throw InstanceError("nodes[" + std::to_string(v) + "].attrs must be an array");
      }
      for (const auto& x : node["attrs"]) {
        if (!x.is_number()) {
          throw InstanceError("nodes[" + std::to_string(v) + "].attrs has a non-numeric entry");
        }
        a.push_back(x.get<double>());
      }
    }
    attrs.push_back(std::move(a));
  }
  std::vector<Edge> edges;
  const auto& je = j["edges"];
  for (std::size_t e = 0; e < je.size(); ++e) {
    const auto& pair = je[e];
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
        !pair[1].is_number_integer()) {
      throw InstanceError("edges[" + std::to_string(e) + "] must be a pair of integers");
    }
    edges.push_back({pair[0].get<int>(), pair[1].get<int>()});
  }
  std::vector<std::vector<double>> edge_attrs;
  if (j.contains("edge_attrs") && !j["edge_attrs"].is_null()) {
    for (const auto& row : j["edge_attrs"]) {
      if (!row.is_array()) throw InstanceError("edge_attrs entries must be arrays");
      edge_attrs.push_back(row.get<std::vector<double>>());
    }
  }
  const int node_count = static_cast<int>(attrs.size());
  return GraphInstance::Create(node_count, std::move(edges), std::move(attrs),
                               std::move(edge_attrs));
}

GraphInstance LoadInstance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InstanceError("cannot open instance file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& err) {
    throw InstanceError(path.string() + ": parse error: " + err.what());
  }
  return InstanceFromJson(j);
}

void SaveInstance(const GraphInstance& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << InstanceToJson(g).dump() << "\n";
}

std::filesystem::path InstancesSidecar(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".instances.jsonl");
  return p;
}

void WriteDataset(const std::vector<DatasetRow>& rows, const std::filesystem::path& csv_path) {
  std::ofstream csv(csv_path);
  std::ofstream inst(InstancesSidecar(csv_path));
  if (!csv || !inst) throw std::runtime_error("cannot write dataset at " + csv_path.string());
  const std::size_t n = rows.empty() ? 0 : rows.front().label.assignment.size();
  const bool with_g = !rows.empty() && rows.front().label.constraint_value.has_value();
  for (std::size_t i = 0; i < n; ++i) csv << "x_" << i << ",";
  csv << "cost" << (with_g ? ",g" : "") << "\n";
  for (const auto& row : rows) {
    if (row.label.assignment.size() != n) {
      throw std::invalid_argument("dataset rows must share one assignment length");
    }
    for (auto x : row.label.assignment) csv << static_cast<int>(x) << ",";
    csv << FormatDouble(row.label.cost);
    if (with_g) csv << "," << FormatDouble(row.label.constraint_value.value_or(0.0));
    csv << "\n";
    inst << InstanceToJson(row.instance).dump() << "\n";
  }
}

std::vector<DatasetRow> ReadDataset(const std::filesystem::path& csv_path) {
  std::ifstream csv(csv_path);
  if (!csv) throw InstanceError("cannot open dataset " + csv_path.string());
  std::ifstream inst(InstancesSidecar(csv_path));
  if (!inst) throw InstanceError("missing instance sidecar " + InstancesSidecar(csv_path).string());

  std::string header;
  std::getline(csv, header);
  std::vector<std::string> cols;
  {
    std::stringstream ss(header);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  std::size_t n = 0;
  while (n < cols.size() && cols[n] == "x_" + std::to_string(n)) ++n;
  const bool with_g = cols.size() == n + 2 && cols[n + 1] == "g";
  if (n >= cols.size() || cols[n] != "cost" || (cols.size() != n + 1 && !with_g)) {
    throw InstanceError(csv_path.string() + ": header must be x_0..x_{n-1},cost[,g]");
  }

  std::vector<DatasetRow> rows;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(csv, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != cols.size()) {
      throw InstanceError(csv_path.string() + ":" + std::to_string(lineno) + ": wrong column count");
    }
    DatasetRow row;
    for (std::size_t i = 0; i < n; ++i) {
      if (cells[i] != "0" && cells[i] != "1") {
        throw InstanceError(csv_path.string() + ":" + std::to_string(lineno) + ": x_" +
                            std::to_string(i) + " must be 0 or 1");
      }
      row.label.assignment.push_back(cells[i] == "1" ? 1 : 0);
    }
    row.label.cost = std::stod(cells[n]);
    if (!std::isfinite(row.label.cost)) {
      throw InstanceError(csv_path.string() + ":" + std::to_string(lineno) + ": cost is not finite");
    }
    if (with_g) row.label.constraint_value = std::stod(cells[n + 1]);
    std::string json_line;
    if (!std::getline(inst, json_line)) {
      throw InstanceError("instance sidecar has fewer rows than " + csv_path.string());
    }
    try {
      row.instance = InstanceFromJson(nlohmann::json::parse(json_line));
    } catch (const nlohmann::json::parse_error& err) {
      throw InstanceError("instance sidecar row " + std::to_string(rows.size()) + ": " + err.what());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace relaxround
