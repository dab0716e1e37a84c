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

#ifndef RELAXROUND_GRAPH_HPP
#define RELAXROUND_GRAPH_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "relaxround/rng.hpp"

namespace relaxround {

// Raised for malformed files and for instances that break a structural
// invariant. The message names the offending element.
class InstanceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Scope { kNode, kEdge };

const char* ScopeName(Scope scope);
Scope ParseScope(const std::string& name);

struct Edge {
  int u = 0;
  int v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// An attributed undirected graph. Immutable once built; Create() is the only
// way in and it enforces: no self-loops, no duplicate edges, endpoints in
// range, and a single attribute dimension per instance.
class GraphInstance {
 public:
  GraphInstance() = default;

  static GraphInstance Create(int node_count, std::vector<Edge> edges,
                              std::vector<std::vector<double>> node_attrs = {},
                              std::vector<std::vector<double>> edge_attrs = {});

  int node_count() const { return node_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  std::size_t attr_dim() const { return attr_dim_; }
  std::size_t edge_attr_dim() const { return edge_attr_dim_; }

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
  std::span<const double> node_attrs(int v) const {
    return node_attrs_[static_cast<std::size_t>(v)];
  }
  bool has_edge_attrs() const { return !edge_attrs_.empty(); }
  std::span<const double> edge_attrs(int e) const {
    return edge_attrs_[static_cast<std::size_t>(e)];
  }

  // Edge indices incident to v, ascending.
  const std::vector<int>& incident(int v) const {
    return incident_[static_cast<std::size_t>(v)];
  }
  // Neighbour node ids of v, in the order of incident(v).
  const std::vector<int>& neighbors(int v) const {
    return neighbors_[static_cast<std::size_t>(v)];
  }
  int degree(int v) const { return static_cast<int>(incident(v).size()); }
  bool adjacent(int u, int v) const;

  std::size_t variable_count(Scope scope) const {
    return scope == Scope::kNode ? static_cast<std::size_t>(node_count_)
                                 : edges_.size();
  }

  // Mean of node attribute vectors (zero vector for attr_dim 0).
  std::vector<double> mean_node_attrs() const;

  friend bool operator==(const GraphInstance& a, const GraphInstance& b) {
    return a.node_count_ == b.node_count_ && a.edges_ == b.edges_ &&
           a.node_attrs_ == b.node_attrs_ && a.edge_attrs_ == b.edge_attrs_;
  }

 private:
  int node_count_ = 0;
  std::size_t attr_dim_ = 0;
  std::size_t edge_attr_dim_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<double>> node_attrs_;
  std::vector<std::vector<double>> edge_attrs_;
  std::vector<std::vector<int>> incident_;
  std::vector<std::vector<int>> neighbors_;
  std::vector<std::uint64_t> adjacency_bits_;  // row-major, only for small graphs
};

// A point of the relaxed box [0,1]^n tagged with what its entries index.
class SoftAssignment {
 public:
  SoftAssignment() = default;
  SoftAssignment(Scope scope, std::vector<double> values);
  // Checks the length against the instance as well.
  SoftAssignment(const GraphInstance& instance, Scope scope, std::vector<double> values);

  Scope scope() const { return scope_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool is_binary() const;

 private:
  Scope scope_ = Scope::kNode;
  std::vector<double> values_;
};

using BinaryVector = std::vector<std::uint8_t>;

struct LabeledSample {
  BinaryVector assignment;
  double cost = 0.0;
  std::optional<double> constraint_value;
};

struct DatasetRow {
  GraphInstance instance;
  LabeledSample label;
};

// ---------------------------------------------------------------------------
// Generators

// rows x cols lattice. Node id = r * cols + c. Edges are labelled row-major:
// the horizontal edges of row 0, row 1, ..., then the vertical edges of
// column 0, column 1, ...
GraphInstance MakeGrid(int rows, int cols, std::vector<std::vector<double>> node_attrs = {});
GraphInstance MakePath(int n, std::vector<std::vector<double>> node_attrs = {});
GraphInstance MakeCycle(int n, std::vector<std::vector<double>> node_attrs = {});
GraphInstance MakeComplete(int n, std::vector<std::vector<double>> node_attrs = {});
GraphInstance MakeErdosRenyi(int n, double p, Rng& rng);

// Line graph used to run node-level machinery on edge variables: node e of
// the result is edge e of `g`, with attributes [z_u + z_v, z_u * z_v]
// (element-wise), and two lifted nodes are adjacent iff their edges share an
// endpoint.
GraphInstance LineGraph(const GraphInstance& g);

// ---------------------------------------------------------------------------
// Ground-truth costs

// Two-variable toy landscape with configuration (c1, c2).
double ToyGroundTruthCost(double c1, double c2, int x1, int x2);

enum class EdgeWeightRule { kCover, kMatch };

// cover: (zv + zu) / 3 + zv * zu / 100;  match: zv * zu.
double Application1EdgeWeight(EdgeWeightRule rule, double zv, double zu);

// Per-edge weights from the first node attribute.
std::vector<double> Application1EdgeWeights(const GraphInstance& g, EdgeWeightRule rule);

// ---------------------------------------------------------------------------
// Datasets

struct DatasetConfig {
  std::string family = "toy";  // toy | cover | match | table
  std::size_t count = 0;
  int grid_rows = 3;
  int grid_cols = 3;
  double toy_attr_max = 60.0;  // toy attributes ~ U[0, toy_attr_max]
  int digit_max = 99;          // cover/match attributes ~ U{0..digit_max}
  int table_arity = 4;         // table family: n variables, edgeless graph
};

// Deterministic in (config, seed). Assignments are uniform over {0,1}^n.
std::vector<DatasetRow> SampleDataset(const DatasetConfig& config, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json InstanceToJson(const GraphInstance& g);
GraphInstance InstanceFromJson(const nlohmann::json& j);
GraphInstance LoadInstance(const std::filesystem::path& path);
void SaveInstance(const GraphInstance& g, const std::filesystem::path& path);

// Dataset on disk: `<stem>.csv` with columns x_0..x_{n-1},cost[,g] and a
// sidecar `<stem>.instances.jsonl` holding one instance per CSV row.
void WriteDataset(const std::vector<DatasetRow>& rows, const std::filesystem::path& csv_path);
std::vector<DatasetRow> ReadDataset(const std::filesystem::path& csv_path);
std::filesystem::path InstancesSidecar(const std::filesystem::path& csv_path);

// Shortest decimal form that parses back to the same double.
std::string FormatDouble(double value);

}  // namespace relaxround

#endif  // RELAXROUND_GRAPH_HPP
