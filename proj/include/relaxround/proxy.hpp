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

#ifndef RELAXROUND_PROXY_HPP
#define RELAXROUND_PROXY_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "relaxround/graph.hpp"
#include "relaxround/relaxed.hpp"
#include "relaxround/rng.hpp"

namespace relaxround {

enum class LatentKind { kSecondOrder, kHigherOrder };
enum class HeadKind { kAffine, kConcave };

// AFF: second-order latent, affine head.  CON: second-order latent, concave
// head.  HIGHER: neighbourhood-product latent, affine head.
enum class Architecture { kAff, kCon, kHigher };

const char* ArchitectureName(Architecture arch);
Architecture ParseArchitecture(const std::string& name);
LatentKind LatentOf(Architecture arch);
HeadKind HeadOf(Architecture arch);

// Per-instance representation of a proxy. All vectors have length `width`.
//
//   second order:  phi = W + sum_v U_v x_v + sum_{(u,v) in E} Q_uv x_u x_v
//   higher order:  phi = sum_v (U_v x_v + U'_v) prod_{u ~ v} (Q_vu x_u + Q'_vu)
//   affine head:   h = <w, phi>
//   concave head:  h = <w, -ReLU(phi)> + b,  w >= 0
//   output:        out_scale * h + out_offset,  out_scale > 0
//
// Q and Q' are stored per edge and shared by both directions.
struct ProxyParams {
  LatentKind latent = LatentKind::kSecondOrder;
  HeadKind head = HeadKind::kAffine;
  std::size_t width = 0;
  std::vector<double> W;
  std::vector<std::vector<double>> U;
  std::vector<std::vector<double>> Q;
  std::vector<std::vector<double>> U_bias;  // higher order only
  std::vector<std::vector<double>> Q_bias;  // higher order only
  std::vector<double> w;
  double b = 0.0;
  double out_scale = 1.0;
  double out_offset = 0.0;

  // Zero-filled parameters shaped for `g`.
  static ProxyParams Zeros(LatentKind latent, HeadKind head, std::size_t width,
                           const GraphInstance& g);

  // Throws std::invalid_argument on shape mismatches, negative concave-head
  // weights, or a non-positive out_scale.
  void Validate(const GraphInstance& g) const;
};

std::vector<double> PhiSecondOrder(const ProxyParams& p, const GraphInstance& g,
                                   std::span<const double> x);
std::vector<double> PhiHigherOrder(const ProxyParams& p, const GraphInstance& g,
                                   std::span<const double> x);
std::vector<double> Phi(const ProxyParams& p, const GraphInstance& g, std::span<const double> x);

// Head values without the output normalization.
double AffEval(const ProxyParams& p, const GraphInstance& g, std::span<const double> x);
double ConEval(const ProxyParams& p, const GraphInstance& g, std::span<const double> x);
// out_scale * head + out_offset.
double ProxyEval(const ProxyParams& p, const GraphInstance& g, std::span<const double> x);

struct ProxyGradient {
  double value = 0.0;
  std::vector<double> dx;
  ProxyParams dparams;  // same shape as the input params; out_* entries unused
};

// Gradient of ProxyEval with respect to x and to every representation entry,
// in one pass. ReLU'(0) is taken as 0.
ProxyGradient ProxyGradientOf(const ProxyParams& p, const GraphInstance& g,
                              std::span<const double> x);

// ---------------------------------------------------------------------------
// Learned feature maps producing ProxyParams from instance attributes

// y = A x + c, or y = A ReLU(B x + c1) + c2 when hidden > 0.
struct FeatureMap {
  std::size_t in = 0;
  std::size_t hidden = 0;
  std::size_t out = 0;
  std::size_t offset = 0;  // into the model weight vector

  std::size_t size() const;
  void Forward(std::span<const double> weights, std::span<const double> input,
               std::span<double> output) const;
  // Accumulates d(loss)/d(weights) given d(loss)/d(output).
  void Backward(std::span<const double> weights, std::span<const double> input,
                std::span<const double> doutput, std::span<double> dweights) const;
};

class ProxyModel {
 public:
  ProxyModel() = default;
  ProxyModel(Architecture arch, Scope scope, std::size_t width, std::size_t attr_dim,
             std::size_t hidden, std::uint64_t seed);

  Architecture architecture() const { return arch_; }
  Scope scope() const { return scope_; }
  std::size_t width() const { return width_; }
  std::size_t hidden() const { return hidden_; }
  // Attribute dimension of the graph the maps run on (the line graph for edge scope).
  std::size_t attr_dim() const { return attr_dim_; }

  std::vector<double>& weights() { return weights_; }
  const std::vector<double>& weights() const { return weights_; }
  std::span<const double> head_weights() const;

  // Attributes enter the maps as (a - shift) / scale.
  std::vector<double>& attr_shift() { return attr_shift_; }
  const std::vector<double>& attr_shift() const { return attr_shift_; }
  std::vector<double>& attr_scale() { return attr_scale_; }
  const std::vector<double>& attr_scale() const { return attr_scale_; }
  double out_scale() const { return out_scale_; }
  double out_offset() const { return out_offset_; }
  void set_output_normalization(double scale, double offset);

  // The graph the proxy runs on: `g` itself for node scope, its line graph
  // for edge scope.
  GraphInstance Prepare(const GraphInstance& g) const;

  // Representation for an already prepared graph.
  ProxyParams Encode(const GraphInstance& prepared) const;
  // Accumulates weight gradients given representation gradients.
  void Backward(const GraphInstance& prepared, const ProxyParams& dparams,
                std::span<double> dweights) const;

  // Clamps concave-head weights to >= 0. No-op for affine heads.
  void ProjectHead();

  std::string config_hash;  // hash of the training configuration that produced it

 private:
  std::vector<double> ScaledAttrs(const GraphInstance& g, int v) const;
  std::vector<double> NodeInput(const GraphInstance& g, int v, std::span<const double> mean) const;
  std::vector<double> EdgeInput(const GraphInstance& g, int e, std::span<const double> mean) const;
  std::vector<double> ScaledMean(const GraphInstance& g) const;

  Architecture arch_ = Architecture::kAff;
  Scope scope_ = Scope::kNode;
  std::size_t width_ = 0;
  std::size_t attr_dim_ = 0;
  std::size_t hidden_ = 0;
  FeatureMap graph_map_, node_map_, edge_map_, node_bias_map_, edge_bias_map_;
  std::size_t head_offset_ = 0;
  std::vector<double> weights_;
  std::vector<double> attr_shift_;
  std::vector<double> attr_scale_;
  double out_scale_ = 1.0;
  double out_offset_ = 0.0;

  friend nlohmann::json CheckpointToJson(const ProxyModel& model);
  friend ProxyModel CheckpointFromJson(const nlohmann::json& j);
};

// The proxy as a relaxation over the variables of `instance` (encoded once).
RelaxedFunction ProxyRelaxation(const ProxyModel& model, const GraphInstance& instance);

// ---------------------------------------------------------------------------
// Training

enum class LossKind { kSquared, kHuber };

struct TrainConfig {
  LossKind loss = LossKind::kSquared;
  double huber_delta = 1.0;
  double step_size = 1e-2;
  std::size_t steps = 200;  // epochs over the dataset
  std::size_t batch = 64;
  std::uint64_t seed = 0;
  bool projection = true;  // keep concave-head weights >= 0 after every step
  std::size_t width = 8;
  std::size_t hidden = 0;
  bool decay = true;  // cosine decay of the step size over the run

  nlohmann::json ToJson() const;
  std::string Hash() const;
};

struct TrainResult {
  ProxyModel model;
  std::vector<double> loss_curve;  // mean training objective per epoch (normalized units)
  std::vector<double> mse_curve;   // mean squared error per epoch (label units)
  double final_mse = 0.0;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::size_t step)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// Gradient descent (Adam) on the chosen loss. When `resume` is given its
// weights and normalization are the starting point.
TrainResult TrainProxy(const std::vector<DatasetRow>& dataset, const TrainConfig& config,
                       Architecture arch, Scope scope, const ProxyModel* resume = nullptr);

// Mean squared error of the model over labelled rows.
double EvaluateMse(const ProxyModel& model, const std::vector<DatasetRow>& dataset);

// ---------------------------------------------------------------------------
// Checkpoints (JSON)

nlohmann::json CheckpointToJson(const ProxyModel& model);
ProxyModel CheckpointFromJson(const nlohmann::json& j);
void SaveCheckpoint(const ProxyModel& model, const std::filesystem::path& path);
ProxyModel LoadCheckpoint(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Unstructured baseline proxy: one neighbourhood-averaging step, a rectified
// hidden layer per node, sum pooling. No structure is claimed.

class MlpProxy {
 public:
  MlpProxy() = default;
  MlpProxy(Scope scope, std::size_t attr_dim, std::size_t hidden, std::uint64_t seed);

  Scope scope() const { return scope_; }
  GraphInstance Prepare(const GraphInstance& g) const;
  // Value, d/dx (optional) and d/dweights accumulation (optional).
  double Eval(const GraphInstance& prepared, std::span<const double> x, std::span<double> dx,
              std::span<double> dweights, double dout = 1.0) const;

  std::vector<double>& weights() { return weights_; }
  const std::vector<double>& weights() const { return weights_; }
  std::vector<double>& attr_shift() { return attr_shift_; }
  std::vector<double>& attr_scale() { return attr_scale_; }
  double out_scale = 1.0;
  double out_offset = 0.0;

 private:
  std::vector<double> Inputs(const GraphInstance& g, std::span<const double> x, int v) const;

  Scope scope_ = Scope::kNode;
  std::size_t attr_dim_ = 0;
  std::size_t hidden_ = 0;
  std::size_t input_dim_ = 0;
  std::vector<double> weights_;
  std::vector<double> attr_shift_;
  std::vector<double> attr_scale_;
};

struct MlpTrainResult {
  MlpProxy model;
  std::vector<double> mse_curve;
};

MlpTrainResult TrainMlpProxy(const std::vector<DatasetRow>& dataset, const TrainConfig& config,
                             Scope scope, std::size_t hidden = 32);
RelaxedFunction MlpRelaxation(const MlpProxy& model, const GraphInstance& instance);

}  // namespace relaxround

#endif  // RELAXROUND_PROXY_HPP
