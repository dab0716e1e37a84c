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

#include "relaxround/proxy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <tuple>
#include <utility>

namespace relaxround {

namespace {

using Vec = std::vector<double>;

double Relu(double v) { return v > 0.0 ? v : 0.0; }

void CheckLength(std::size_t got, std::size_t want, const std::string& what) {
  if (got != want) {
    throw std::invalid_argument(what + ": expected length " + std::to_string(want) + ", got " +
                                std::to_string(got));
  }
}

void CheckRows(const std::vector<Vec>& rows, std::size_t count, std::size_t width,
               const std::string& what) {
  CheckLength(rows.size(), count, what + " count");
  for (const auto& r : rows) CheckLength(r.size(), width, what + " width");
}

// Shared forward/backward for the latent + head. dx and dparams are optional.
double EvaluateProxy(const ProxyParams& p, const GraphInstance& g, std::span<const double> x,
                     std::span<double> dx, ProxyParams* dparams) {
  const std::size_t F = p.width;
  const auto n = static_cast<std::size_t>(g.node_count());
  CheckLength(x.size(), n, "proxy input");

  // Forward through the latent. For the higher-order form keep per-node
  // a_v and P_v so the backward pass can reuse them.
  Vec phi(F, 0.0);
  std::vector<Vec> a_vec, prod_vec;
  if (p.latent == LatentKind::kSecondOrder) {
    phi = p.W;
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t k = 0; k < F; ++k) phi[k] += p.U[v][k] * x[v];
    }
    for (int e = 0; e < g.edge_count(); ++e) {
      const auto& ed = g.edge(e);
      const double xx = x[static_cast<std::size_t>(ed.u)] * x[static_cast<std::size_t>(ed.v)];
      for (std::size_t k = 0; k < F; ++k) phi[k] += p.Q[static_cast<std::size_t>(e)][k] * xx;
    }
  } else {
    a_vec.assign(n, Vec(F));
    prod_vec.assign(n, Vec(F, 1.0));
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t k = 0; k < F; ++k) a_vec[v][k] = p.U[v][k] * x[v] + p.U_bias[v][k];
      const auto& inc = g.incident(static_cast<int>(v));
      const auto& nb = g.neighbors(static_cast<int>(v));
      for (std::size_t j = 0; j < inc.size(); ++j) {
        const auto e = static_cast<std::size_t>(inc[j]);
        const double xu = x[static_cast<std::size_t>(nb[j])];
        for (std::size_t k = 0; k < F; ++k) prod_vec[v][k] *= p.Q[e][k] * xu + p.Q_bias[e][k];
      }
      for (std::size_t k = 0; k < F; ++k) phi[k] += a_vec[v][k] * prod_vec[v][k];
    }
  }

  double h = 0.0;
  Vec dphi(F, 0.0);
  if (p.head == HeadKind::kAffine) {
    for (std::size_t k = 0; k < F; ++k) {
      h += p.w[k] * phi[k];
      dphi[k] = p.w[k];
    }
  } else {
    for (std::size_t k = 0; k < F; ++k) {
      h -= p.w[k] * Relu(phi[k]);
      dphi[k] = phi[k] > 0.0 ? -p.w[k] : 0.0;
    }
    h += p.b;
  }
  const double value = p.out_scale * h + p.out_offset;
  if (dx.empty() && dparams == nullptr) return value;

  for (double& d : dphi) d *= p.out_scale;
  if (dparams != nullptr) {
    *dparams = ProxyParams::Zeros(p.latent, p.head, F, g);
    if (p.head == HeadKind::kAffine) {
      for (std::size_t k = 0; k < F; ++k) dparams->w[k] = p.out_scale * phi[k];
    } else {
      for (std::size_t k = 0; k < F; ++k) dparams->w[k] = -p.out_scale * Relu(phi[k]);
      dparams->b = p.out_scale;
    }
  }
  if (!dx.empty()) {
    CheckLength(dx.size(), n, "proxy gradient buffer");
    std::fill(dx.begin(), dx.end(), 0.0);
  }

  if (p.latent == LatentKind::kSecondOrder) {
    if (dparams != nullptr) dparams->W = dphi;
    for (std::size_t v = 0; v < n; ++v) {
      double acc = 0.0;
      for (std::size_t k = 0; k < F; ++k) {
        acc += dphi[k] * p.U[v][k];
        if (dparams != nullptr) dparams->U[v][k] = dphi[k] * x[v];
      }
      if (!dx.empty()) dx[v] += acc;
    }
    for (int e = 0; e < g.edge_count(); ++e) {
      const auto& ed = g.edge(e);
      const auto u = static_cast<std::size_t>(ed.u);
      const auto v = static_cast<std::size_t>(ed.v);
      double dq = 0.0;
      for (std::size_t k = 0; k < F; ++k) {
        dq += dphi[k] * p.Q[static_cast<std::size_t>(e)][k];
        if (dparams != nullptr) dparams->Q[static_cast<std::size_t>(e)][k] = dphi[k] * x[u] * x[v];
      }
      if (!dx.empty()) {
        dx[u] += dq * x[v];
        dx[v] += dq * x[u];
      }
    }
    return value;
  }

  // Higher order. d phi / d a_v = P_v; d phi / d factor_j of v = a_v * prod_{i != j}.
  Vec prefix, suffix;
  for (std::size_t v = 0; v < n; ++v) {
    const auto& inc = g.incident(static_cast<int>(v));
    const auto& nb = g.neighbors(static_cast<int>(v));
    double acc = 0.0;
    for (std::size_t k = 0; k < F; ++k) {
      const double da = dphi[k] * prod_vec[v][k];
      acc += da * p.U[v][k];
      if (dparams != nullptr) {
        dparams->U[v][k] += da * x[v];
        dparams->U_bias[v][k] += da;
      }
    }
    if (!dx.empty()) dx[v] += acc;
    const std::size_t d = inc.size();
    if (d == 0) continue;
    for (std::size_t k = 0; k < F; ++k) {
      prefix.assign(d + 1, 1.0);
      suffix.assign(d + 1, 1.0);
      for (std::size_t j = 0; j < d; ++j) {
        const auto e = static_cast<std::size_t>(inc[j]);
        prefix[j + 1] = prefix[j] * (p.Q[e][k] * x[static_cast<std::size_t>(nb[j])] + p.Q_bias[e][k]);
      }
      for (std::size_t j = d; j-- > 0;) {
        const auto e = static_cast<std::size_t>(inc[j]);
        suffix[j] = suffix[j + 1] * (p.Q[e][k] * x[static_cast<std::size_t>(nb[j])] + p.Q_bias[e][k]);
      }
      for (std::size_t j = 0; j < d; ++j) {
        const auto e = static_cast<std::size_t>(inc[j]);
        const auto u = static_cast<std::size_t>(nb[j]);
        const double dfac = dphi[k] * a_vec[v][k] * prefix[j] * suffix[j + 1];
        if (dparams != nullptr) {
          dparams->Q[e][k] += dfac * x[u];
          dparams->Q_bias[e][k] += dfac;
        }
        if (!dx.empty()) dx[u] += dfac * p.Q[e][k];
      }
    }
  }
  return value;
}

}  // namespace

const char* ArchitectureName(Architecture arch) {
  switch (arch) {
    case Architecture::kAff:
      return "AFF";
    case Architecture::kCon:
      return "CON";
    case Architecture::kHigher:
      return "higher";
  }
  return "AFF";
}

Architecture ParseArchitecture(const std::string& name) {
  if (name == "AFF" || name == "aff") return Architecture::kAff;
  if (name == "CON" || name == "con") return Architecture::kCon;
  if (name == "higher" || name == "HIGHER") return Architecture::kHigher;
  throw std::invalid_argument("unknown architecture '" + name + "' (expected AFF, CON or higher)");
}

LatentKind LatentOf(Architecture arch) {
  return arch == Architecture::kHigher ? LatentKind::kHigherOrder : LatentKind::kSecondOrder;
}

HeadKind HeadOf(Architecture arch) {
  return arch == Architecture::kCon ? HeadKind::kConcave : HeadKind::kAffine;
}

ProxyParams ProxyParams::Zeros(LatentKind latent, HeadKind head, std::size_t width,
                               const GraphInstance& g) {
  ProxyParams p;
  p.latent = latent;
  p.head = head;
  p.width = width;
  const auto n = static_cast<std::size_t>(g.node_count());
  const auto m = static_cast<std::size_t>(g.edge_count());
  p.W.assign(width, 0.0);
  p.U.assign(n, Vec(width, 0.0));
  p.Q.assign(m, Vec(width, 0.0));
  if (latent == LatentKind::kHigherOrder) {
    p.U_bias.assign(n, Vec(width, 0.0));
    p.Q_bias.assign(m, Vec(width, 0.0));
  }
  p.w.assign(width, 0.0);
  return p;
}

void ProxyParams::Validate(const GraphInstance& g) const {
  if (width == 0) throw std::invalid_argument("proxy width must be positive");
  const auto n = static_cast<std::size_t>(g.node_count());
  const auto m = static_cast<std::size_t>(g.edge_count());
  CheckLength(W.size(), width, "W");
  CheckRows(U, n, width, "U");
  CheckRows(Q, m, width, "Q");
  if (latent == LatentKind::kHigherOrder) {
    CheckRows(U_bias, n, width, "U'");
    CheckRows(Q_bias, m, width, "Q'");
  }
  CheckLength(w.size(), width, "head weights");
  if (head == HeadKind::kConcave) {
    for (std::size_t k = 0; k < width; ++k) {
      if (!(w[k] >= 0.0)) {
        throw std::invalid_argument("concave head weight w[" + std::to_string(k) +
                                    "] = " + FormatDouble(w[k]) + " is negative");
      }
    }
  }
  if (!(out_scale > 0.0)) throw std::invalid_argument("proxy out_scale must be positive");
}

std::vector<double> PhiSecondOrder(const ProxyParams& p, const GraphInstance& g,
                                   std::span<const double> x) {
  ProxyParams q = p;
  q.latent = LatentKind::kSecondOrder;
  q.Validate(g);
  CheckLength(x.size(), static_cast<std::size_t>(g.node_count()), "phi input");
  Vec phi = q.W;
  for (std::size_t v = 0; v < x.size(); ++v) {
    for (std::size_t k = 0; k < q.width; ++k) phi[k] += q.U[v][k] * x[v];
  }
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& ed = g.edge(e);
    const double xx = x[static_cast<std::size_t>(ed.u)] * x[static_cast<std::size_t>(ed.v)];
    for (std::size_t k = 0; k < q.width; ++k) phi[k] += q.Q[static_cast<std::size_t>(e)][k] * xx;
  }
  return phi;
}

std::vector<double> PhiHigherOrder(const ProxyParams& p, const GraphInstance& g,
                                   std::span<const double> x) {
  ProxyParams q = p;
  q.latent = LatentKind::kHigherOrder;
  q.Validate(g);
  CheckLength(x.size(), static_cast<std::size_t>(g.node_count()), "phi input");
  Vec phi(q.width, 0.0);
  for (int v = 0; v < g.node_count(); ++v) {
    const auto sv = static_cast<std::size_t>(v);
    Vec term(q.width);
    for (std::size_t k = 0; k < q.width; ++k) term[k] = q.U[sv][k] * x[sv] + q.U_bias[sv][k];
    const auto& inc = g.incident(v);
    const auto& nb = g.neighbors(v);
    for (std::size_t j = 0; j < inc.size(); ++j) {
      const auto e = static_cast<std::size_t>(inc[j]);
      const double xu = x[static_cast<std::size_t>(nb[j])];
      for (std::size_t k = 0; k < q.width; ++k) term[k] *= q.Q[e][k] * xu + q.Q_bias[e][k];
    }
    for (std::size_t k = 0; k < q.width; ++k) phi[k] += term[k];
  }
  return phi;
}

std::vector<double> Phi(const ProxyParams& p, const GraphInstance& g, std::span<const double> x) {
  return p.latent == LatentKind::kSecondOrder ? PhiSecondOrder(p, g, x) : PhiHigherOrder(p, g, x);
}

double AffEval(const ProxyParams& p, const GraphInstance& g, std::span<const double> x) {
  const Vec phi = Phi(p, g, x);
  double h = 0.0;
  for (std::size_t k = 0; k < p.width; ++k) h += p.w[k] * phi[k];
  return h;
}

double ConEval(const ProxyParams& p, const GraphInstance& g, std::span<const double> x) {
  ProxyParams q = p;
  q.head = HeadKind::kConcave;
  q.Validate(g);
  const Vec phi = Phi(q, g, x);
  double h = q.b;
  for (std::size_t k = 0; k < q.width; ++k) h -= q.w[k] * Relu(phi[k]);
  return h;
}

double ProxyEval(const ProxyParams& p, const GraphInstance& g, std::span<const double> x) {
  p.Validate(g);
  return EvaluateProxy(p, g, x, {}, nullptr);
}

ProxyGradient ProxyGradientOf(const ProxyParams& p, const GraphInstance& g,
                              std::span<const double> x) {
  p.Validate(g);
  ProxyGradient out;
  out.dx.assign(x.size(), 0.0);
  out.value = EvaluateProxy(p, g, x, out.dx, &out.dparams);
  return out;
}

// ---------------------------------------------------------------------------

std::size_t FeatureMap::size() const {
  if (out == 0) return 0;
  if (hidden == 0) return out * in + out;
  return hidden * in + hidden + out * hidden + out;
}

void FeatureMap::Forward(std::span<const double> weights, std::span<const double> input,
                         std::span<double> output) const {
  const double* w = weights.data() + offset;
  if (hidden == 0) {
    for (std::size_t o = 0; o < out; ++o) {
      double s = w[out * in + o];
      for (std::size_t i = 0; i < in; ++i) s += w[o * in + i] * input[i];
      output[o] = s;
    }
    return;
  }
  const double* B = w;
  const double* c1 = B + hidden * in;
  const double* A = c1 + hidden;
  const double* c2 = A + out * hidden;
  Vec act(hidden);
  for (std::size_t h = 0; h < hidden; ++h) {
    double s = c1[h];
    for (std::size_t i = 0; i < in; ++i) s += B[h * in + i] * input[i];
    act[h] = Relu(s);
  }
  for (std::size_t o = 0; o < out; ++o) {
    double s = c2[o];
    for (std::size_t h = 0; h < hidden; ++h) s += A[o * hidden + h] * act[h];
    output[o] = s;
  }
}

void FeatureMap::Backward(std::span<const double> weights, std::span<const double> input,
                          std::span<const double> doutput, std::span<double> dweights) const {
  const double* w = weights.data() + offset;
  double* dw = dweights.data() + offset;
  if (hidden == 0) {
    for (std::size_t o = 0; o < out; ++o) {
      const double g = doutput[o];
      if (g == 0.0) continue;
      dw[out * in + o] += g;
      for (std::size_t i = 0; i < in; ++i) dw[o * in + i] += g * input[i];
    }
    return;
  }
  const double* B = w;
  const double* c1 = B + hidden * in;
  const double* A = c1 + hidden;
  double* dB = dw;
  double* dc1 = dB + hidden * in;
  double* dA = dc1 + hidden;
  double* dc2 = dA + out * hidden;
  Vec pre(hidden);
  for (std::size_t h = 0; h < hidden; ++h) {
    double s = c1[h];
    for (std::size_t i = 0; i < in; ++i) s += B[h * in + i] * input[i];
    pre[h] = s;
  }
  Vec dact(hidden, 0.0);
  for (std::size_t o = 0; o < out; ++o) {
    const double g = doutput[o];
    if (g == 0.0) continue;
    dc2[o] += g;
    for (std::size_t h = 0; h < hidden; ++h) {
      dA[o * hidden + h] += g * Relu(pre[h]);
      dact[h] += g * A[o * hidden + h];
    }
  }
  for (std::size_t h = 0; h < hidden; ++h) {
    if (pre[h] <= 0.0 || dact[h] == 0.0) continue;
    dc1[h] += dact[h];
    for (std::size_t i = 0; i < in; ++i) dB[h * in + i] += dact[h] * input[i];
  }
}

// ---------------------------------------------------------------------------

ProxyModel::ProxyModel(Architecture arch, Scope scope, std::size_t width, std::size_t attr_dim,
                       std::size_t hidden, std::uint64_t seed)
    : arch_(arch), scope_(scope), width_(width), attr_dim_(attr_dim), hidden_(hidden) {
  if (width == 0) throw std::invalid_argument("proxy width must be positive");
  const std::size_t d = attr_dim;
  std::size_t offset = 0;
  auto place = [&](FeatureMap& m, std::size_t in, std::size_t out) {
    m = FeatureMap{in, hidden, out, offset};
    offset += m.size();
  };
  const bool higher = LatentOf(arch) == LatentKind::kHigherOrder;
  place(graph_map_, d, higher ? 0 : width);
  place(node_map_, 2 * d, width);
  place(edge_map_, 3 * d, width);
  place(node_bias_map_, 2 * d, higher ? width : 0);
  place(edge_bias_map_, 3 * d, higher ? width : 0);
  head_offset_ = offset;
  weights_.assign(offset + width + 1, 0.0);
  attr_scale_.assign(d, 1.0);
  attr_shift_.assign(d, 0.0);

  Rng rng = Rng(seed).Split("proxy-init");
  auto init = [&](const FeatureMap& m, double bias) {
    if (m.out == 0) return;
    const double* end = weights_.data() + m.offset + m.size();
    (void)end;
    double* w = weights_.data() + m.offset;
    const std::size_t first_in = m.in;
    const std::size_t first_out = m.hidden == 0 ? m.out : m.hidden;
    const double s1 = 0.5 / std::sqrt(static_cast<double>(std::max<std::size_t>(1, first_in)));
    for (std::size_t i = 0; i < first_out * first_in; ++i) w[i] = s1 * rng.Normal();
    double* b1 = w + first_out * first_in;
    if (m.hidden == 0) {
      for (std::size_t o = 0; o < m.out; ++o) b1[o] = bias + 0.1 * rng.Normal();
      return;
    }
    for (std::size_t h = 0; h < m.hidden; ++h) b1[h] = 0.1 * rng.Normal();
    double* A = b1 + m.hidden;
    const double s2 = 0.5 / std::sqrt(static_cast<double>(m.hidden));
    for (std::size_t i = 0; i < m.out * m.hidden; ++i) A[i] = s2 * rng.Normal();
    double* c2 = A + m.out * m.hidden;
    for (std::size_t o = 0; o < m.out; ++o) c2[o] = bias + 0.1 * rng.Normal();
  };
  const bool concave = HeadOf(arch) == HeadKind::kConcave;
  init(graph_map_, concave ? 1.0 : 0.0);
  init(node_map_, 0.0);
  init(edge_map_, 0.0);
  init(node_bias_map_, 1.0);
  init(edge_bias_map_, 1.0);
  for (std::size_t k = 0; k < width; ++k) {
    const double v = rng.Normal() / std::sqrt(static_cast<double>(width));
    weights_[head_offset_ + k] = concave ? std::abs(v) : v;
  }
}

std::span<const double> ProxyModel::head_weights() const {
  return std::span<const double>(weights_).subspan(head_offset_, width_);
}

void ProxyModel::set_output_normalization(double scale, double offset) {
  if (!(scale > 0.0)) throw std::invalid_argument("output scale must be positive");
  out_scale_ = scale;
  out_offset_ = offset;
}

GraphInstance ProxyModel::Prepare(const GraphInstance& g) const {
  return scope_ == Scope::kEdge ? LineGraph(g) : g;
}

std::vector<double> ProxyModel::ScaledAttrs(const GraphInstance& g, int v) const {
  const auto a = g.node_attrs(v);
  if (a.size() != attr_dim_) {
    throw std::invalid_argument("proxy expects attribute dimension " + std::to_string(attr_dim_) +
                                ", instance has " + std::to_string(a.size()));
  }
  Vec s(attr_dim_);
  for (std::size_t k = 0; k < attr_dim_; ++k) s[k] = (a[k] - attr_shift_[k]) / attr_scale_[k];
  return s;
}

std::vector<double> ProxyModel::ScaledMean(const GraphInstance& g) const {
  Vec mean = g.mean_node_attrs();
  CheckLength(mean.size(), attr_dim_, "instance attribute dimension");
  for (std::size_t k = 0; k < attr_dim_; ++k) mean[k] = (mean[k] - attr_shift_[k]) / attr_scale_[k];
  return mean;
}

std::vector<double> ProxyModel::NodeInput(const GraphInstance& g, int v,
                                          std::span<const double> mean) const {
  Vec in = ScaledAttrs(g, v);
  in.insert(in.end(), mean.begin(), mean.end());
  return in;
}

std::vector<double> ProxyModel::EdgeInput(const GraphInstance& g, int e,
                                          std::span<const double> mean) const {
  const Vec zu = ScaledAttrs(g, g.edge(e).u);
  const Vec zv = ScaledAttrs(g, g.edge(e).v);
  Vec in(3 * attr_dim_);
  for (std::size_t k = 0; k < attr_dim_; ++k) {
    in[k] = zu[k] + zv[k];
    in[attr_dim_ + k] = zu[k] * zv[k];
    in[2 * attr_dim_ + k] = mean[k];
  }
  return in;
}

ProxyParams ProxyModel::Encode(const GraphInstance& prepared) const {
  ProxyParams p = ProxyParams::Zeros(LatentOf(arch_), HeadOf(arch_), width_, prepared);
  const Vec mean = ScaledMean(prepared);
  if (graph_map_.out > 0) graph_map_.Forward(weights_, mean, p.W);
  for (int v = 0; v < prepared.node_count(); ++v) {
    const Vec in = NodeInput(prepared, v, mean);
    node_map_.Forward(weights_, in, p.U[static_cast<std::size_t>(v)]);
    if (node_bias_map_.out > 0) node_bias_map_.Forward(weights_, in, p.U_bias[static_cast<std::size_t>(v)]);
  }
  for (int e = 0; e < prepared.edge_count(); ++e) {
    const Vec in = EdgeInput(prepared, e, mean);
    edge_map_.Forward(weights_, in, p.Q[static_cast<std::size_t>(e)]);
    if (edge_bias_map_.out > 0) edge_bias_map_.Forward(weights_, in, p.Q_bias[static_cast<std::size_t>(e)]);
  }
  std::copy_n(weights_.begin() + static_cast<std::ptrdiff_t>(head_offset_), width_, p.w.begin());
  p.b = weights_[head_offset_ + width_];
  p.out_scale = out_scale_;
  p.out_offset = out_offset_;
  return p;
}

void ProxyModel::Backward(const GraphInstance& prepared, const ProxyParams& dparams,
                          std::span<double> dweights) const {
  CheckLength(dweights.size(), weights_.size(), "weight gradient buffer");
  const Vec mean = ScaledMean(prepared);
  if (graph_map_.out > 0) graph_map_.Backward(weights_, mean, dparams.W, dweights);
  for (int v = 0; v < prepared.node_count(); ++v) {
    const auto sv = static_cast<std::size_t>(v);
    const Vec in = NodeInput(prepared, v, mean);
    node_map_.Backward(weights_, in, dparams.U[sv], dweights);
    if (node_bias_map_.out > 0) node_bias_map_.Backward(weights_, in, dparams.U_bias[sv], dweights);
  }
  for (int e = 0; e < prepared.edge_count(); ++e) {
    const auto se = static_cast<std::size_t>(e);
    const Vec in = EdgeInput(prepared, e, mean);
    edge_map_.Backward(weights_, in, dparams.Q[se], dweights);
    if (edge_bias_map_.out > 0) edge_bias_map_.Backward(weights_, in, dparams.Q_bias[se], dweights);
  }
  for (std::size_t k = 0; k < width_; ++k) dweights[head_offset_ + k] += dparams.w[k];
  dweights[head_offset_ + width_] += dparams.b;
}

void ProxyModel::ProjectHead() {
  if (HeadOf(arch_) != HeadKind::kConcave) return;
  for (std::size_t k = 0; k < width_; ++k) {
    double& w = weights_[head_offset_ + k];
    if (!(w >= 0.0)) w = 0.0;
  }
}

RelaxedFunction ProxyRelaxation(const ProxyModel& model, const GraphInstance& instance) {
  auto prepared = std::make_shared<const GraphInstance>(model.Prepare(instance));
  auto params = std::make_shared<const ProxyParams>(model.Encode(*prepared));
  params->Validate(*prepared);
  const Structure s =
      HeadOf(model.architecture()) == HeadKind::kConcave ? Structure::kConcave : Structure::kAffine;
  return RelaxedFunction(
      static_cast<std::size_t>(prepared->node_count()), s,
      [prepared, params](std::span<const double> x) {
        return EvaluateProxy(*params, *prepared, x, {}, nullptr);
      },
      [prepared, params](std::span<const double> x, std::span<double> grad) {
        return EvaluateProxy(*params, *prepared, x, grad, nullptr);
      },
      std::string("proxy_") + ArchitectureName(model.architecture()));
}

// ---------------------------------------------------------------------------
// Training

nlohmann::json TrainConfig::ToJson() const {
  return {{"loss", loss == LossKind::kSquared ? "squared" : "huber"},
          {"huber_delta", huber_delta},
          {"step_size", step_size},
          {"steps", steps},
          {"batch", batch},
          {"seed", seed},
          {"projection", projection},
          {"width", width},
          {"hidden", hidden},
          {"decay", decay}};
}

std::string TrainConfig::Hash() const {
  const std::string text = ToJson().dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

struct Adam {
  explicit Adam(std::size_t n, double lr) : m(n, 0.0), v(n, 0.0), lr(lr) {}
  void Step(std::span<double> w, std::span<const double> g) {
    ++t;
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      w[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
    }
  }
  std::vector<double> m, v;
  double lr;
  long t = 0;
};

struct LossTerm {
  double value;
  double derivative;
};

LossTerm Loss(LossKind kind, double delta, double r) {
  if (kind == LossKind::kSquared) return {r * r, 2.0 * r};
  if (std::abs(r) <= delta) return {0.5 * r * r, r};
  return {delta * (std::abs(r) - 0.5 * delta), r > 0 ? delta : -delta};
}

// Cosine decay from step_size to a thousandth of it.
double StepScale(const TrainConfig& config, double step, double total) {
  if (!config.decay || total <= 1.0) return 1.0;
  const double progress = std::min(1.0, step / (total - 1.0));
  return 1e-3 + (1.0 - 1e-3) * 0.5 * (1.0 + std::cos(3.14159265358979323846 * progress));
}

std::vector<double> AsDoubles(const BinaryVector& x) { return {x.begin(), x.end()}; }

void CheckDataset(const std::vector<DatasetRow>& dataset, Scope scope) {
  if (dataset.empty()) throw std::invalid_argument("training needs a non-empty dataset");
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& row = dataset[i];
    if (row.label.assignment.size() != row.instance.variable_count(scope)) {
      throw std::invalid_argument("dataset row " + std::to_string(i) + " has " +
                                  std::to_string(row.label.assignment.size()) + " variables, " +
                                  ScopeName(scope) + " scope needs " +
                                  std::to_string(row.instance.variable_count(scope)));
    }
  }
}

std::pair<double, double> LabelMoments(const std::vector<DatasetRow>& dataset) {
  double mean = 0.0;
  for (const auto& r : dataset) mean += r.label.cost;
  mean /= static_cast<double>(dataset.size());
  double var = 0.0;
  for (const auto& r : dataset) var += (r.label.cost - mean) * (r.label.cost - mean);
  var /= static_cast<double>(dataset.size());
  const double sd = std::sqrt(var);
  return {mean, sd > 1e-12 ? sd : 1.0};
}

// Per-dimension mean and standard deviation of node attributes.
std::pair<std::vector<double>, std::vector<double>> AttrMoments(
    const std::vector<GraphInstance>& prepared) {
  const std::size_t d = prepared.front().attr_dim();
  std::vector<double> sum(d, 0.0), sq(d, 0.0);
  double count = 0.0;
  for (const auto& g : prepared) {
    for (int v = 0; v < g.node_count(); ++v) {
      const auto a = g.node_attrs(v);
      for (std::size_t k = 0; k < d; ++k) {
        sum[k] += a[k];
        sq[k] += a[k] * a[k];
      }
      count += 1.0;
    }
  }
  std::vector<double> shift(d, 0.0), scale(d, 1.0);
  if (count == 0.0) return {shift, scale};
  for (std::size_t k = 0; k < d; ++k) {
    shift[k] = sum[k] / count;
    const double var = sq[k] / count - shift[k] * shift[k];
    scale[k] = var > 1e-18 ? std::sqrt(var) : 1.0;
  }
  return {shift, scale};
}

}  // namespace

TrainResult TrainProxy(const std::vector<DatasetRow>& dataset, const TrainConfig& config,
                       Architecture arch, Scope scope, const ProxyModel* resume) {
  CheckDataset(dataset, scope);
  if (!(config.step_size > 0.0)) throw std::invalid_argument("step_size must be positive");
  if (config.batch == 0) throw std::invalid_argument("batch must be positive");

  TrainResult result;
  std::vector<GraphInstance> prepared;
  prepared.reserve(dataset.size());
  if (resume != nullptr) {
    if (resume->architecture() != arch || resume->scope() != scope) {
      throw std::invalid_argument("resume checkpoint has a different architecture or scope");
    }
    result.model = *resume;
  }
  for (const auto& row : dataset) {
    prepared.push_back(scope == Scope::kEdge ? LineGraph(row.instance) : row.instance);
  }
  if (resume == nullptr) {
    result.model = ProxyModel(arch, scope, config.width, prepared.front().attr_dim(), config.hidden,
                              config.seed);
    std::tie(result.model.attr_shift(), result.model.attr_scale()) = AttrMoments(prepared);
    const auto [mean, sd] = LabelMoments(dataset);
    result.model.set_output_normalization(sd, mean);
  }
  ProxyModel& model = result.model;
  model.config_hash = config.Hash();
  const double scale = model.out_scale();

  Rng rng = Rng(config.seed).Split("proxy-train");
  std::vector<std::size_t> order(dataset.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Adam adam(model.weights().size(), config.step_size);
  std::vector<double> grad(model.weights().size());
  std::size_t step = 0;
  const std::size_t batches = (order.size() + config.batch - 1) / config.batch;
  const double total_steps = static_cast<double>(config.steps * batches);

  for (std::size_t epoch = 0; epoch < config.steps; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.Below(i)]);
    double epoch_loss = 0.0;
    double epoch_mse = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch) {
      const std::size_t end = std::min(order.size(), start + config.batch);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t bi = start; bi < end; ++bi) {
        const std::size_t idx = order[bi];
        const GraphInstance& g = prepared[idx];
        const ProxyParams p = model.Encode(g);
        const auto x = AsDoubles(dataset[idx].label.assignment);
        ProxyParams dp;
        const double y = EvaluateProxy(p, g, x, {}, &dp);
        const double r = (y - dataset[idx].label.cost) / scale;
        const LossTerm lt = Loss(config.loss, config.huber_delta, r);
        epoch_loss += lt.value;
        epoch_mse += (r * scale) * (r * scale);
        // d loss / d y = lt.derivative / scale; dp holds d y / d params.
        const double coef = lt.derivative / scale / static_cast<double>(end - start);
        auto scale_rows = [coef](std::vector<Vec>& rows) {
          for (auto& r2 : rows)
            for (double& v : r2) v *= coef;
        };
        for (double& v : dp.W) v *= coef;
        scale_rows(dp.U);
        scale_rows(dp.Q);
        scale_rows(dp.U_bias);
        scale_rows(dp.Q_bias);
        for (double& v : dp.w) v *= coef;
        dp.b *= coef;
        model.Backward(g, dp, grad);
      }
      adam.lr = config.step_size * StepScale(config, static_cast<double>(step), total_steps);
      adam.Step(model.weights(), grad);
      if (config.projection) model.ProjectHead();
      ++step;
      for (double w : model.weights()) {
        if (!std::isfinite(w)) {
          throw DivergenceError("proxy training diverged at step " + std::to_string(step), step);
        }
      }
    }
    epoch_loss /= static_cast<double>(dataset.size());
    epoch_mse /= static_cast<double>(dataset.size());
    if (!std::isfinite(epoch_loss)) {
      throw DivergenceError("proxy training loss is not finite at step " + std::to_string(step),
                            step);
    }
    result.loss_curve.push_back(epoch_loss);
    result.mse_curve.push_back(epoch_mse);
  }
  result.final_mse = EvaluateMse(model, dataset);
  return result;
}

double EvaluateMse(const ProxyModel& model, const std::vector<DatasetRow>& dataset) {
  if (dataset.empty()) return 0.0;
  double total = 0.0;
  for (const auto& row : dataset) {
    const GraphInstance g = model.Prepare(row.instance);
    const ProxyParams p = model.Encode(g);
    const auto x = AsDoubles(row.label.assignment);
    const double r = EvaluateProxy(p, g, x, {}, nullptr) - row.label.cost;
    total += r * r;
  }
  return total / static_cast<double>(dataset.size());
}

// ---------------------------------------------------------------------------
// Checkpoints

nlohmann::json CheckpointToJson(const ProxyModel& model) {
  return {{"format", "relaxround-proxy"},
          {"version", 1},
          {"architecture", ArchitectureName(model.arch_)},
          {"scope", ScopeName(model.scope_)},
          {"width", model.width_},
          {"hidden", model.hidden_},
          {"attr_dim", model.attr_dim_},
          {"attr_shift", model.attr_shift_},
          {"attr_scale", model.attr_scale_},
          {"out_scale", model.out_scale_},
          {"out_offset", model.out_offset_},
          {"config_hash", model.config_hash},
          {"weights", model.weights_}};
}

ProxyModel CheckpointFromJson(const nlohmann::json& j) {
  if (j.value("format", "") != "relaxround-proxy") {
    throw std::invalid_argument("not a proxy checkpoint");
  }
  if (j.value("version", 0) != 1) {
    throw std::invalid_argument("unsupported checkpoint version " +
                                std::to_string(j.value("version", 0)));
  }
  ProxyModel model(ParseArchitecture(j.at("architecture").get<std::string>()),
                   ParseScope(j.at("scope").get<std::string>()), j.at("width").get<std::size_t>(),
                   j.at("attr_dim").get<std::size_t>(), j.at("hidden").get<std::size_t>(), 0);
  auto weights = j.at("weights").get<std::vector<double>>();
  if (weights.size() != model.weights_.size()) {
    throw std::invalid_argument("checkpoint has " + std::to_string(weights.size()) +
                                " weights, layout needs " + std::to_string(model.weights_.size()));
  }
  model.weights_ = std::move(weights);
  model.attr_scale_ = j.at("attr_scale").get<std::vector<double>>();
  CheckLength(model.attr_scale_.size(), model.attr_dim_, "checkpoint attr_scale");
  model.attr_shift_ = j.at("attr_shift").get<std::vector<double>>();
  CheckLength(model.attr_shift_.size(), model.attr_dim_, "checkpoint attr_shift");
  model.set_output_normalization(j.at("out_scale").get<double>(), j.at("out_offset").get<double>());
  model.config_hash = j.value("config_hash", "");
  return model;
}

void SaveCheckpoint(const ProxyModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  out << CheckpointToJson(model).dump(1) << "\n";
}

ProxyModel LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  nlohmann::json j;
  in >> j;
  return CheckpointFromJson(j);
}

// ---------------------------------------------------------------------------
// Unstructured baseline

MlpProxy::MlpProxy(Scope scope, std::size_t attr_dim, std::size_t hidden, std::uint64_t seed)
    : scope_(scope), attr_dim_(attr_dim), hidden_(hidden), input_dim_(2 + 3 * attr_dim) {
  if (hidden == 0) throw std::invalid_argument("MLP hidden width must be positive");
  weights_.assign(hidden * input_dim_ + hidden + hidden + 1, 0.0);
  attr_scale_.assign(attr_dim, 1.0);
  attr_shift_.assign(attr_dim, 0.0);
  Rng rng = Rng(seed).Split("mlp-init");
  const double s1 = 1.0 / std::sqrt(static_cast<double>(input_dim_));
  for (std::size_t i = 0; i < hidden * input_dim_; ++i) weights_[i] = s1 * rng.Normal();
  for (std::size_t h = 0; h < hidden; ++h) weights_[hidden * input_dim_ + h] = 0.1 * rng.Normal();
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (std::size_t h = 0; h < hidden; ++h) {
    weights_[hidden * input_dim_ + hidden + h] = s2 * rng.Normal();
  }
}

GraphInstance MlpProxy::Prepare(const GraphInstance& g) const {
  return scope_ == Scope::kEdge ? LineGraph(g) : g;
}

std::vector<double> MlpProxy::Inputs(const GraphInstance& g, std::span<const double> x,
                                     int v) const {
  Vec in(input_dim_, 0.0);
  const auto sv = static_cast<std::size_t>(v);
  in[0] = x[sv];
  const auto& nb = g.neighbors(v);
  const auto a = g.node_attrs(v);
  CheckLength(a.size(), attr_dim_, "MLP attribute dimension");
  for (std::size_t k = 0; k < attr_dim_; ++k) in[2 + k] = (a[k] - attr_shift_[k]) / attr_scale_[k];
  if (!nb.empty()) {
    const double inv = 1.0 / static_cast<double>(nb.size());
    for (int u : nb) {
      in[1] += inv * x[static_cast<std::size_t>(u)];
      const auto au = g.node_attrs(u);
      for (std::size_t k = 0; k < attr_dim_; ++k) in[2 + attr_dim_ + k] += inv * (au[k] - attr_shift_[k]) / attr_scale_[k];
    }
  }
  const Vec mean = g.mean_node_attrs();
  for (std::size_t k = 0; k < attr_dim_; ++k) in[2 + 2 * attr_dim_ + k] = (mean[k] - attr_shift_[k]) / attr_scale_[k];
  return in;
}

double MlpProxy::Eval(const GraphInstance& prepared, std::span<const double> x,
                      std::span<double> dx, std::span<double> dweights, double dout) const {
  const auto n = static_cast<std::size_t>(prepared.node_count());
  CheckLength(x.size(), n, "MLP input");
  const double* B = weights_.data();
  const double* c = B + hidden_ * input_dim_;
  const double* a = c + hidden_;
  const double c_out = a[hidden_];
  if (!dx.empty()) {
    CheckLength(dx.size(), n, "MLP gradient buffer");
    std::fill(dx.begin(), dx.end(), 0.0);
  }
  if (!dweights.empty()) CheckLength(dweights.size(), weights_.size(), "MLP weight gradient");
  const double g_out = dout * out_scale;
  double total = c_out;
  Vec pre(hidden_);
  for (std::size_t v = 0; v < n; ++v) {
    const Vec in = Inputs(prepared, x, static_cast<int>(v));
    for (std::size_t h = 0; h < hidden_; ++h) {
      double s = c[h];
      for (std::size_t i = 0; i < input_dim_; ++i) s += B[h * input_dim_ + i] * in[i];
      pre[h] = s;
      total += a[h] * Relu(s);
    }
    if (dx.empty() && dweights.empty()) continue;
    double d_self = 0.0;
    double d_nbr = 0.0;
    for (std::size_t h = 0; h < hidden_; ++h) {
      if (!dweights.empty()) dweights[hidden_ * input_dim_ + hidden_ + h] += g_out * Relu(pre[h]);
      if (pre[h] <= 0.0) continue;
      const double dh = g_out * a[h];
      d_self += out_scale * a[h] * B[h * input_dim_];
      d_nbr += out_scale * a[h] * B[h * input_dim_ + 1];
      if (!dweights.empty()) {
        dweights[hidden_ * input_dim_ + h] += dh;
        for (std::size_t i = 0; i < input_dim_; ++i) dweights[h * input_dim_ + i] += dh * in[i];
      }
    }
    if (!dx.empty()) {
      dx[v] += d_self;
      const auto& nb = prepared.neighbors(static_cast<int>(v));
      for (int u : nb) dx[static_cast<std::size_t>(u)] += d_nbr / static_cast<double>(nb.size());
    }
  }
  if (!dweights.empty()) dweights[weights_.size() - 1] += g_out;
  return out_scale * total + out_offset;
}

MlpTrainResult TrainMlpProxy(const std::vector<DatasetRow>& dataset, const TrainConfig& config,
                             Scope scope, std::size_t hidden) {
  CheckDataset(dataset, scope);
  std::vector<GraphInstance> prepared;
  prepared.reserve(dataset.size());
  for (const auto& row : dataset) {
    prepared.push_back(scope == Scope::kEdge ? LineGraph(row.instance) : row.instance);
  }
  MlpTrainResult result;
  result.model = MlpProxy(scope, prepared.front().attr_dim(), hidden, config.seed);
  MlpProxy& model = result.model;
  std::tie(model.attr_shift(), model.attr_scale()) = AttrMoments(prepared);
  const auto [mean, sd] = LabelMoments(dataset);
  model.out_scale = sd;
  model.out_offset = mean;

  Rng rng = Rng(config.seed).Split("mlp-train");
  std::vector<std::size_t> order(dataset.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Adam adam(model.weights().size(), config.step_size);
  std::vector<double> grad(model.weights().size());
  std::size_t step = 0;
  const std::size_t batches = (order.size() + config.batch - 1) / config.batch;
  const double total_steps = static_cast<double>(config.steps * batches);
  for (std::size_t epoch = 0; epoch < config.steps; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.Below(i)]);
    double epoch_mse = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch) {
      const std::size_t end = std::min(order.size(), start + config.batch);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t bi = start; bi < end; ++bi) {
        const std::size_t idx = order[bi];
        const auto x = AsDoubles(dataset[idx].label.assignment);
        const double y = model.Eval(prepared[idx], x, {}, {});
        const double r = (y - dataset[idx].label.cost) / sd;
        epoch_mse += (r * sd) * (r * sd);
        const LossTerm lt = Loss(config.loss, config.huber_delta, r);
        const double coef = lt.derivative / sd / static_cast<double>(end - start);
        model.Eval(prepared[idx], x, {}, grad, coef);
      }
      adam.lr = config.step_size * StepScale(config, static_cast<double>(step++), total_steps);
      adam.Step(model.weights(), grad);
      for (double w : model.weights()) {
        if (!std::isfinite(w)) throw DivergenceError("MLP training diverged", epoch);
      }
    }
    result.mse_curve.push_back(epoch_mse / static_cast<double>(dataset.size()));
  }
  return result;
}

RelaxedFunction MlpRelaxation(const MlpProxy& model, const GraphInstance& instance) {
  auto shared = std::make_shared<const MlpProxy>(model);
  auto prepared = std::make_shared<const GraphInstance>(model.Prepare(instance));
  return RelaxedFunction(
      static_cast<std::size_t>(prepared->node_count()), Structure::kUnconstrained,
      [shared, prepared](std::span<const double> x) { return shared->Eval(*prepared, x, {}, {}); },
      [shared, prepared](std::span<const double> x, std::span<double> grad) {
        return shared->Eval(*prepared, x, grad, {});
      },
      "proxy_mlp");
}

}  // namespace relaxround
