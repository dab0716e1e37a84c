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

#ifndef RELAXROUND_EWCONCAVE_HPP
#define RELAXROUND_EWCONCAVE_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relaxround/graph.hpp"
#include "relaxround/relaxed.hpp"
#include "relaxround/rng.hpp"

namespace relaxround {

// Explicit pseudo-Boolean function h: {0,1}^n -> R. Entry k holds h(X) for
// the X whose j-th variable is bit j of k (x_0 is the least significant bit).
class BooleanTable {
 public:
  static constexpr int kMaxArity = 20;

  BooleanTable() = default;
  BooleanTable(int arity, std::vector<double> values);

  static BooleanTable Random(int arity, Rng& rng, double lo = -1.0, double hi = 1.0);
  // Tabulates h over all 2^n points.
  template <typename Fn>
  static BooleanTable Tabulate(int arity, Fn&& h) {
    CheckArity(arity);
    std::vector<double> v(std::size_t{1} << arity);
    BinaryVector x(static_cast<std::size_t>(arity));
    for (std::size_t k = 0; k < v.size(); ++k) {
      for (int j = 0; j < arity; ++j) x[static_cast<std::size_t>(j)] = (k >> j) & 1U;
      v[k] = h(std::as_const(x));
    }
    return BooleanTable(arity, std::move(v));
  }

  int arity() const { return arity_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t index) const { return values_[index]; }
  double at(const BinaryVector& x) const;

  static std::size_t IndexOf(const BinaryVector& x);
  static void CheckArity(int arity);

 private:
  int arity_ = 0;
  std::vector<double> values_;
};

// Text form: first line n, then 2^n values (one per line) in index order.
BooleanTable ParseBooleanTable(std::istream& in);
std::string FormatBooleanTable(const BooleanTable& table);

// Multilinear extension at x, by collapsing one variable at a time:
// h(x) = (1 - x_j) h(.., 0_j, ..) + x_j h(.., 1_j, ..). O(2^n).
double MultilinearEval(const BooleanTable& table, std::span<const double> x);
// d/dx_j = h(.., 1_j, ..) - h(.., 0_j, ..). O(n 2^n).
double MultilinearValueAndGradient(const BooleanTable& table, std::span<const double> x,
                                   std::span<double> grad);
RelaxedFunction MultilinearExtension(BooleanTable table);

// ---------------------------------------------------------------------------
// Sampling-based structure checks

struct ConcavityWitness {
  std::vector<double> x;        // x[i <- a]
  std::vector<double> x_prime;  // x[i <- b]
  std::size_t coordinate = 0;
  double gamma = 0.0;
  double gap = 0.0;  // violation size, > tolerance
};

struct ConcavityReport {
  bool passed = true;
  std::optional<ConcavityWitness> witness;
  std::size_t trials_run = 0;
};

// Probabilistic certificate: looks for i, a, b, gamma with
//   gamma f(x[i<-a]) + (1-gamma) f(x[i<-b]) > f(x[i<-gamma a + (1-gamma) b]) + tol'
// where tol' = tol * max(1, |values involved|). A pass is not a proof.
ConcavityReport CheckEntrywiseConcave(const RelaxedFunction& f, std::size_t n, std::size_t trials,
                                      double tol, std::uint64_t seed);
// Same sampling, two-sided: fails on |lhs - rhs| > tol'.
ConcavityReport CheckEntrywiseAffine(const RelaxedFunction& f, std::size_t n, std::size_t trials,
                                     double tol, std::uint64_t seed);

inline constexpr double kDefaultStructureTol = 1e-8;

// ---------------------------------------------------------------------------
// Two-variable rectifier construction
//
// Any h: {0,1}^2 -> R equals  w00 - sum_{i=1..3} ReLU(w_i1 x1 + w_i2 x2 + w_i0)
// at the four vertices. The construction anchors at the vertex holding the
// maximum. When that is not (0,0) the variables are flipped (x -> 1 - x)
// first; both the recipe forms (flipped coordinates) and the same forms
// rewritten in the original coordinates are kept.

struct AffineForm2 {
  double w1 = 0.0;
  double w2 = 0.0;
  double w0 = 0.0;
  double operator()(double x1, double x2) const { return w1 * x1 + w2 * x2 + w0; }
};

struct RectifierParams {
  double w00 = 0.0;
  bool flip_x1 = false;
  bool flip_x2 = false;
  std::array<AffineForm2, 3> recipe_forms;  // in flipped coordinates
  std::array<AffineForm2, 3> forms;         // in original coordinates

  double Eval(double x1, double x2) const;
};

// Table arity must be 2; x1 is bit 0 and x2 is bit 1 of the index.
RectifierParams ConstructRectifier(const BooleanTable& table);
RelaxedFunction RectifierFunction(const RectifierParams& params);

}  // namespace relaxround

#endif  // RELAXROUND_EWCONCAVE_HPP
