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

#include "relaxround/ewconcave.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace relaxround {

BooleanTable::BooleanTable(int arity, std::vector<double> values)
    : arity_(arity), values_(std::move(values)) {
  CheckArity(arity);
  if (values_.size() != (std::size_t{1} << arity)) {
    throw std::invalid_argument("table of arity " + std::to_string(arity) + " needs " +
                                std::to_string(std::size_t{1} << arity) + " values, got " +
                                std::to_string(values_.size()));
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      throw std::invalid_argument("table value " + std::to_string(k) + " is not finite");
    }
  }
}

void BooleanTable::CheckArity(int arity) {
  if (arity < 0 || arity > kMaxArity) {
    throw std::invalid_argument("table arity " + std::to_string(arity) + " outside [0, " +
                                std::to_string(kMaxArity) + "]");
  }
}

BooleanTable BooleanTable::Random(int arity, Rng& rng, double lo, double hi) {
  CheckArity(arity);
  std::vector<double> v(std::size_t{1} << arity);
  for (double& x : v) x = rng.Uniform(lo, hi);
  return BooleanTable(arity, std::move(v));
}

std::size_t BooleanTable::IndexOf(const BinaryVector& x) {
  std::size_t k = 0;
  for (std::size_t j = 0; j < x.size(); ++j) k |= std::size_t{x[j] != 0} << j;
  return k;
}

double BooleanTable::at(const BinaryVector& x) const {
  if (x.size() != static_cast<std::size_t>(arity_)) {
    throw std::invalid_argument("binary point has wrong length for table");
  }
  return values_[IndexOf(x)];
}

BooleanTable ParseBooleanTable(std::istream& in) {
  int n = -1;
  if (!(in >> n)) throw std::invalid_argument("table text must start with the arity");
  BooleanTable::CheckArity(n);
  std::vector<double> v(std::size_t{1} << n);
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!(in >> v[k])) {
      throw std::invalid_argument("table text ended after " + std::to_string(k) + " of " +
                                  std::to_string(v.size()) + " values");
    }
  }
  return BooleanTable(n, std::move(v));
}

std::string FormatBooleanTable(const BooleanTable& table) {
  std::ostringstream out;
  out << table.arity() << "\n";
  for (double v : table.values()) out << FormatDouble(v) << "\n";
  return out.str();
}

double MultilinearEval(const BooleanTable& table, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(table.arity())) {
    throw std::invalid_argument("multilinear evaluation: point has length " +
                                std::to_string(x.size()) + ", table arity is " +
                                std::to_string(table.arity()));
  }
  std::vector<double> work = table.values();
  // Collapse the highest variable first: entries k and k + half differ only in it.
  for (int j = table.arity() - 1; j >= 0; --j) {
    const std::size_t half = std::size_t{1} << j;
    const double t = x[static_cast<std::size_t>(j)];
    for (std::size_t k = 0; k < half; ++k) {
      work[k] = (1.0 - t) * work[k] + t * work[k + half];
    }
  }
  return work[0];
}

double MultilinearValueAndGradient(const BooleanTable& table, std::span<const double> x,
                                   std::span<double> grad) {
  const auto n = static_cast<std::size_t>(table.arity());
  if (grad.size() != n) throw std::invalid_argument("gradient buffer has wrong length");
  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t j = 0; j < n; ++j) {
    const double xj = probe[j];
    probe[j] = 1.0;
    const double hi = MultilinearEval(table, probe);
    probe[j] = 0.0;
    const double lo = MultilinearEval(table, probe);
    probe[j] = xj;
    grad[j] = hi - lo;
  }
  return MultilinearEval(table, x);
}

RelaxedFunction MultilinearExtension(BooleanTable table) {
  auto shared = std::make_shared<const BooleanTable>(std::move(table));
  const auto n = static_cast<std::size_t>(shared->arity());
  return RelaxedFunction(
      n, Structure::kAffine,
      [shared](std::span<const double> x) { return MultilinearEval(*shared, x); },
      [shared](std::span<const double> x, std::span<double> g) {
        return MultilinearValueAndGradient(*shared, x, g);
      },
      "multilinear");
}

// ---------------------------------------------------------------------------

namespace {

ConcavityReport RunStructureCheck(const RelaxedFunction& f, std::size_t n, std::size_t trials,
                                  double tol, std::uint64_t seed, bool two_sided) {
  if (trials == 0) throw std::invalid_argument("structure check needs trials > 0");
  if (f.arity() != n) throw std::invalid_argument("structure check: arity mismatch");
  ConcavityReport report;
  if (n == 0) {
    report.trials_run = trials;
    return report;
  }
  Rng rng(seed);
  std::vector<double> base(n), xa(n), xb(n), xm(n);
  for (std::size_t t = 0; t < trials; ++t) {
    report.trials_run = t + 1;
    for (double& v : base) v = rng.Uniform();
    const std::size_t i = rng.Below(n);
    double a = rng.Uniform();
    double b = rng.Uniform();
    // A quarter of the trials span the whole coordinate range.
    if (rng.Below(4) == 0) {
      a = 0.0;
      b = 1.0;
    }
    const double gamma = rng.Uniform();
    xa = base;
    xb = base;
    xm = base;
    xa[i] = a;
    xb[i] = b;
    xm[i] = gamma * a + (1.0 - gamma) * b;
    const double fa = f(xa);
    const double fb = f(xb);
    const double fm = f(xm);
    const double lhs = gamma * fa + (1.0 - gamma) * fb;
    const double scale = std::max({1.0, std::abs(fa), std::abs(fb), std::abs(fm)});
    const double gap = two_sided ? std::abs(lhs - fm) : lhs - fm;
    if (!std::isfinite(gap) || gap > tol * scale) {
      report.passed = false;
      report.witness = ConcavityWitness{xa, xb, i, gamma, gap};
      return report;
    }
  }
  return report;
}

}  // namespace

ConcavityReport CheckEntrywiseConcave(const RelaxedFunction& f, std::size_t n, std::size_t trials,
                                      double tol, std::uint64_t seed) {
  return RunStructureCheck(f, n, trials, tol, seed, /*two_sided=*/false);
}

ConcavityReport CheckEntrywiseAffine(const RelaxedFunction& f, std::size_t n, std::size_t trials,
                                     double tol, std::uint64_t seed) {
  return RunStructureCheck(f, n, trials, tol, seed, /*two_sided=*/true);
}

// ---------------------------------------------------------------------------

double RectifierParams::Eval(double x1, double x2) const {
  double v = w00;
  for (const auto& form : forms) v -= std::max(0.0, form(x1, x2));
  return v;
}

RectifierParams ConstructRectifier(const BooleanTable& table) {
  if (table.arity() != 2) {
    throw std::invalid_argument("rectifier construction needs an arity-2 table");
  }
  auto h = [&](int x1, int x2) { return table[static_cast<std::size_t>(x1 | (x2 << 1))]; };

  // Anchor at the maximum, preferring (0,0), then (0,1), (1,0), (1,1).
  constexpr std::array<std::pair<int, int>, 4> kOrder{{{0, 0}, {0, 1}, {1, 0}, {1, 1}}};
  auto anchor = kOrder[0];
  for (const auto& v : kOrder) {
    if (h(v.first, v.second) > h(anchor.first, anchor.second)) anchor = v;
  }
  RectifierParams p;
  p.flip_x1 = anchor.first == 1;
  p.flip_x2 = anchor.second == 1;
  // Values in flipped coordinates y = x xor flip.
  auto hy = [&](int y1, int y2) {
    return h(y1 ^ static_cast<int>(p.flip_x1), y2 ^ static_cast<int>(p.flip_x2));
  };
  const double a0 = hy(0, 0);
  const double a1 = hy(0, 1);
  const double a2 = hy(1, 0);
  const double a3 = hy(1, 1);
  p.w00 = a0;
  p.recipe_forms = {AffineForm2{-(a0 - a1), a0 - a1, 0.0},
                    AffineForm2{a0 - a2, -(a0 - a2), 0.0},
                    AffineForm2{a0 - a3, a0 - a3, -(a0 - a3)}};
  for (std::size_t i = 0; i < 3; ++i) {
    AffineForm2 f = p.recipe_forms[i];
    // y = 1 - x  =>  w * y = -w * x + w.
    if (p.flip_x1) {
      f.w0 += f.w1;
      f.w1 = -f.w1;
    }
    if (p.flip_x2) {
      f.w0 += f.w2;
      f.w2 = -f.w2;
    }
    p.forms[i] = f;
  }
  return p;
}

RelaxedFunction RectifierFunction(const RectifierParams& params) {
  return RelaxedFunction(
      2, Structure::kConcave,
      [params](std::span<const double> x) { return params.Eval(x[0], x[1]); },
      [params](std::span<const double> x, std::span<double> g) {
        g[0] = 0.0;
        g[1] = 0.0;
        for (const auto& f : params.forms) {
          if (f(x[0], x[1]) > 0.0) {
            g[0] -= f.w1;
            g[1] -= f.w2;
          }
        }
        return params.Eval(x[0], x[1]);
      },
      "rectifier");
}

}  // namespace relaxround
