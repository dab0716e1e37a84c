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

#include "relaxround/relaxed.hpp"

#include <stdexcept>
#include <utility>

namespace relaxround {

const char* StructureName(Structure s) {
  switch (s) {
    case Structure::kAffine:
      return "affine";
    case Structure::kConcave:
      return "concave";
    case Structure::kUnconstrained:
      return "unconstrained";
  }
  return "unconstrained";
}

Structure JoinStructure(Structure a, Structure b) {
  if (a == Structure::kUnconstrained || b == Structure::kUnconstrained) {
    return Structure::kUnconstrained;
  }
  if (a == Structure::kAffine && b == Structure::kAffine) return Structure::kAffine;
  return Structure::kConcave;
}

RelaxedFunction::RelaxedFunction(std::size_t arity, Structure structure, ValueFn value,
                                 GradFn gradient, std::string name)
    : arity_(arity),
      structure_(structure),
      value_(std::move(value)),
      gradient_(std::move(gradient)),
      name_(std::move(name)) {
  if (!value_) throw std::invalid_argument("relaxed function needs a value callable");
}

double RelaxedFunction::operator()(std::span<const double> x) const {
  if (x.size() != arity_) {
    throw std::invalid_argument("relaxed function '" + name_ + "' has arity " +
                                std::to_string(arity_) + ", got " + std::to_string(x.size()));
  }
  return value_(x);
}

double RelaxedFunction::ValueAndGradient(std::span<const double> x, std::span<double> grad) const {
  if (x.size() != arity_ || grad.size() != arity_) {
    throw std::invalid_argument("relaxed function '" + name_ + "': arity mismatch in gradient");
  }
  if (gradient_) return gradient_(x, grad);
  constexpr double h = 1e-6;
  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t i = 0; i < arity_; ++i) {
    const double xi = probe[i];
    probe[i] = xi + h;
    const double up = value_(probe);
    probe[i] = xi - h;
    const double down = value_(probe);
    probe[i] = xi;
    grad[i] = (up - down) / (2.0 * h);
  }
  return value_(x);
}

RelaxedFunction RelaxedFunction::WithStructure(Structure s) const {
  RelaxedFunction copy = *this;
  copy.structure_ = s;
  return copy;
}

RelaxedFunction RelaxedFunction::WithName(std::string name) const {
  RelaxedFunction copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

RelaxedFunction ConstantFunction(std::size_t arity, double c) {
  return RelaxedFunction(
      arity, Structure::kAffine, [c](std::span<const double>) { return c; },
      [c](std::span<const double>, std::span<double> g) {
        for (double& gi : g) gi = 0.0;
        return c;
      },
      "constant");
}

RelaxedFunction SumOf(std::size_t arity, std::vector<RelaxedFunction> terms) {
  if (terms.empty()) return ConstantFunction(arity, 0.0);
  if (terms.size() == 1) return terms.front();
  Structure s = Structure::kAffine;
  std::string name;
  for (const auto& t : terms) {
    if (t.arity() != arity) {
      throw std::invalid_argument("cannot sum '" + t.name() + "' of arity " +
                                  std::to_string(t.arity()) + " into arity " +
                                  std::to_string(arity));
    }
    s = JoinStructure(s, t.structure());
    name += (name.empty() ? "" : "+") + t.name();
  }
  auto shared = std::make_shared<const std::vector<RelaxedFunction>>(std::move(terms));
  return RelaxedFunction(
      arity, s,
      [shared](std::span<const double> x) {
        double total = 0.0;
        for (const auto& t : *shared) total += t(x);
        return total;
      },
      [shared](std::span<const double> x, std::span<double> g) {
        std::vector<double> part(g.size());
        for (double& gi : g) gi = 0.0;
        double total = 0.0;
        for (const auto& t : *shared) {
          total += t.ValueAndGradient(x, part);
          for (std::size_t i = 0; i < g.size(); ++i) g[i] += part[i];
        }
        return total;
      },
      name);
}

RelaxedFunction AffineTransform(const RelaxedFunction& f, double scale, double offset) {
  Structure s = f.structure();
  if (scale < 0.0 && s == Structure::kConcave) s = Structure::kUnconstrained;
  return RelaxedFunction(
      f.arity(), s, [f, scale, offset](std::span<const double> x) { return scale * f(x) + offset; },
      [f, scale, offset](std::span<const double> x, std::span<double> g) {
        const double v = f.ValueAndGradient(x, g);
        for (double& gi : g) gi *= scale;
        return scale * v + offset;
      },
      f.name());
}

}  // namespace relaxround
