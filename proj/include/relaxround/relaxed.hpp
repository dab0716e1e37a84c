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

#ifndef RELAXROUND_RELAXED_HPP
#define RELAXROUND_RELAXED_HPP

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace relaxround {

// Declared shape of a relaxation along each coordinate. kAffine is a special
// case of kConcave. The declaration is a claim; ewconcave.hpp has the checkers.
enum class Structure { kAffine, kConcave, kUnconstrained };

const char* StructureName(Structure s);

// Structure of a sum of two relaxations.
Structure JoinStructure(Structure a, Structure b);

// A differentiable map [0,1]^n -> R. Cheap to copy (shared callables).
class RelaxedFunction {
 public:
  using ValueFn = std::function<double(std::span<const double>)>;
  // Writes the gradient into the second argument and returns the value.
  using GradFn = std::function<double(std::span<const double>, std::span<double>)>;

  RelaxedFunction() = default;
  RelaxedFunction(std::size_t arity, Structure structure, ValueFn value, GradFn gradient = {},
                  std::string name = {});

  std::size_t arity() const { return arity_; }
  Structure structure() const { return structure_; }
  const std::string& name() const { return name_; }
  bool has_analytic_gradient() const { return static_cast<bool>(gradient_); }
  explicit operator bool() const { return static_cast<bool>(value_); }

  double operator()(std::span<const double> x) const;
  double operator()(const std::vector<double>& x) const {
    return (*this)(std::span<const double>(x));
  }

  // Falls back to central differences (h = 1e-6) when no analytic gradient
  // was supplied.
  double ValueAndGradient(std::span<const double> x, std::span<double> grad) const;

  RelaxedFunction WithStructure(Structure s) const;
  RelaxedFunction WithName(std::string name) const;

 private:
  std::size_t arity_ = 0;
  Structure structure_ = Structure::kUnconstrained;
  ValueFn value_;
  GradFn gradient_;
  std::string name_;
};

RelaxedFunction ConstantFunction(std::size_t arity, double c);

// Sum of terms with a shared arity. Empty list -> zero function of `arity`.
RelaxedFunction SumOf(std::size_t arity, std::vector<RelaxedFunction> terms);

// x -> scale * f(x) + offset. Negative scale demotes concave to unconstrained.
RelaxedFunction AffineTransform(const RelaxedFunction& f, double scale, double offset);

}  // namespace relaxround

#endif  // RELAXROUND_RELAXED_HPP
