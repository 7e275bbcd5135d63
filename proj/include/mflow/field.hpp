// Copyright 2026 The mflow Authors
//
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

#pragma once

#include <functional>
#include <limits>
#include <optional>

#include "mflow/geometry.hpp"

namespace mflow {

/// An autonomous vector field F on R^k. Fields of projection type carry the
/// map x -> P(x) with F(x) = P(x) - x, so an explicit Euler step can be taken
/// as the interpolation between x and P(x).
class VectorField {
 public:
  using Map = std::function<Vector(const Vector&)>;

  static VectorField from_function(Eigen::Index dim, Map f);
  static VectorField from_target(Eigen::Index dim, Map target);

  Eigen::Index dim() const { return dim_; }
  bool has_target() const { return static_cast<bool>(target_); }

  Vector operator()(const Vector& x) const;

  /// P(x); only for projection-type fields.
  Vector target(const Vector& x) const;

  struct Evaluation {
    Vector value;                  // F(x)
    std::optional<Vector> target;  // P(x) for projection-type fields
  };
  Evaluation evaluate(const Vector& x) const;

  /// x + lambda F(x). For projection-type fields each coordinate is
  /// std::lerp(x_i, P(x)_i, lambda), which equals P(x)_i at lambda = 1.
  Vector step(const Vector& x, double lambda) const { return advance(x, evaluate(x), lambda); }
  static Vector advance(const Vector& x, const Evaluation& e, double lambda);

  const std::optional<Cap>& domain() const { return domain_; }
  VectorField& with_domain(Cap cap) {
    domain_ = std::move(cap);
    return *this;
  }

  /// Known bound M on ||F|| over the domain, NaN when unknown.
  double bound() const { return bound_; }
  VectorField& with_bound(double m) {
    bound_ = m;
    return *this;
  }

 private:
  Eigen::Index dim_ = 0;
  Map f_;
  Map target_;
  std::optional<Cap> domain_;
  double bound_ = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace mflow
