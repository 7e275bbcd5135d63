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

#include "mflow/field.hpp"

#include <fmt/format.h>

#include <cmath>

namespace mflow {

VectorField VectorField::from_function(Eigen::Index dim, Map f) {
  VectorField field;
  field.dim_ = dim;
  field.f_ = std::move(f);
  return field;
}

VectorField VectorField::from_target(Eigen::Index dim, Map target) {
  VectorField field;
  field.dim_ = dim;
  field.target_ = std::move(target);
  return field;
}

Vector VectorField::operator()(const Vector& x) const {
  if (x.size() != dim_) {
    throw Error(Errc::kDimensionMismatch,
                fmt::format("vector field: got dimension {}, expected {}", x.size(), dim_));
  }
  Vector out = target_ ? Vector(target_(x) - x) : f_(x);
  require_finite(out, "vector field value");
  return out;
}

Vector VectorField::target(const Vector& x) const {
  if (!target_) throw Error(Errc::kUnavailable, "vector field has no projection form");
  if (x.size() != dim_) {
    throw Error(Errc::kDimensionMismatch,
                fmt::format("vector field: got dimension {}, expected {}", x.size(), dim_));
  }
  Vector out = target_(x);
  require_finite(out, "vector field target");
  return out;
}

VectorField::Evaluation VectorField::evaluate(const Vector& x) const {
  if (!target_) return {(*this)(x), std::nullopt};
  Vector p = target(x);
  Vector f = p - x;
  return {std::move(f), std::move(p)};
}

Vector VectorField::advance(const Vector& x, const Evaluation& e, double lambda) {
  if (!e.target) return axpy(lambda, e.value, x);
  const Vector& p = *e.target;
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = std::lerp(x[i], p[i], lambda);
  return out;
}

}  // namespace mflow
