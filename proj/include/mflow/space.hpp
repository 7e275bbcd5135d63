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

// Finite-dimensional real inner-product spaces. The primal space H and the
// dual space G are both R^k; the product H x G carries the sum inner product.

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <string_view>

#include "mflow/error.hpp"

namespace mflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

double inner(const Vector& a, const Vector& b);
double norm(const Vector& a);
double squared_distance(const Vector& a, const Vector& b);

/// alpha * x + y, coordinate by coordinate.
Vector axpy(double alpha, const Vector& x, const Vector& y);

bool all_finite(const Vector& a);

/// Throws Errc::kDimensionMismatch naming `what` when the sizes differ.
void require_same_dim(const Vector& a, const Vector& b, std::string_view what);

/// Throws Errc::kNonFinite when any coordinate is NaN or infinite.
void require_finite(const Vector& a, std::string_view what);

/// A point (p, v*) of the product space H x G.
struct PDPoint {
  Vector p;
  Vector v;

  PDPoint() = default;
  PDPoint(Vector primal, Vector dual) : p(std::move(primal)), v(std::move(dual)) {}

  Eigen::Index primal_dim() const { return p.size(); }
  Eigen::Index dual_dim() const { return v.size(); }

  /// (p, v) stacked into one vector of size n + m.
  Vector flatten() const;
  static PDPoint unflatten(const Vector& x, Eigen::Index primal_dim);
};

double inner(const PDPoint& a, const PDPoint& b);
double norm(const PDPoint& a);

void to_json(nlohmann::json& j, const PDPoint& x);
void from_json(const nlohmann::json& j, PDPoint& x);

/// JSON array of numbers; rejects non-numeric and non-finite entries.
Vector vector_from_json(const nlohmann::json& j, std::string_view what);
nlohmann::json vector_to_json(const Vector& x);

/// Row-major nested array; all rows must have equal length.
Matrix matrix_from_json(const nlohmann::json& j, std::string_view what);

}  // namespace mflow
