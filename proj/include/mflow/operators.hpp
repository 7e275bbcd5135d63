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

// Maximally monotone operators, accessed only through their resolvents
// J_{gA} = (Id + g A)^{-1}, plus bounded linear maps with adjoints.

#include <memory>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>

#include "mflow/space.hpp"

namespace mflow {

class MonotoneOp {
 public:
  virtual ~MonotoneOp() = default;

  virtual Eigen::Index dim() const = 0;
  virtual std::string tag() const = 0;

  /// Unique y with (x - y) / gamma in A(y). Callers go through mflow::resolvent,
  /// which validates gamma and the dimension first.
  virtual Vector apply_resolvent(double gamma, const Vector& x) const = 0;

  /// y in A(x) up to `tol`, when the graph admits an exact test.
  virtual std::optional<bool> member(const Vector& x, const Vector& y, double tol) const;

  /// A(x) for single-valued operators.
  virtual std::optional<Vector> value(const Vector& x) const;

  /// Largest beta with <Ax - Ay, x - y> >= beta ||Ax - Ay||^2; 0 when the
  /// operator is not known to be cocoercive, +inf for the zero operator.
  virtual double cocoercivity() const { return 0.0; }
};

using MonotoneOpPtr = std::shared_ptr<const MonotoneOp>;

Vector resolvent(const MonotoneOp& op, double gamma, const Vector& x);

/// (x - J_{gA} x) / g. The pair (J_{gA} x, yosida(x)) lies in the graph of A.
Vector yosida(const MonotoneOp& op, double gamma, const Vector& x);

// Catalog. Each constructor validates its parameters and throws
// Errc::kInvalidArgument on bad input.

/// Gradient of 1/2 ||. - b||^2, i.e. x -> x - b.
MonotoneOpPtr make_quadratic(Vector b);
/// Subdifferential of weight * ||.||_1.
MonotoneOpPtr make_l1(Eigen::Index dim, double weight = 1.0);
/// Normal cone of the box [lower, upper]; its resolvent is the clamp.
MonotoneOpPtr make_box(Vector lower, Vector upper);
/// Normal cone of the closed Euclidean ball.
MonotoneOpPtr make_ball(Vector center, double radius);
MonotoneOpPtr make_zero(Eigen::Index dim);
/// x -> M x with <Mx, x> >= 0 for all x.
MonotoneOpPtr make_linear_monotone(Matrix m);

/// Builds a catalog operator from {"type": tag, "params": {...}}. Tags are
/// "quadratic", "l1", "box", "ball", "zero", "linear_psd".
MonotoneOpPtr operator_from_json(const nlohmann::json& j);

class LinearMap {
 public:
  LinearMap() = default;
  explicit LinearMap(Matrix m);

  static LinearMap identity(Eigen::Index n) { return LinearMap(Matrix::Identity(n, n)); }

  Eigen::Index rows() const { return m_.rows(); }
  Eigen::Index cols() const { return m_.cols(); }
  const Matrix& matrix() const { return m_; }

  Vector apply(const Vector& x) const;
  Vector adjoint_apply(const Vector& y) const;

 private:
  Matrix m_;
};

}  // namespace mflow
