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

// The Kuhn-Tucker operator T for the coupled inclusions
//   find p with 0 in A p + L* B L p,  and v* with 0 in -L A^{-1}(-L* v*) + B^{-1} v*,
// whose fixed-point set is the Kuhn-Tucker set
//   Z = {(p, v*) | -L* v* in A p, L p in B^{-1} v*}.

#include <functional>
#include <nlohmann/json_fwd.hpp>

#include "mflow/field.hpp"
#include "mflow/geometry.hpp"
#include "mflow/operators.hpp"

namespace mflow {

struct ProblemInstance {
  MonotoneOpPtr A;  // on H
  MonotoneOpPtr B;  // on G
  LinearMap L;      // H -> G
  double gamma = 0.5;
  double mu = 0.5;
  PDPoint w_bar;
  PDPoint x0;

  Eigen::Index primal_dim() const { return L.cols(); }
  Eigen::Index dual_dim() const { return L.rows(); }
  Eigen::Index dim() const { return primal_dim() + dual_dim(); }

  /// Dimension consistency and gamma, mu in (0, 1).
  void validate() const;
};

/// Reads {"A": op, "B": op, "L": [[...]], "gamma", "mu", "w_bar": point,
/// "x0": point}; x0 defaults to w_bar.
ProblemInstance instance_from_json(const nlohmann::json& j);

/// Intermediate quantities of one evaluation of T.
struct TStepDetail {
  Vector a;       // J_{gA}(p - g L* v)
  Vector b;       // J_{mB}(L p + m v)
  Vector a_star;  // Yosida counterpart of a
  Vector b_star;  // Yosida counterpart of b
  PDPoint s_star;  // (a* + L* b*, b - L a)
  double eta = 0.0;  // <a, a*> + <b, b*>
  PDPoint tx;     // projection of x onto {h | <h, s*> <= eta}
};

/// Evaluates T at x. When ||s*|| <= tol the cutting halfspace degenerates and
/// T x = x.
TStepDetail kt_operator(const ProblemInstance& inst, const PDPoint& x,
                        double tol = kDefaultTolerance);

/// ||T x - x||; zero exactly on Z.
double kt_residual(const ProblemInstance& inst, const PDPoint& x, double tol = kDefaultTolerance);

/// A self-map of R^k.
using PointMap = std::function<Vector(const Vector&)>;

/// T on the flattened product space.
PointMap kt_map(const ProblemInstance& inst, double tol = kDefaultTolerance);

/// x -> Q(w, x, T x) on the flattened product space.
PointMap haugazeau_map(const ProblemInstance& inst, double tol = kDefaultTolerance);

/// F(x) = Q(w, x, T x) - x, in projection form. Evaluation propagates
/// Errc::kEmptyIntersection from Q.
VectorField build_field(const ProblemInstance& inst, double tol = kDefaultTolerance);

// Fixed-point operators covered by the Haugazeau construction. Each is firmly
// quasinonexpansive.

/// Metric projection onto a closed convex set C, supplied as the normal cone
/// of C (its resolvent is the projection for every step).
PointMap ex1_projection(MonotoneOpPtr normal_cone);
/// T = J_{gA}; Fix T = zeros of A.
PointMap ex2_resolvent(MonotoneOpPtr a, double gamma = 1.0);
/// T = (Id + J_{gA}(Id - g B)) / 2 with B single-valued and beta-cocoercive,
/// g in [0, 2 beta]; Fix T = zeros of A + B.
PointMap ex3_forward_backward(MonotoneOpPtr a, MonotoneOpPtr b, double gamma);
/// T = the Kuhn-Tucker operator of the instance.
PointMap ex4_kuhn_tucker(const ProblemInstance& inst, double tol = kDefaultTolerance);

}  // namespace mflow
