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

#include <optional>
#include <span>

#include "mflow/space.hpp"

namespace mflow {

inline constexpr double kDefaultTolerance = 1e-10;

/// {h | <h, normal> <= offset}. A zero normal denotes the whole space when
/// offset >= 0 and the empty set otherwise.
struct HalfSpace {
  Vector normal;
  double offset = 0.0;

  bool degenerate() const { return normal.squaredNorm() == 0.0; }
  bool is_whole_space() const { return degenerate() && offset >= 0.0; }
  bool is_empty() const { return degenerate() && offset < 0.0; }

  /// <h, normal> - offset; positive means outside.
  double violation(const Vector& h) const;
  bool contains(const Vector& h, double tol = kDefaultTolerance) const {
    return violation(h) <= tol;
  }
};

/// H(z1, z2) = {h | <h - z2, z1 - z2> <= 0}; the whole space when z1 == z2.
HalfSpace halfspace_of(const Vector& z1, const Vector& z2);

/// Metric projection onto a nonempty halfspace.
Vector project_halfspace(const HalfSpace& h, const Vector& w);

/// Metric projection onto the intersection of at most two halfspaces,
/// by enumeration of the active constraints. Throws kEmptyIntersection.
Vector project_intersection(std::span<const HalfSpace> sets, const Vector& w,
                            double tol = kDefaultTolerance);

/// Which branch of the closed form produced Q(w, b, c).
enum class QCase {
  kCollinear = 1,  // rho = 0, pi >= 0: the answer is c
  kSecondOnly = 2,  // only H(b, c) is active
  kBothActive = 3,  // both halfspaces active
};

struct QResult {
  Vector point;
  QCase which;
};

/// Projection of w onto H(w, b) n H(b, c), via the four-case formula in
///   pi = <w - b, b - c>, mu = ||w - b||^2, nu = ||b - c||^2, rho = mu nu - pi^2.
/// Throws Error(kEmptyIntersection) when the two halfspaces are disjoint.
QResult haugazeau_q(const Vector& w, const Vector& b, const Vector& c);
inline Vector haugazeau_point(const Vector& w, const Vector& b, const Vector& c) {
  return haugazeau_q(w, b, c).point;
}

/// The admissible region
///   D    = closed ball centered at (w + z)/2 with radius ||w - z||/2,
///          optionally intersected with an axis-aligned box,
///   Dhat = {x in D | ||x - w||^2 >= r}.
/// D is exactly the set where <z - x, w - x> <= 0.
struct Cap {
  Vector w_bar;
  Vector z_bar;
  double r = 0.0;
  std::optional<Vector> box_lower;
  std::optional<Vector> box_upper;

  /// Checks 0 < r < ||w - z||^2 and dimension consistency.
  void validate() const;

  Eigen::Index dim() const { return w_bar.size(); }
  Vector ball_center() const { return 0.5 * (w_bar + z_bar); }
  double ball_radius() const { return 0.5 * norm(w_bar - z_bar); }

  /// max(<z - x, w - x>, box excess); <= 0 inside D.
  double d_violation(const Vector& x) const;
  /// r - ||x - w||^2; <= 0 when the floor test holds.
  double floor_violation(const Vector& x) const;
};

/// Circle-shaped D for the given endpoints with r = fraction * ||w - z||^2.
Cap make_cap(Vector w_bar, Vector z_bar, double r_fraction = 0.1);

enum class CapRegion { kInsideDhat, kInsideDOnly, kOutside };

CapRegion cap_membership(const Cap& cap, const Vector& x, double tol = kDefaultTolerance);

/// ||w - z||^2 - ||w - x||^2 - ||x - z||^2, nonnegative on D.
double fejer_slack(const Cap& cap, const Vector& x);

}  // namespace mflow
