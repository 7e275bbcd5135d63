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

#include "mflow/geometry.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace mflow {

namespace {

// Below this value of rho / (mu nu) = sin^2 of the angle between w - b and
// b - c, anti-parallel normals are treated as parallel.
constexpr double kAntiParallel = 1e-12;

}  // namespace

double HalfSpace::violation(const Vector& h) const {
  return inner(h, normal) - offset;
}

HalfSpace halfspace_of(const Vector& z1, const Vector& z2) {
  require_same_dim(z1, z2, "halfspace_of");
  Vector a = z1 - z2;
  const double beta = a.dot(z2);
  if (a.squaredNorm() == 0.0) return HalfSpace{Vector::Zero(z1.size()), 0.0};
  return HalfSpace{std::move(a), beta};
}

Vector project_halfspace(const HalfSpace& h, const Vector& w) {
  require_same_dim(h.normal, w, "project_halfspace");
  if (h.is_empty()) throw Error(Errc::kEmptyIntersection, "project_halfspace: empty halfspace");
  if (h.degenerate()) return w;
  const double excess = h.normal.dot(w) - h.offset;
  if (excess <= 0.0) return w;
  return w - (excess / h.normal.squaredNorm()) * h.normal;
}

Vector project_intersection(std::span<const HalfSpace> sets, const Vector& w, double tol) {
  if (sets.size() > 2) {
    throw Error(Errc::kInvalidArgument, "project_intersection: at most two halfspaces supported");
  }
  for (const auto& h : sets) {
    require_same_dim(h.normal, w, "project_intersection");
    if (h.is_empty()) throw Error(Errc::kEmptyIntersection, "project_intersection: empty halfspace");
  }
  auto feasible = [&](const Vector& y) {
    for (const auto& h : sets) {
      if (!h.contains(y, tol)) return false;
    }
    return true;
  };
  if (feasible(w)) return w;
  for (const auto& h : sets) {
    Vector y = project_halfspace(h, w);
    if (feasible(y)) return y;
  }
  // Both constraints active: solve the 2x2 Gram system for the multipliers.
  const auto& a1 = sets[0].normal;
  const auto& a2 = sets[1].normal;
  const double g11 = a1.squaredNorm(), g12 = a1.dot(a2), g22 = a2.squaredNorm();
  const double det = g11 * g22 - g12 * g12;
  if (det <= kAntiParallel * g11 * g22) {
    throw Error(Errc::kEmptyIntersection, "project_intersection: parallel halfspaces do not meet");
  }
  const double r1 = a1.dot(w) - sets[0].offset;
  const double r2 = a2.dot(w) - sets[1].offset;
  const double l1 = (g22 * r1 - g12 * r2) / det;
  const double l2 = (g11 * r2 - g12 * r1) / det;
  Vector y = w - l1 * a1 - l2 * a2;
  if (!feasible(y)) throw Error(Errc::kEmptyIntersection, "project_intersection: empty intersection");
  return y;
}

QResult haugazeau_q(const Vector& w, const Vector& b, const Vector& c) {
  require_same_dim(w, b, "haugazeau_q");
  require_same_dim(b, c, "haugazeau_q");
  const Vector wb = w - b;
  const Vector bc = b - c;
  const double mu = wb.squaredNorm();
  const double nu = bc.squaredNorm();
  // w == b: H(w, b) is everything and projecting b onto H(b, c) lands on c.
  // b == c: H(b, c) is everything and the projection of w onto H(w, b) is b.
  if (mu == 0.0 || nu == 0.0) return {c, QCase::kCollinear};

  const double pi = wb.dot(bc);
  // mu nu - pi^2 cancels badly for nearly parallel inputs; mu times the
  // squared length of the part of bc orthogonal to wb is the same quantity.
  const double rho = mu * (bc - (pi / mu) * wb).squaredNorm();
  if (rho == 0.0 && pi >= 0.0) return {c, QCase::kCollinear};
  if (pi < 0.0 && rho <= kAntiParallel * mu * nu) {
    throw Error(Errc::kEmptyIntersection,
                "haugazeau_q: empty intersection (halfspaces with opposite normals do not meet)");
  }
  if (pi * nu >= rho) {
    return {w + (1.0 + pi / nu) * (c - b), QCase::kSecondOnly};
  }
  return {b + (nu / rho) * (pi * wb + mu * (c - b)), QCase::kBothActive};
}

void Cap::validate() const {
  require_same_dim(w_bar, z_bar, "cap");
  require_finite(w_bar, "cap.w_bar");
  require_finite(z_bar, "cap.z_bar");
  const double diameter_sq = squared_distance(w_bar, z_bar);
  if (!(r > 0.0) || !(r < diameter_sq)) {
    throw Error(Errc::kInvalidArgument,
                fmt::format("cap: need 0 < r < ||w - z||^2 = {}, got r = {}", diameter_sq, r));
  }
  if (box_lower.has_value() != box_upper.has_value()) {
    throw Error(Errc::kInvalidArgument, "cap: box needs both bounds");
  }
  if (box_lower) {
    require_same_dim(w_bar, *box_lower, "cap.box_lower");
    require_same_dim(w_bar, *box_upper, "cap.box_upper");
    if ((box_lower->array() > box_upper->array()).any()) {
      throw Error(Errc::kInvalidArgument, "cap: box lower bound exceeds upper bound");
    }
  }
}

double Cap::d_violation(const Vector& x) const {
  double v = inner(z_bar - x, w_bar - x);
  if (box_lower) {
    v = std::max(v, (*box_lower - x).maxCoeff());
    v = std::max(v, (x - *box_upper).maxCoeff());
  }
  return v;
}

double Cap::floor_violation(const Vector& x) const { return r - squared_distance(x, w_bar); }

Cap make_cap(Vector w_bar, Vector z_bar, double r_fraction) {
  if (!(r_fraction > 0.0 && r_fraction < 1.0)) {
    throw Error(Errc::kInvalidArgument, "cap: radius-floor fraction must lie in (0, 1)");
  }
  Cap cap;
  cap.r = r_fraction * squared_distance(w_bar, z_bar);
  cap.w_bar = std::move(w_bar);
  cap.z_bar = std::move(z_bar);
  cap.validate();
  return cap;
}

CapRegion cap_membership(const Cap& cap, const Vector& x, double tol) {
  if (cap.d_violation(x) > tol) return CapRegion::kOutside;
  if (cap.floor_violation(x) > tol) return CapRegion::kInsideDOnly;
  return CapRegion::kInsideDhat;
}

double fejer_slack(const Cap& cap, const Vector& x) {
  return squared_distance(cap.w_bar, cap.z_bar) - squared_distance(cap.w_bar, x) -
         squared_distance(x, cap.z_bar);
}

}  // namespace mflow
