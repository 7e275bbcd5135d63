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

// Shared helpers for the test binaries: seeded generators and an
// independent brute-force projection oracle.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "mflow/space.hpp"

namespace mflow::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>()(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Vector vector(Eigen::Index dim, double scale = 1.0) {
    Vector v(dim);
    for (auto& c : v) c = scale * normal();
    return v;
  }
  Matrix matrix(Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scale * normal();
    }
    return m;
  }

 private:
  std::mt19937_64 rng_;
};

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline double max_abs_diff(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Projection of w onto {h | <h, a_k> <= beta_k} for at most two constraints by
// enumerating active sets and keeping the closest feasible KKT point. Returns
// nullopt when no candidate is feasible.
struct Constraint {
  Vector a;
  double beta;
};

inline std::optional<Vector> brute_force_projection(const std::vector<Constraint>& cs, const Vector& w,
                                                    double feas_tol = 1e-9) {
  const auto m = cs.size();
  std::optional<Vector> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    std::vector<std::size_t> act;
    for (std::size_t k = 0; k < m; ++k) {
      if (mask & (1u << k)) act.push_back(k);
    }
    Vector x = w;
    if (!act.empty()) {
      const auto k = static_cast<Eigen::Index>(act.size());
      Matrix g(k, k);
      Vector rhs(k);
      bool usable = true;
      for (Eigen::Index i = 0; i < k; ++i) {
        const auto& ci = cs[act[static_cast<std::size_t>(i)]];
        if (ci.a.squaredNorm() == 0.0) usable = false;
        rhs[i] = ci.a.dot(w) - ci.beta;
        for (Eigen::Index j = 0; j < k; ++j) g(i, j) = ci.a.dot(cs[act[static_cast<std::size_t>(j)]].a);
      }
      if (!usable) continue;
      Eigen::FullPivLU<Matrix> lu(g);
      if (lu.rank() < k) continue;
      const Vector mult = lu.solve(rhs);
      if ((mult.array() < -1e-12).any()) continue;  // KKT sign condition
      for (Eigen::Index i = 0; i < k; ++i) x -= mult[i] * cs[act[static_cast<std::size_t>(i)]].a;
    }
    bool feasible = true;
    for (const auto& c : cs) {
      const double scale = std::max(1.0, c.a.norm() * (1.0 + x.norm()));
      if (c.a.dot(x) - c.beta > feas_tol * scale) feasible = false;
    }
    if (!feasible) continue;
    const double d = (x - w).norm();
    if (d < best_dist) {
      best_dist = d;
      best = x;
    }
  }
  return best;
}

// H(z1, z2) = {h | <h - z2, z1 - z2> <= 0}.
inline Constraint halfspace_constraint(const Vector& z1, const Vector& z2) {
  const Vector a = z1 - z2;
  return {a, a.dot(z2)};
}

}  // namespace mflow::testing
