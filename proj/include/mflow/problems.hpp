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

// Built-in instances with independently computed Kuhn-Tucker points, and two
// raw planar fields used to exercise the assumption checks.

#include <optional>
#include <string>
#include <vector>

#include "mflow/dynamics.hpp"

namespace mflow {

/// A planar field given directly, without the primal-dual construction.
struct RawFixture {
  VectorField field;     // F on its domain
  VectorField extended;  // a continuous extension to the whole plane
  Cap cap;
  Vector x0;
  /// Closed-form solutions of x' = extended(x), x(0) = x0, on [0, 1].
  std::vector<std::function<Vector(double)>> references;
};

struct NamedInstance {
  std::string tag;
  std::optional<ProblemInstance> instance;
  std::optional<RawFixture> fixture;
  std::optional<PDPoint> oracle;  // the Kuhn-Tucker point, when known

  /// Flow for solve/integrate: build_field for instances, the extended field
  /// (with its first reference solution) for fixtures.
  DynamicSystem system(double tol = kDefaultTolerance) const;
};

/// A: p -> p - p0, B: q -> q - q0. The unique Kuhn-Tucker point is
///   p* = (I + L* L)^{-1} (p0 + L* q0),  v* = L p* - q0.
/// w_bar defaults to the origin and x0 to w_bar.
NamedInstance quadratic_instance(const Vector& p0, const Vector& q0, const LinearMap& l,
                                 double gamma = 0.5, double mu = 0.5,
                                 std::optional<PDPoint> w_bar = std::nullopt);

/// minimize 1/2 ||p - b||^2 + reg ||L p||_1. The oracle enumerates the sign
/// patterns of L p* (at most 3 dual dimensions; L must have full row rank).
NamedInstance lasso_instance(const Vector& b, const LinearMap& l, double reg, double gamma = 0.5,
                             double mu = 0.5, std::optional<PDPoint> w_bar = std::nullopt);

/// F(x) = (1 - x1, 0) on the unit disk minus the open unit disk around
/// (-1, 0); w = (-1, 0), z = (1, 0), x0 = (0, -1). Violates the invariance
/// assumption at x0.
NamedInstance paper_example_1();

/// F(x) = (1 - x1, -x2) on [0,1] x [-1,0] minus the open unit disk around
/// (0, -1); w = (0, -1), z = (1, 0), x0 = (0, 0). The extension admits two
/// solutions from x0.
NamedInstance paper_example_2();

/// Tags: quadratic1d, quadratic3x2, lasso1d, lasso2x2, paper_example_1,
/// paper_example_2.
std::vector<std::string> builtin_tags();
NamedInstance builtin_instance(const std::string& tag);

/// Throws when the attached oracle is not a fixed point of T to 1e-9.
void validate_oracle(const NamedInstance& named, double tol = kDefaultTolerance);

}  // namespace mflow
