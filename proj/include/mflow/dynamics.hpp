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

// Explicit Euler trajectories of x' = F(x), the discrete best-approximation
// iteration x_{n+1} = Q(w, x_n, T x_n), and the solve loop driving both.

#include <cstddef>
#include <iosfwd>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "mflow/field.hpp"
#include "mflow/splitting.hpp"

namespace mflow {

/// Nodes c_0, ..., c_N of c_{n+1} = c_n + lambda F(c_n) and the slopes F(c_n)
/// that define the piecewise-affine trajectory c_lambda(t) on [t0, t0 + N lambda].
struct EulerPath {
  double t0 = 0.0;
  double lambda = 1.0;
  std::vector<Vector> nodes;
  std::vector<Vector> slopes;  // slopes[n] = F(nodes[n]), n < N
  std::size_t domain_warnings = 0;  // nodes found outside the field's domain

  std::size_t steps() const { return nodes.empty() ? 0 : nodes.size() - 1; }
  double t_end() const { return t0 + static_cast<double>(steps()) * lambda; }
};

EulerPath euler_nodes(const VectorField& f, const Vector& x0, double lambda, std::size_t steps,
                      double t0 = 0.0, double tol = kDefaultTolerance);

/// c_lambda(t) = c_n + (t - t0 - n lambda) F(c_n) on the n-th segment; returns
/// the stored node exactly at knots.
Vector euler_eval(const EulerPath& path, double t);

/// F(c_n) - F(c_lambda(t)) inside the n-th segment, zero at knots.
Vector euler_defect(const VectorField& f, const EulerPath& path, double t);

/// sup over nodes and `per_segment` interior points of ||c_lambda(t) - ref(t)||.
double sup_error(const EulerPath& path, const std::function<Vector(double)>& reference,
                 int per_segment = 8);

/// Q(w, x_n, T x_n).
PDPoint best_approx_iterate(const ProblemInstance& inst, const PDPoint& x,
                            double tol = kDefaultTolerance);

/// Everything the solve loop needs to know about one system x' = F(x).
struct DynamicSystem {
  std::string name;
  VectorField field;
  Vector x0;
  Vector w_bar;
  std::optional<Vector> z_bar;
  /// Fixed-point residual recorded per iterate; ||F(x)|| when empty.
  std::function<double(const Vector&)> residual;
  /// The discrete iteration; empty when only the flow is defined.
  PointMap discrete_map;
  /// Closed-form solution x(t), when known.
  std::function<Vector(double)> reference;
  Eigen::Index primal_dim = 0;
};

DynamicSystem system_for(const ProblemInstance& inst, std::optional<PDPoint> oracle,
                         double tol = kDefaultTolerance);

enum class SolveMode { kDiscrete, kEuler };

struct StopCriteria {
  std::size_t max_iter = 100000;
  double tol_residual = 1e-9;
  double tol_step = 1e-12;

  void validate() const;
};

enum class Termination { kResidual, kStep, kFieldZero, kMaxIter, kHorizon, kBreakdown };

const char* to_string(Termination t);
inline bool converged(Termination t) {
  return t == Termination::kResidual || t == Termination::kStep || t == Termination::kFieldZero ||
         t == Termination::kHorizon;
}

struct TrajectoryRecord {
  double index = 0.0;  // n for the discrete scheme, t for Euler
  Vector x;
  double norm_to_w = 0.0;
  double fejer_slack = 0.0;  // NaN without an oracle
  double residual = 0.0;
  double step_norm = 0.0;
};

struct Trajectory {
  std::string system;
  SolveMode mode = SolveMode::kDiscrete;
  double lambda = 1.0;
  std::vector<TrajectoryRecord> records;
  Termination termination = Termination::kMaxIter;
  std::string message;
  std::optional<Vector> z_bar;
  std::optional<double> reference_sup_error;

  std::size_t iterations() const { return records.empty() ? 0 : records.size() - 1; }
  const Vector& final_point() const { return records.back().x; }

  /// Header n_or_t,x_0..x_{k-1},norm_to_w,fejer_slack,residual,step_norm;
  /// numbers printed with 17 significant digits.
  void write_csv(std::ostream& os) const;
  nlohmann::json summary() const;
};

/// Runs the discrete scheme or Euler(lambda) from system.x0 until one of the
/// stop criteria fires. Breakdowns (empty Q intersection, non-finite values)
/// end the run with Termination::kBreakdown instead of throwing.
Trajectory solve(const DynamicSystem& system, SolveMode mode, double lambda,
                 const StopCriteria& stop, double tol = kDefaultTolerance);

/// Euler over the fixed horizon [0, t_end] with round(t_end / lambda) steps;
/// records the sup-error against the closed form when one is known.
Trajectory integrate_horizon(const DynamicSystem& system, double lambda, double t_end,
                             double tol = kDefaultTolerance);

}  // namespace mflow
