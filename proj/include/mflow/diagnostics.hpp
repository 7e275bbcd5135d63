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

// Sampled verification of the standing assumptions on a field F over a cap:
//   (A) z is the only zero of F in Dhat,
//   (B) x + h F(x) stays in Dhat for h in [0, 1],
//   (C) <F(x), w - x> <= 0,
// the strict variant (C*) along a trajectory, the conditions (A')-(D') on a
// projection multifunction C, and convergence summaries against an oracle.
// Every check quantifies over finitely many seeded samples only.

#include <cstdint>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "mflow/problems.hpp"

namespace mflow {

struct AssumptionCheck {
  std::string name;
  std::size_t sample_count = 0;
  /// Max signed violation over the samples; the check passes iff it is <= tol
  /// (strictly < 0 for the strict variant).
  double worst_violation = 0.0;
  Vector witness;
  bool passed = false;
  bool informational = false;  // reported, not counted toward the verdict
  std::string note;
};

struct AssumptionReport {
  std::string subject;
  std::vector<AssumptionCheck> checks;
  std::string sampling_note;

  bool all_passed() const;
  const AssumptionCheck* find(const std::string& name) const;
  nlohmann::json to_json() const;
  /// One line per check: name, verdict, worst violation, witness.
  std::string table() const;
};

/// `count` seeded points of Dhat, drawn uniformly from the ball D and kept
/// when they pass the box and floor tests. `extra` points are prepended.
std::vector<Vector> sample_cap(const Cap& cap, std::size_t count, std::uint64_t seed,
                               const std::vector<Vector>& extra = {},
                               double tol = kDefaultTolerance);

AssumptionCheck check_A1(const VectorField& f, const Cap& cap, const std::vector<Vector>& samples,
                         double tol = kDefaultTolerance);

inline const std::vector<double> kDefaultHGrid = {0.0, 0.25, 0.5, 0.75, 1.0};

AssumptionCheck check_A2(const VectorField& f, const Cap& cap, const std::vector<Vector>& samples,
                         const std::vector<double>& h_grid = kDefaultHGrid,
                         double tol = kDefaultTolerance);

AssumptionCheck check_A3(const VectorField& f, const Cap& cap, const std::vector<Vector>& samples,
                         double tol = kDefaultTolerance);

/// <F(x), w - x> < 0 at every trajectory point away from z. Informational.
AssumptionCheck check_C_star(const VectorField& f, const Cap& cap,
                             const std::vector<Vector>& trajectory,
                             double tol = kDefaultTolerance);

/// x -> C(x), an intersection of at most two halfspaces, together with
/// x -> P_{C(x)}(w).
struct PdsMultifunction {
  std::string name;
  std::function<std::vector<HalfSpace>(const Vector&)> sets;
  std::function<Vector(const Vector&)> project;
};

/// C(x) = H(w, x) n H(x, T x), projected with the closed-form Q.
PdsMultifunction pds_from_fixed_point_map(const Vector& w_bar, PointMap t);

/// Generic C with the projection computed by project_intersection.
PdsMultifunction pds_from_sets(const Vector& w_bar, std::string name,
                               std::function<std::vector<HalfSpace>(const Vector&)> sets);

/// (A'), (B'), (C'), (D') in that order. (D') holds by construction for
/// halfspace intersections and is reported without sampling.
std::vector<AssumptionCheck> check_pds_conditions(const PdsMultifunction& c, const Cap& cap,
                                                  const std::vector<Vector>& samples,
                                                  double tol = kDefaultTolerance);

struct ConvergenceSummary {
  double final_error = 0.0;
  /// (10^-k, first iterate index with ||x_n - z|| <= 10^-k).
  std::vector<std::pair<double, std::size_t>> decades;
  /// First index with ||x_n - w||^2 >= ||w - z||^2 - eps, if reached.
  std::optional<std::size_t> tail_start;
  /// max over later m of ||x_m - z||^2 - eps; <= 1e-9 required.
  double tail_worst = 0.0;
  bool tail_ok = true;

  nlohmann::json to_json() const;
};

ConvergenceSummary convergence_report(const Trajectory& traj, const Vector& z_bar,
                                      const Vector& w_bar, double eps = 1e-4);

struct CheckOptions {
  std::size_t samples = 512;
  std::uint64_t seed = 0;
  double tol = kDefaultTolerance;
  double r_fraction = 0.1;
  StopCriteria stop;
};

/// Every applicable diagnostic for a named instance.
AssumptionReport run_checks(const NamedInstance& named, const CheckOptions& options);

}  // namespace mflow
