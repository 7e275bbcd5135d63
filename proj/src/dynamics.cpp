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

#include "mflow/dynamics.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <ostream>

namespace mflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw Error(Errc::kInvalidArgument, fmt::format("step size lambda = {} must lie in (0, 1]", lambda));
  }
}

double knot_slack(double t) { return 1e-12 * std::max(1.0, std::abs(t)); }

// Index of the knot at t, if t is one.
std::optional<std::size_t> knot_at(const EulerPath& path, double t) {
  const double k = std::round((t - path.t0) / path.lambda);
  if (k < 0.0 || k > static_cast<double>(path.steps())) return std::nullopt;
  if (std::abs(t - (path.t0 + k * path.lambda)) > knot_slack(t)) return std::nullopt;
  return static_cast<std::size_t>(k);
}

std::size_t segment_of(const EulerPath& path, double t) {
  if (path.steps() == 0) {
    throw Error(Errc::kInvalidArgument, "Euler path has no segments");
  }
  if (t < path.t0 - knot_slack(t) || t > path.t_end() + knot_slack(t)) {
    throw Error(Errc::kInvalidArgument,
                fmt::format("t = {} outside [{}, {}]", t, path.t0, path.t_end()));
  }
  const double n = std::floor((t - path.t0) / path.lambda);
  return static_cast<std::size_t>(std::clamp(n, 0.0, static_cast<double>(path.steps() - 1)));
}

TrajectoryRecord make_record(const DynamicSystem& sys, double index, Vector x, double step) {
  TrajectoryRecord rec;
  rec.index = index;
  rec.norm_to_w = norm(x - sys.w_bar);
  rec.fejer_slack = kNaN;
  if (sys.z_bar) {
    rec.fejer_slack = squared_distance(sys.w_bar, *sys.z_bar) - squared_distance(sys.w_bar, x) -
                      squared_distance(x, *sys.z_bar);
  }
  rec.residual = sys.residual ? sys.residual(x) : norm(sys.field(x));
  rec.step_norm = step;
  rec.x = std::move(x);
  return rec;
}

}  // namespace

EulerPath euler_nodes(const VectorField& f, const Vector& x0, double lambda, std::size_t steps,
                      double t0, double tol) {
  require_lambda(lambda);
  require_finite(x0, "euler_nodes x0");
  EulerPath path;
  path.t0 = t0;
  path.lambda = lambda;
  path.nodes.reserve(steps + 1);
  path.slopes.reserve(steps);
  path.nodes.push_back(x0);
  for (std::size_t n = 0; n < steps; ++n) {
    const Vector& c = path.nodes.back();
    auto e = f.evaluate(c);
    Vector next = VectorField::advance(c, e, lambda);
    path.slopes.push_back(std::move(e.value));
    if (f.domain() && cap_membership(*f.domain(), next, tol) != CapRegion::kInsideDhat) {
      if (path.domain_warnings++ == 0) {
        spdlog::warn("euler node {} left the field's domain", n + 1);
      }
    }
    path.nodes.push_back(std::move(next));
  }
  return path;
}

Vector euler_eval(const EulerPath& path, double t) {
  if (auto k = knot_at(path, t)) return path.nodes[*k];
  const std::size_t n = segment_of(path, t);
  const double s = t - path.t0 - static_cast<double>(n) * path.lambda;
  return path.nodes[n] + s * path.slopes[n];
}

Vector euler_defect(const VectorField& f, const EulerPath& path, double t) {
  if (auto k = knot_at(path, t)) return Vector::Zero(path.nodes[*k].size());
  const std::size_t n = segment_of(path, t);
  return path.slopes[n] - f(euler_eval(path, t));
}

double sup_error(const EulerPath& path, const std::function<Vector(double)>& reference,
                 int per_segment) {
  double worst = 0.0;
  for (std::size_t n = 0; n < path.steps(); ++n) {
    for (int j = 0; j < per_segment; ++j) {
      const double t = path.t0 + (static_cast<double>(n) + double(j) / per_segment) * path.lambda;
      worst = std::max(worst, norm(euler_eval(path, t) - reference(t)));
    }
  }
  worst = std::max(worst, norm(path.nodes.back() - reference(path.t_end())));
  return worst;
}

PDPoint best_approx_iterate(const ProblemInstance& inst, const PDPoint& x, double tol) {
  const Vector flat = x.flatten();
  const Vector tx = kt_operator(inst, x, tol).tx.flatten();
  return PDPoint::unflatten(haugazeau_point(inst.w_bar.flatten(), flat, tx), inst.primal_dim());
}

DynamicSystem system_for(const ProblemInstance& inst, std::optional<PDPoint> oracle, double tol) {
  DynamicSystem sys;
  sys.name = "instance";
  sys.field = build_field(inst, tol);
  sys.x0 = inst.x0.flatten();
  sys.w_bar = inst.w_bar.flatten();
  if (oracle) sys.z_bar = oracle->flatten();
  sys.residual = [inst, tol](const Vector& x) {
    return kt_residual(inst, PDPoint::unflatten(x, inst.primal_dim()), tol);
  };
  sys.discrete_map = haugazeau_map(inst, tol);
  sys.primal_dim = inst.primal_dim();
  return sys;
}

void StopCriteria::validate() const {
  if (max_iter == 0 || !(tol_residual > 0.0) || !(tol_step > 0.0)) {
    throw Error(Errc::kInvalidArgument, "stop criteria must be strictly positive");
  }
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kResidual: return "residual";
    case Termination::kStep: return "step";
    case Termination::kFieldZero: return "field_zero";
    case Termination::kMaxIter: return "max_iter";
    case Termination::kHorizon: return "horizon";
    case Termination::kBreakdown: return "breakdown";
  }
  return "unknown";
}

Trajectory solve(const DynamicSystem& sys, SolveMode mode, double lambda, const StopCriteria& stop,
                 double tol) {
  stop.validate();
  if (mode == SolveMode::kEuler) require_lambda(lambda);
  if (mode == SolveMode::kDiscrete && !sys.discrete_map) {
    throw Error(Errc::kUnavailable, fmt::format("{}: no discrete scheme for this system", sys.name));
  }
  if (mode == SolveMode::kDiscrete) lambda = 1.0;

  Trajectory traj;
  traj.system = sys.name;
  traj.mode = mode;
  traj.lambda = lambda;
  traj.z_bar = sys.z_bar;

  auto index_of = [&](std::size_t n) {
    return mode == SolveMode::kDiscrete ? static_cast<double>(n) : static_cast<double>(n) * lambda;
  };

  Vector x = sys.x0;
  double step = 0.0;
  try {
    for (std::size_t n = 0;; ++n) {
      require_finite(x, "iterate");
      traj.records.push_back(make_record(sys, index_of(n), x, step));
      if (traj.records.back().residual <= stop.tol_residual) {
        traj.termination = Termination::kResidual;
        break;
      }
      if (n >= stop.max_iter) {
        traj.termination = Termination::kMaxIter;
        break;
      }
      Vector next;
      double field_norm = 0.0;
      if (mode == SolveMode::kDiscrete) {
        next = sys.discrete_map(x);
        field_norm = norm(next - x);
      } else {
        const auto e = sys.field.evaluate(x);
        field_norm = norm(e.value);
        next = VectorField::advance(x, e, lambda);
      }
      if (field_norm <= tol) {
        traj.termination = Termination::kFieldZero;
        break;
      }
      step = norm(next - x);
      x = std::move(next);
      if (step <= stop.tol_step) {
        require_finite(x, "iterate");
        traj.records.push_back(make_record(sys, index_of(n + 1), x, step));
        traj.termination = Termination::kStep;
        break;
      }
    }
  } catch (const Error& e) {
    if (e.code() != Errc::kEmptyIntersection && e.code() != Errc::kNonFinite) throw;
    traj.termination = Termination::kBreakdown;
    traj.message = e.what();
  }
  spdlog::info("{}: {} after {} iterations", sys.name, to_string(traj.termination),
               traj.iterations());
  return traj;
}

Trajectory integrate_horizon(const DynamicSystem& sys, double lambda, double t_end, double tol) {
  require_lambda(lambda);
  if (!(t_end > 0.0)) throw Error(Errc::kInvalidArgument, "integration horizon must be positive");
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::round(t_end / lambda)));

  Trajectory traj;
  traj.system = sys.name;
  traj.mode = SolveMode::kEuler;
  traj.lambda = lambda;
  traj.z_bar = sys.z_bar;
  try {
    const EulerPath path = euler_nodes(sys.field, sys.x0, lambda, steps, 0.0, tol);
    for (std::size_t n = 0; n < path.nodes.size(); ++n) {
      const double step = n == 0 ? 0.0 : norm(path.nodes[n] - path.nodes[n - 1]);
      traj.records.push_back(make_record(sys, static_cast<double>(n) * lambda, path.nodes[n], step));
    }
    if (sys.reference) traj.reference_sup_error = sup_error(path, sys.reference);
    traj.termination = Termination::kHorizon;
  } catch (const Error& e) {
    if (e.code() != Errc::kEmptyIntersection && e.code() != Errc::kNonFinite) throw;
    traj.termination = Termination::kBreakdown;
    traj.message = e.what();
  }
  return traj;
}

void Trajectory::write_csv(std::ostream& os) const {
  const auto k = records.empty() ? 0 : records.front().x.size();
  os << "n_or_t";
  for (Eigen::Index i = 0; i < k; ++i) os << ",x_" << i;
  os << ",norm_to_w,fejer_slack,residual,step_norm\n";
  for (const auto& r : records) {
    os << fmt::format("{:.17g}", r.index);
    for (double c : r.x) os << fmt::format(",{:.17g}", c);
    os << fmt::format(",{:.17g},{:.17g},{:.17g},{:.17g}\n", r.norm_to_w, r.fejer_slack,
                      r.residual, r.step_norm);
  }
}

nlohmann::json Trajectory::summary() const {
  nlohmann::json j;
  j["system"] = system;
  j["mode"] = mode == SolveMode::kDiscrete ? "discrete" : "euler";
  j["lambda"] = lambda;
  j["termination"] = to_string(termination);
  j["converged"] = converged(termination);
  j["iterations"] = iterations();
  if (!message.empty()) j["message"] = message;
  if (!records.empty()) {
    j["final_point"] = vector_to_json(final_point());
    j["final_residual"] = records.back().residual;
    if (z_bar) j["final_error"] = norm(final_point() - *z_bar);
  }
  if (reference_sup_error) j["reference_sup_error"] = *reference_sup_error;
  return j;
}

}  // namespace mflow
