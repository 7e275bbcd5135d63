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

#include "mflow/diagnostics.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <random>

namespace mflow {

namespace {

constexpr double kTailSlack = 1e-9;
constexpr double kFinalError = 1e-6;

// Tracks the running maximum of a signed violation and where it occurred.
struct Worst {
  double value = -std::numeric_limits<double>::infinity();
  Vector witness;
  void offer(double v, const Vector& x) {
    if (v > value) {
      value = v;
      witness = x;
    }
  }
};

AssumptionCheck finish(std::string name, std::size_t count, const Worst& worst, double tol) {
  AssumptionCheck c;
  c.name = std::move(name);
  c.sample_count = count;
  c.worst_violation = worst.value;
  c.witness = worst.witness;
  c.passed = worst.value <= tol;
  return c;
}

std::string format_point(const Vector& x) {
  if (x.size() == 0) return "-";
  std::string s = "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    s += fmt::format("{}{:.6g}", i ? ", " : "", x[i]);
  }
  return s + ")";
}

}  // namespace

bool AssumptionReport::all_passed() const {
  for (const auto& c : checks) {
    if (!c.informational && !c.passed) return false;
  }
  return true;
}

const AssumptionCheck* AssumptionReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

nlohmann::json AssumptionReport::to_json() const {
  nlohmann::json j;
  j["subject"] = subject;
  j["all_passed"] = all_passed();
  j["sampling"] = sampling_note;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json e;
    e["name"] = c.name;
    e["passed"] = c.passed;
    e["informational"] = c.informational;
    e["sample_count"] = c.sample_count;
    e["worst_violation"] = std::isfinite(c.worst_violation) ? nlohmann::json(c.worst_violation)
                                                            : nlohmann::json(nullptr);
    e["witness"] = vector_to_json(c.witness);
    if (!c.note.empty()) e["note"] = c.note;
    j["checks"].push_back(std::move(e));
  }
  return j;
}

std::string AssumptionReport::table() const {
  std::string out = fmt::format("{:<14} {:<6} {:>8} {:>14}  {}\n", "check", "result", "samples",
                                "worst", "witness");
  for (const auto& c : checks) {
    const char* verdict = c.passed ? "pass" : (c.informational ? "info" : "FAIL");
    out += fmt::format("{:<14} {:<6} {:>8} {:>14.6g}  {}", c.name, verdict, c.sample_count,
                       c.worst_violation, format_point(c.witness));
    if (!c.note.empty()) out += "  # " + c.note;
    out += "\n";
  }
  out += fmt::format("overall: {}\n", all_passed() ? "pass" : "FAIL");
  return out;
}

std::vector<Vector> sample_cap(const Cap& cap, std::size_t count, std::uint64_t seed,
                               const std::vector<Vector>& extra, double tol) {
  cap.validate();
  std::vector<Vector> out = extra;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit;
  const Vector center = cap.ball_center();
  const double radius = cap.ball_radius();
  const auto dim = cap.dim();
  const std::size_t budget = 1000 * std::max<std::size_t>(count, 1);
  std::size_t drawn = 0, attempts = 0;
  while (drawn < count) {
    if (++attempts > budget) {
      throw Error(Errc::kInvalidArgument, "sample_cap: rejection sampling found too few points");
    }
    Vector dir(dim);
    for (auto& c : dir) c = gauss(rng);
    const double len = dir.norm();
    if (len == 0.0) continue;
    const double rad = radius * std::pow(unit(rng), 1.0 / static_cast<double>(dim));
    Vector x = center + (rad / len) * dir;
    if (cap_membership(cap, x, tol) != CapRegion::kInsideDhat) continue;
    out.push_back(std::move(x));
    ++drawn;
  }
  return out;
}

AssumptionCheck check_A1(const VectorField& f, const Cap& cap, const std::vector<Vector>& samples,
                         double tol) {
  // At z the violation is ||F(z)||; elsewhere 2 tol - ||F(x)||, so a sample
  // passes when ||F(x)|| > tol.
  Worst worst;
  worst.offer(norm(f(cap.z_bar)), cap.z_bar);
  std::size_t used = 1;
  for (const auto& x : samples) {
    if (norm(x - cap.z_bar) < 10.0 * tol) continue;
    worst.offer(2.0 * tol - norm(f(x)), x);
    ++used;
  }
  auto c = finish("A", used, worst, tol);
  c.note = "z is the only zero of F";
  return c;
}

AssumptionCheck check_A2(const VectorField& f, const Cap& cap, const std::vector<Vector>& samples,
                         const std::vector<double>& h_grid, double tol) {
  Worst worst;
  for (const auto& x : samples) {
    const Vector fx = f(x);
    for (double h : h_grid) {
      const Vector y = x + h * fx;
      worst.offer(std::max(cap.d_violation(y), cap.floor_violation(y)), x);
    }
  }
  auto c = finish("B", samples.size() * h_grid.size(), worst, tol);
  c.note = "x + hF(x) stays in Dhat";
  return c;
}

AssumptionCheck check_A3(const VectorField& f, const Cap& cap, const std::vector<Vector>& samples,
                         double tol) {
  Worst worst;
  for (const auto& x : samples) worst.offer(inner(f(x), cap.w_bar - x), x);
  auto c = finish("C", samples.size(), worst, tol);
  c.note = "<F(x), w - x> <= 0";
  return c;
}

AssumptionCheck check_C_star(const VectorField& f, const Cap& cap,
                             const std::vector<Vector>& trajectory, double tol) {
  Worst worst;
  std::size_t used = 0;
  for (const auto& x : trajectory) {
    if (norm(x - cap.z_bar) <= tol) continue;
    worst.offer(inner(f(x), cap.w_bar - x), x);
    ++used;
  }
  AssumptionCheck c = finish("C*", used, worst, tol);
  c.passed = used == 0 || worst.value < 0.0;
  c.informational = true;
  c.note = "strict <F(x(t)), w - x(t)> < 0 along the trajectory";
  return c;
}

PdsMultifunction pds_from_fixed_point_map(const Vector& w_bar, PointMap t) {
  PdsMultifunction c;
  c.name = "H(w,x) n H(x,Tx)";
  c.sets = [w_bar, t](const Vector& x) {
    return std::vector<HalfSpace>{halfspace_of(w_bar, x), halfspace_of(x, t(x))};
  };
  c.project = [w_bar, t](const Vector& x) { return haugazeau_point(w_bar, x, t(x)); };
  return c;
}

PdsMultifunction pds_from_sets(const Vector& w_bar, std::string name,
                               std::function<std::vector<HalfSpace>(const Vector&)> sets) {
  PdsMultifunction c;
  c.name = std::move(name);
  c.sets = sets;
  c.project = [w_bar, sets](const Vector& x) {
    const auto hs = sets(x);
    return project_intersection(hs, w_bar);
  };
  return c;
}

std::vector<AssumptionCheck> check_pds_conditions(const PdsMultifunction& c, const Cap& cap,
                                                  const std::vector<Vector>& samples, double tol) {
  Worst a, b, cc;
  std::size_t count = 0;
  auto visit = [&](const Vector& x, bool at_z) {
    ++count;
    for (const auto& h : c.sets(x)) a.offer(h.violation(cap.z_bar), x);
    Vector p;
    try {
      p = c.project(x);
    } catch (const Error& e) {
      if (e.code() != Errc::kEmptyIntersection) throw;
      a.offer(std::numeric_limits<double>::infinity(), x);
      return;
    }
    if (at_z) {
      a.offer(norm(p - x), x);
    } else if (norm(x - cap.z_bar) >= 10.0 * tol) {
      a.offer(2.0 * tol - norm(p - x), x);
    }
    b.offer(cap.d_violation(p), x);
    cc.offer(inner(p - x, cap.w_bar - x), x);
  };
  visit(cap.z_bar, true);
  for (const auto& x : samples) visit(x, false);

  std::vector<AssumptionCheck> out;
  out.push_back(finish("A'", count, a, tol));
  out.back().note = "z in C(x); P_C(x)(w) = x iff x = z";
  out.push_back(finish("B'", count, b, tol));
  out.back().note = "P_C(x)(w) in D";
  out.push_back(finish("C'", count, cc, tol));
  out.back().note = "<P_C(x)(w) - x, w - x> <= 0";
  AssumptionCheck d;
  d.name = "D'";
  d.passed = true;
  d.worst_violation = 0.0;
  d.note = "C(x) is an intersection of halfspaces: closed and convex by construction";
  out.push_back(std::move(d));
  return out;
}

nlohmann::json ConvergenceSummary::to_json() const {
  nlohmann::json j;
  j["final_error"] = final_error;
  j["decades"] = nlohmann::json::array();
  for (const auto& [level, n] : decades) j["decades"].push_back({{"error", level}, {"index", n}});
  j["tail_start"] = tail_start ? nlohmann::json(*tail_start) : nlohmann::json(nullptr);
  j["tail_worst"] = tail_worst;
  j["tail_ok"] = tail_ok;
  return j;
}

ConvergenceSummary convergence_report(const Trajectory& traj, const Vector& z_bar,
                                      const Vector& w_bar, double eps) {
  ConvergenceSummary s;
  if (traj.records.empty()) return s;
  s.final_error = norm(traj.final_point() - z_bar);
  double level = 1.0;
  for (std::size_t n = 0; n < traj.records.size() && level >= 1e-15; ++n) {
    const double err = norm(traj.records[n].x - z_bar);
    while (err <= level && level >= 1e-15) {
      s.decades.emplace_back(level, n);
      level /= 10.0;
    }
  }
  const double diameter_sq = squared_distance(w_bar, z_bar);
  s.tail_worst = -eps;
  for (std::size_t n = 0; n < traj.records.size(); ++n) {
    const Vector& x = traj.records[n].x;
    if (!s.tail_start && squared_distance(x, w_bar) >= diameter_sq - eps) s.tail_start = n;
    if (s.tail_start) s.tail_worst = std::max(s.tail_worst, squared_distance(x, z_bar) - eps);
  }
  s.tail_ok = s.tail_worst <= kTailSlack;
  return s;
}

AssumptionReport run_checks(const NamedInstance& named, const CheckOptions& opt) {
  AssumptionReport report;
  report.subject = named.tag;
  report.sampling_note = fmt::format(
      "{} seeded samples (seed {}) drawn from Dhat; the assumptions quantify over all of Dhat",
      opt.samples, opt.seed);

  if (named.fixture) {
    const auto& fx = *named.fixture;
    const auto samples = sample_cap(fx.cap, opt.samples, opt.seed, {fx.x0, fx.cap.z_bar}, opt.tol);
    report.checks.push_back(check_A1(fx.field, fx.cap, samples, opt.tol));
    report.checks.push_back(check_A2(fx.field, fx.cap, samples, kDefaultHGrid, opt.tol));
    report.checks.push_back(check_A3(fx.field, fx.cap, samples, opt.tol));
    const auto traj = integrate_horizon(named.system(opt.tol), 0.01, 1.0, opt.tol);
    std::vector<Vector> pts;
    for (const auto& r : traj.records) pts.push_back(r.x);
    report.checks.push_back(check_C_star(fx.extended, fx.cap, pts, opt.tol));
    return report;
  }

  if (!named.instance) throw Error(Errc::kInvalidArgument, "run_checks: empty instance");
  const auto& inst = *named.instance;
  DynamicSystem sys = named.system(opt.tol);
  const bool has_oracle = sys.z_bar.has_value();
  std::string oracle_note = "analytic oracle";
  Vector z = sys.z_bar ? *sys.z_bar : Vector();
  if (!sys.z_bar) {
    // No independent oracle: fall back on the solver's own limit.
    const auto est = solve(sys, SolveMode::kDiscrete, 1.0, opt.stop, opt.tol);
    z = est.final_point();
    sys.z_bar = z;
    oracle_note = "z estimated by the discrete scheme (no oracle supplied)";
  }
  const Cap cap = make_cap(sys.w_bar, z, opt.r_fraction);
  std::vector<Vector> extra{z};
  if (cap_membership(cap, sys.x0, opt.tol) == CapRegion::kInsideDhat) extra.push_back(sys.x0);
  const auto samples = sample_cap(cap, opt.samples, opt.seed, extra, opt.tol);

  const VectorField& f = sys.field;
  // An estimated z is only as good as the solve that produced it, so A is
  // judged to that accuracy.
  const double a_tol = has_oracle ? opt.tol : std::max(opt.tol, 2.0 * norm(f(z)));
  report.checks.push_back(check_A1(f, cap, samples, a_tol));
  if (!has_oracle) report.checks.back().note += fmt::format(" (to {:.2g}, z estimated)", a_tol);
  report.checks.push_back(check_A2(f, cap, samples, kDefaultHGrid, opt.tol));
  report.checks.push_back(check_A3(f, cap, samples, opt.tol));

  const auto traj = solve(sys, SolveMode::kDiscrete, 1.0, opt.stop, opt.tol);
  std::vector<Vector> pts;
  for (const auto& r : traj.records) pts.push_back(r.x);
  report.checks.push_back(check_C_star(f, cap, pts, opt.tol));

  for (auto& c : check_pds_conditions(
           pds_from_fixed_point_map(sys.w_bar, ex4_kuhn_tucker(inst, opt.tol)), cap, samples,
           opt.tol)) {
    report.checks.push_back(std::move(c));
  }

  // Reported only: the discrete scheme can be slow, and the verdict concerns
  // the assumptions, not the iteration budget.
  const auto conv = convergence_report(traj, z, sys.w_bar);
  AssumptionCheck c;
  c.name = "convergence";
  c.informational = true;
  c.sample_count = traj.records.size();
  c.worst_violation = conv.tail_worst;
  c.witness = traj.final_point();
  c.passed = conv.tail_ok && (!has_oracle || conv.final_error <= kFinalError);
  c.note = fmt::format("{}; termination {}; final error {:.3g}", oracle_note,
                       to_string(traj.termination), conv.final_error);
  report.checks.push_back(std::move(c));
  return report;
}

}  // namespace mflow
