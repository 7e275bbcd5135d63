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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "mflow/dynamics.hpp"
#include "mflow/error.hpp"
#include "mflow/problems.hpp"
#include "support.hpp"

using namespace mflow;
using mflow::testing::max_abs_diff;
using mflow::testing::vec;

namespace {

VectorField pull_right() {
  return VectorField::from_function(2, [](const Vector& x) { return vec({1.0 - x[0], 0.0}); });
}

ProblemInstance one_dim() { return *builtin_instance("quadratic1d").instance; }

DynamicSystem one_dim_system() { return builtin_instance("quadratic1d").system(); }

}  // namespace

TEST_CASE("euler_nodes examples") {
  const auto path = euler_nodes(pull_right(), vec({0, -1}), 0.5, 3);
  REQUIRE(path.nodes.size() == 4);
  CHECK(path.nodes[0] == vec({0, -1}));
  CHECK(path.nodes[1] == vec({0.5, -1}));
  CHECK(path.nodes[2] == vec({0.75, -1}));
  CHECK(path.nodes[3] == vec({0.875, -1}));
  CHECK(path.t_end() == 1.5);

  const auto still = euler_nodes(VectorField::from_function(3, [](const Vector& x) {
                                   return Vector(Vector::Zero(x.size()));
                                 }),
                                 vec({1, 2, 3}), 0.3, 5);
  for (const auto& n : still.nodes) CHECK(n == vec({1, 2, 3}));
}

TEST_CASE("euler_nodes rejects invalid step sizes") {
  for (double lambda : {0.0, -0.5, 1.5, std::nan("")}) {
    CHECK_THROWS_AS(euler_nodes(pull_right(), vec({0, 0}), lambda, 3), Error);
  }
  CHECK_THROWS_AS(euler_nodes(pull_right(), vec({NAN, 0}), 0.5, 3), Error);
}

TEST_CASE("euler_nodes with lambda = 1 reproduces the discrete iterates") {
  const auto inst = one_dim();
  const auto field = build_field(inst);
  const auto path = euler_nodes(field, inst.x0.flatten(), 1.0, 50);
  PDPoint x = inst.x0;
  for (std::size_t n = 1; n < path.nodes.size(); ++n) {
    x = best_approx_iterate(inst, x);
    CHECK(path.nodes[n] == x.flatten());
  }
}

TEST_CASE("euler_eval examples") {
  const auto path = euler_nodes(pull_right(), vec({0, -1}), 0.5, 3, 2.0);
  CHECK(max_abs_diff(euler_eval(path, 2.75), vec({0.625, -1})) < 1e-15);
  CHECK(euler_eval(path, 2.0) == vec({0, -1}));
  for (std::size_t n = 0; n < path.nodes.size(); ++n) {
    CHECK(euler_eval(path, 2.0 + 0.5 * static_cast<double>(n)) == path.nodes[n]);
  }
  CHECK_THROWS_AS(euler_eval(path, 1.9), Error);
  CHECK_THROWS_AS(euler_eval(path, 3.6), Error);
}

TEST_CASE("euler_eval is continuous across knots") {
  const auto path = euler_nodes(pull_right(), vec({0, -1}), 0.1, 10);
  for (std::size_t n = 1; n < path.steps(); ++n) {
    const double t = 0.1 * static_cast<double>(n);
    CHECK(max_abs_diff(euler_eval(path, t - 1e-9), euler_eval(path, t + 1e-9)) < 1e-8);
  }
}

TEST_CASE("euler_defect examples") {
  const auto f = pull_right();
  const auto path = euler_nodes(f, vec({0, -1}), 0.5, 3);
  const double t = 0.75;
  const Vector c = euler_eval(path, t);
  CHECK(max_abs_diff(euler_defect(f, path, t), vec({c[0] - path.nodes[1][0], 0})) < 1e-15);
  CHECK(euler_defect(f, path, 0.5) == vec({0, 0}));

  const auto constant = VectorField::from_function(2, [](const Vector&) { return vec({1, 2}); });
  const auto cpath = euler_nodes(constant, vec({0, 0}), 0.25, 4);
  for (double s : {0.1, 0.3, 0.77}) CHECK(euler_defect(constant, cpath, s) == vec({0, 0}));
}

TEST_CASE("sampled sup-defect shrinks with the step size") {
  const auto f = pull_right();
  auto sup_defect = [&](double lambda) {
    const auto steps = static_cast<std::size_t>(std::round(1.0 / lambda));
    const auto path = euler_nodes(f, vec({0, -1}), lambda, steps);
    double worst = 0.0;
    for (std::size_t n = 0; n < steps; ++n) {
      for (int j = 1; j < 8; ++j) {
        worst = std::max(worst, norm(euler_defect(f, path, (static_cast<double>(n) + j / 8.0) * lambda)));
      }
    }
    return worst;
  };
  const double a = sup_defect(0.2), b = sup_defect(0.1), c = sup_defect(0.05);
  CHECK(b / a <= 0.6);
  CHECK(c / b <= 0.6);
}

TEST_CASE("best_approx_iterate examples") {
  const auto inst = one_dim();
  const PDPoint z(vec({0.5}), vec({-0.5}));
  const auto fixed = best_approx_iterate(inst, z);
  CHECK(fixed.p == z.p);
  CHECK(fixed.v == z.v);
  const auto x1 = best_approx_iterate(inst, inst.x0);
  CHECK(x1.p[0] == doctest::Approx(4.0 / 15).epsilon(1e-14));
  CHECK(x1.v[0] == doctest::Approx(-2.0 / 15).epsilon(1e-14));
}

TEST_CASE("solve converges on the one-dimensional instance") {
  StopCriteria stop;
  stop.tol_residual = 1e-8;
  const auto traj = solve(one_dim_system(), SolveMode::kDiscrete, 1.0, stop);
  CHECK(norm(traj.final_point() - vec({0.5, -0.5})) <= 1e-6);
  CHECK(traj.termination != Termination::kBreakdown);
}

TEST_CASE("solve stops immediately at the Kuhn-Tucker point") {
  auto sys = one_dim_system();
  sys.x0 = vec({0.5, -0.5});
  for (auto mode : {SolveMode::kDiscrete, SolveMode::kEuler}) {
    const auto traj = solve(sys, mode, 0.5, StopCriteria{});
    CHECK(traj.iterations() == 0);
    CHECK(traj.termination == Termination::kResidual);
    CHECK(converged(traj.termination));
  }
}

TEST_CASE("euler with lambda = 1 and the discrete scheme agree exactly") {
  StopCriteria stop;
  stop.max_iter = 500;
  for (const char* tag : {"quadratic1d", "quadratic3x2", "lasso2x2"}) {
    const auto sys = builtin_instance(tag).system();
    const auto d = solve(sys, SolveMode::kDiscrete, 1.0, stop);
    const auto e = solve(sys, SolveMode::kEuler, 1.0, stop);
    REQUIRE(d.records.size() == e.records.size());
    for (std::size_t n = 0; n < d.records.size(); ++n) {
      CHECK(d.records[n].x == e.records[n].x);
      CHECK(d.records[n].index == e.records[n].index);
    }
    std::ostringstream a, b;
    d.write_csv(a);
    e.write_csv(b);
    CHECK(a.str() == b.str());
  }
}

TEST_CASE("invariants along discrete trajectories") {
  StopCriteria stop;
  stop.max_iter = 20000;
  for (const auto& tag : {"quadratic1d", "quadratic3x2", "lasso1d", "lasso2x2"}) {
    const auto traj = solve(builtin_instance(tag).system(), SolveMode::kDiscrete, 1.0, stop);
    for (std::size_t n = 1; n < traj.records.size(); ++n) {
      CHECK(traj.records[n].norm_to_w >= traj.records[n - 1].norm_to_w - 1e-10);
      CHECK(traj.records[n].fejer_slack >= -1e-10);
    }
  }
}

TEST_CASE("invariants along Euler trajectories of Q-fields") {
  StopCriteria stop;
  stop.max_iter = 2000;
  const auto sys = builtin_instance("quadratic3x2").system();
  for (double lambda : {0.25, 0.5, 0.9}) {
    const auto traj = solve(sys, SolveMode::kEuler, lambda, stop);
    for (std::size_t n = 1; n < traj.records.size(); ++n) {
      CHECK(traj.records[n].norm_to_w >= traj.records[n - 1].norm_to_w - 1e-10);
      CHECK(traj.records[n].fejer_slack >= -1e-10);
    }
  }
}

TEST_CASE("stop criteria") {
  const auto sys = one_dim_system();
  StopCriteria stop;
  stop.max_iter = 1;
  auto traj = solve(sys, SolveMode::kDiscrete, 1.0, stop);
  CHECK(traj.termination == Termination::kMaxIter);
  CHECK(traj.iterations() == 1);

  stop = StopCriteria{};
  stop.tol_step = 1e-3;
  traj = solve(sys, SolveMode::kDiscrete, 1.0, stop);
  CHECK(traj.termination == Termination::kStep);
  CHECK(traj.records.back().step_norm <= 1e-3);

  stop = StopCriteria{};
  stop.tol_residual = 0.0;
  CHECK_THROWS_AS(solve(sys, SolveMode::kDiscrete, 1.0, stop), Error);
  CHECK_THROWS_AS(solve(sys, SolveMode::kEuler, 0.0, StopCriteria{}), Error);

  auto fixture = paper_example_1().system();
  CHECK_THROWS_AS(solve(fixture, SolveMode::kDiscrete, 1.0, StopCriteria{}), Error);
}

TEST_CASE("breakdown is reported, not thrown") {
  DynamicSystem sys;
  sys.name = "blowup";
  sys.field = VectorField::from_function(1, [](const Vector& x) { return Vector(x * 1e200); });
  sys.x0 = vec({1e200});
  sys.w_bar = vec({0});
  const auto traj = solve(sys, SolveMode::kEuler, 1.0, StopCriteria{});
  CHECK(traj.termination == Termination::kBreakdown);
  CHECK_FALSE(traj.message.empty());
}

TEST_CASE("trajectory CSV and summary") {
  StopCriteria stop;
  stop.max_iter = 3;
  const auto traj = solve(one_dim_system(), SolveMode::kDiscrete, 1.0, stop);
  std::ostringstream os;
  traj.write_csv(os);
  std::istringstream in(os.str());
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "n_or_t,x_0,x_1,norm_to_w,fejer_slack,residual,step_norm");
  CHECK(first.rfind("0,0,0,0,", 0) == 0);
  std::string second;
  std::getline(in, second);
  // 17 significant digits round-trip exactly.
  const auto comma = second.find(',');
  const auto x0 = std::stod(second.substr(comma + 1));
  CHECK(x0 == traj.records[1].x[0]);

  const auto s = traj.summary();
  CHECK(s["termination"] == "max_iter");
  CHECK(s["iterations"] == 3);
  CHECK(s["converged"] == false);
  CHECK(s["final_point"].size() == 2);
}

TEST_CASE("Euler over a horizon against the closed form") {
  const auto sys = paper_example_1().system();
  std::vector<double> errors;
  for (double lambda : {0.2, 0.1, 0.05}) {
    const auto traj = integrate_horizon(sys, lambda, 1.0);
    CHECK(traj.termination == Termination::kHorizon);
    REQUIRE(traj.reference_sup_error);
    errors.push_back(*traj.reference_sup_error);
  }
  CHECK(errors[1] / errors[0] == doctest::Approx(0.5).epsilon(0.2));
  CHECK(errors[2] / errors[1] == doctest::Approx(0.5).epsilon(0.2));
}
