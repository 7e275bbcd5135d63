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

#include "mflow/error.hpp"
#include "mflow/problems.hpp"
#include "support.hpp"

using namespace mflow;
using mflow::testing::Gen;
using mflow::testing::max_abs_diff;
using mflow::testing::vec;

namespace {

// Dense Kuhn-Tucker system for min 1/2|p - p0|^2 + 1/2|Lp - q0|^2:
//   p - p0 + L^T v = 0,   Lp - q0 - v = 0.
PDPoint dense_kkt(const Vector& p0, const Vector& q0, const Matrix& l) {
  const auto n = l.cols(), m = l.rows();
  Matrix k = Matrix::Zero(n + m, n + m);
  k.topLeftCorner(n, n).setIdentity();
  k.topRightCorner(n, m) = l.transpose();
  k.bottomLeftCorner(m, n) = l;
  k.bottomRightCorner(m, m) = -Matrix::Identity(m, m);
  Vector rhs(n + m);
  rhs << p0, q0;
  const Vector x = k.fullPivLu().solve(rhs);
  return PDPoint(x.head(n), x.tail(m));
}

}  // namespace

TEST_CASE("quadratic instance examples") {
  const auto zero_map = quadratic_instance(vec({0.3, -0.2}), vec({0.0}), LinearMap(Matrix::Zero(1, 2)));
  CHECK(max_abs_diff(zero_map.oracle->p, vec({0.3, -0.2})) < 1e-15);
  CHECK(max_abs_diff(zero_map.oracle->v, vec({0.0})) < 1e-15);

  const auto planar = quadratic_instance(vec({0, 0}), vec({2}), LinearMap(Matrix{{1.0, 1.0}}));
  CHECK(max_abs_diff(planar.oracle->p, vec({2.0 / 3, 2.0 / 3})) < 1e-14);
  CHECK(planar.oracle->v[0] == doctest::Approx(-2.0 / 3).epsilon(1e-14));

  const auto one = builtin_instance("quadratic1d");
  CHECK(max_abs_diff(one.oracle->flatten(), vec({0.5, -0.5})) < 1e-15);
  CHECK(kt_residual(*one.instance, *one.oracle) < 1e-14);
}

TEST_CASE("quadratic oracle agrees with a dense solve") {
  Gen gen(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = gen.integer(1, 4), m = gen.integer(1, 3);
    const Vector p0 = gen.vector(n, 2.0), q0 = gen.vector(m, 2.0);
    const Matrix l = gen.matrix(m, n, 1.5);
    const auto named = quadratic_instance(p0, q0, LinearMap(l));
    const auto ref = dense_kkt(p0, q0, l);
    CHECK(max_abs_diff(named.oracle->flatten(), ref.flatten()) < 1e-12);
    CHECK(kt_residual(*named.instance, *named.oracle) < 1e-10);
  }
}

TEST_CASE("quadratic instance rejects mismatched data") {
  CHECK_THROWS_AS(quadratic_instance(vec({0, 0}), vec({1}), LinearMap(Matrix{{1.0}})), Error);
  CHECK_THROWS_AS(quadratic_instance(vec({0}), vec({1}), LinearMap(Matrix{{1.0}}), 0.0), Error);
}

TEST_CASE("lasso instance examples") {
  const auto one = builtin_instance("lasso1d");
  CHECK(one.oracle->p[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(one.oracle->v[0] == doctest::Approx(1.0).epsilon(1e-14));

  const auto unregularised = lasso_instance(vec({0.4, -1.2}), LinearMap(Matrix{{1.0, 2.0}}), 0.0);
  CHECK(max_abs_diff(unregularised.oracle->p, vec({0.4, -1.2})) < 1e-14);
  CHECK(std::abs(unregularised.oracle->v[0]) < 1e-14);

  const auto origin = lasso_instance(vec({0, 0}), LinearMap::identity(2), 0.5);
  CHECK(max_abs_diff(origin.oracle->p, vec({0, 0})) < 1e-15);

  // Soft thresholding for L = I.
  const auto soft = lasso_instance(vec({2.0, 0.3, -1.0}), LinearMap::identity(3), 0.5);
  CHECK(max_abs_diff(soft.oracle->p, vec({1.5, 0.0, -0.5})) < 1e-14);
  CHECK(max_abs_diff(soft.oracle->v, vec({0.5, 0.3, -0.5})) < 1e-14);
}

TEST_CASE("lasso oracle satisfies the inclusions on random data") {
  Gen gen(77);
  int built = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = gen.integer(1, 4), m = gen.integer(1, std::min(n, 3));
    const Matrix l = gen.matrix(m, n, 1.0);
    if (Eigen::FullPivLU<Matrix>(l).rank() != m) continue;
    const auto named = lasso_instance(gen.vector(n, 2.0), LinearMap(l), gen.uniform(0.05, 1.0));
    CHECK(kt_residual(*named.instance, *named.oracle) < 1e-9);
    ++built;
  }
  CHECK(built > 150);
}

TEST_CASE("lasso instance limits") {
  CHECK_THROWS_AS(lasso_instance(vec({1, 1, 1, 1}), LinearMap::identity(4), 1.0), Error);
  CHECK_THROWS_AS(lasso_instance(vec({1, 1}), LinearMap(Matrix{{1.0, 1.0}, {2.0, 2.0}}), 1.0),
                  Error);
  CHECK_THROWS_AS(lasso_instance(vec({1}), LinearMap::identity(2), 1.0), Error);
}

TEST_CASE("closed-form fixtures") {
  const auto ex1 = paper_example_1();
  REQUIRE(ex1.fixture);
  CHECK_FALSE(ex1.instance);
  const auto& fx = *ex1.fixture;
  CHECK(fx.x0 == vec({0, -1}));
  CHECK(fx.cap.w_bar == vec({-1, 0}));
  CHECK(fx.cap.z_bar == vec({1, 0}));
  const auto ref = fx.references.front();
  // x' = F(x) along the closed form.
  for (double t : {0.0, 0.3, 1.0, 2.5}) {
    const double h = 1e-6;
    const Vector deriv = (ref(t + h) - ref(t - h)) / (2 * h);
    CHECK(max_abs_diff(deriv, fx.extended(ref(t))) < 1e-8);
  }

  const auto ex2 = paper_example_2();
  const auto& f2 = *ex2.fixture;
  REQUIRE(f2.references.size() == 2);
  for (const auto& r : f2.references) {
    for (double t : {0.1, 0.7, 1.5}) {
      const double h = 1e-6;
      const Vector deriv = (r(t + h) - r(t - h)) / (2 * h);
      CHECK(max_abs_diff(deriv, f2.extended(r(t))) < 1e-7);
    }
    CHECK(r(0.0) == vec({0, 0}));
  }
  // The extension matches F on the cap.
  for (const auto& x : {vec({0.5, -0.5}), vec({0.9, -0.1}), vec({0.2, 0.0})}) {
    CHECK(max_abs_diff(f2.field(x), f2.extended(x)) < 1e-15);
  }
}

TEST_CASE("built-in registry") {
  for (const auto& tag : builtin_tags()) {
    const auto named = builtin_instance(tag);
    CHECK(named.tag == tag);
    CHECK((named.instance.has_value() != named.fixture.has_value()));
    const auto sys = named.system();
    CHECK(sys.name == tag);
    CHECK(sys.z_bar.has_value());
    CHECK(sys.x0.size() == sys.w_bar.size());
  }
  try {
    builtin_instance("nope");
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kConfig);
  }
}

TEST_CASE("validate_oracle rejects a wrong point") {
  auto named = builtin_instance("quadratic1d");
  named.oracle = PDPoint(vec({0.4}), vec({-0.5}));
  CHECK_THROWS_AS(validate_oracle(named), Error);
}
