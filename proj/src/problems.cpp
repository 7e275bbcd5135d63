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

#include "mflow/problems.hpp"

#include <fmt/format.h>

#include <cmath>

namespace mflow {

namespace {

constexpr double kOracleResidual = 1e-9;

ProblemInstance make_instance(MonotoneOpPtr a, MonotoneOpPtr b, const LinearMap& l, double gamma,
                              double mu, std::optional<PDPoint> w_bar) {
  ProblemInstance inst;
  inst.A = std::move(a);
  inst.B = std::move(b);
  inst.L = l;
  inst.gamma = gamma;
  inst.mu = mu;
  inst.w_bar = w_bar ? *w_bar : PDPoint(Vector::Zero(l.cols()), Vector::Zero(l.rows()));
  inst.x0 = inst.w_bar;
  inst.validate();
  return inst;
}

Vector planar(double x1, double x2) { return Vector{{x1, x2}}; }

}  // namespace

DynamicSystem NamedInstance::system(double tol) const {
  if (instance) {
    DynamicSystem sys = system_for(*instance, oracle, tol);
    sys.name = tag;
    return sys;
  }
  if (!fixture) throw Error(Errc::kInvalidArgument, fmt::format("{}: empty instance", tag));
  DynamicSystem sys;
  sys.name = tag;
  sys.field = fixture->extended;
  sys.field.with_domain(fixture->cap);
  sys.x0 = fixture->x0;
  sys.w_bar = fixture->cap.w_bar;
  sys.z_bar = fixture->cap.z_bar;
  if (!fixture->references.empty()) sys.reference = fixture->references.front();
  sys.primal_dim = fixture->x0.size();
  return sys;
}

NamedInstance quadratic_instance(const Vector& p0, const Vector& q0, const LinearMap& l,
                                 double gamma, double mu, std::optional<PDPoint> w_bar) {
  if (p0.size() != l.cols() || q0.size() != l.rows()) {
    throw Error(Errc::kDimensionMismatch, "quadratic_instance: p0, q0 and L disagree");
  }
  NamedInstance named;
  named.tag = "quadratic";
  named.instance = make_instance(make_quadratic(p0), make_quadratic(q0), l, gamma, mu, w_bar);

  const Matrix& m = l.matrix();
  const Matrix normal = Matrix::Identity(m.cols(), m.cols()) + m.transpose() * m;
  const Vector p = normal.llt().solve(p0 + m.transpose() * q0);
  const Vector v = m * p - q0;
  named.oracle = PDPoint(p, v);
  validate_oracle(named);
  return named;
}

NamedInstance lasso_instance(const Vector& b, const LinearMap& l, double reg, double gamma,
                             double mu, std::optional<PDPoint> w_bar) {
  const Matrix& m = l.matrix();
  const auto rows = m.rows();
  if (b.size() != m.cols()) throw Error(Errc::kDimensionMismatch, "lasso_instance: b and L disagree");
  if (rows > 3) {
    throw Error(Errc::kInvalidArgument,
                fmt::format("lasso_instance: {} dual dimensions exceed the oracle limit of 3", rows));
  }
  if (Eigen::FullPivLU<Matrix>(m).rank() != rows) {
    throw Error(Errc::kInvalidArgument, "lasso_instance: L must have full row rank");
  }
  NamedInstance named;
  named.tag = "lasso";
  named.instance = make_instance(make_quadratic(b), make_l1(rows, reg), l, gamma, mu, w_bar);

  // KKT: p = b - L* v, v_i = reg sign((Lp)_i) where (Lp)_i != 0, |v_i| <= reg
  // otherwise. Try every sign pattern of Lp.
  int patterns = 1;
  for (Eigen::Index i = 0; i < rows; ++i) patterns *= 3;
  const double slack = 1e-12 * std::max(1.0, reg);
  for (int code = 0; code < patterns; ++code) {
    std::vector<int> sign(static_cast<std::size_t>(rows));
    std::vector<Eigen::Index> free_rows;
    int c = code;
    for (Eigen::Index i = 0; i < rows; ++i, c /= 3) {
      sign[static_cast<std::size_t>(i)] = c % 3 - 1;
      if (c % 3 == 1) free_rows.push_back(i);
    }
    Vector v = Vector::Zero(rows);
    for (Eigen::Index i = 0; i < rows; ++i) v[i] = reg * sign[static_cast<std::size_t>(i)];
    if (!free_rows.empty()) {
      const auto k = static_cast<Eigen::Index>(free_rows.size());
      Matrix lz(k, m.cols());
      for (Eigen::Index r = 0; r < k; ++r) lz.row(r) = m.row(free_rows[static_cast<std::size_t>(r)]);
      // L_Z (b - L_N* v_N - L_Z* v_Z) = 0 with v_Z currently zero in v.
      const Vector rhs = lz * (b - m.transpose() * v);
      const Vector vz = (lz * lz.transpose()).ldlt().solve(rhs);
      for (Eigen::Index r = 0; r < k; ++r) v[free_rows[static_cast<std::size_t>(r)]] = vz[r];
    }
    const Vector p = b - m.transpose() * v;
    const Vector lp = m * p;
    bool ok = true;
    for (Eigen::Index i = 0; i < rows && ok; ++i) {
      const int s = sign[static_cast<std::size_t>(i)];
      if (s == 0) {
        ok = std::abs(v[i]) <= reg + slack && std::abs(lp[i]) <= slack * std::max(1.0, b.norm());
      } else {
        ok = s * lp[i] >= -slack;
      }
    }
    if (ok) {
      named.oracle = PDPoint(p, v);
      validate_oracle(named);
      return named;
    }
  }
  throw Error(Errc::kInvalidArgument, "lasso_instance: no sign pattern satisfies the KKT system");
}

NamedInstance paper_example_1() {
  NamedInstance named;
  named.tag = "paper_example_1";
  RawFixture fx;
  fx.cap.w_bar = planar(-1.0, 0.0);
  fx.cap.z_bar = planar(1.0, 0.0);
  fx.cap.r = 1.0;
  fx.cap.validate();
  auto f = [](const Vector& x) { return planar(1.0 - x[0], 0.0); };
  fx.field = VectorField::from_function(2, f);
  fx.field.with_domain(fx.cap).with_bound(2.0);
  fx.extended = VectorField::from_function(2, f);
  fx.x0 = planar(0.0, -1.0);
  fx.references.push_back([](double t) { return planar(1.0 - std::exp(-t), -1.0); });
  named.fixture = std::move(fx);
  return named;
}

NamedInstance paper_example_2() {
  NamedInstance named;
  named.tag = "paper_example_2";
  RawFixture fx;
  fx.cap.w_bar = planar(0.0, -1.0);
  fx.cap.z_bar = planar(1.0, 0.0);
  fx.cap.r = 1.0;
  fx.cap.box_lower = planar(0.0, -1.0);
  fx.cap.box_upper = planar(1.0, 0.0);
  fx.cap.validate();
  fx.field = VectorField::from_function(2, [](const Vector& x) { return planar(1.0 - x[0], -x[1]); });
  fx.field.with_domain(fx.cap);

  // Above the axis the second component blends from 0 (on x2 = 0) to x1 (on
  // the curve G = {(1 - e^-s, e^-s + s - 1)}, i.e. x2 = -x1 - ln(1 - x1)).
  fx.extended = VectorField::from_function(2, [](const Vector& x) {
    const double x1 = x[0], x2 = x[1];
    double second = -x2;
    if (x2 > 0.0) {
      second = 0.0;
      if (x1 > 0.0 && x1 < 1.0) {
        const double curve = -x1 - std::log1p(-x1);
        second = curve > 0.0 ? x1 * std::min(1.0, x2 / curve) : x1;
      }
    }
    return planar(1.0 - x1, second);
  });
  fx.x0 = planar(0.0, 0.0);
  // Euler from x0 tracks the first of these.
  fx.references.push_back([](double t) { return planar(1.0 - std::exp(-t), 0.0); });
  fx.references.push_back(
      [](double t) { return planar(1.0 - std::exp(-t), std::exp(-t) + t - 1.0); });
  named.fixture = std::move(fx);
  return named;
}

std::vector<std::string> builtin_tags() {
  return {"quadratic1d", "quadratic3x2", "lasso1d", "lasso2x2", "paper_example_1",
          "paper_example_2"};
}

NamedInstance builtin_instance(const std::string& tag) {
  NamedInstance named;
  if (tag == "quadratic1d") {
    named = quadratic_instance(Vector{{0.0}}, Vector{{1.0}}, LinearMap(Matrix{{1.0}}));
  } else if (tag == "quadratic3x2") {
    named = quadratic_instance(Vector{{0.2, 0.1, -0.3}}, Vector{{0.1, 0.2}},
                               LinearMap(Matrix{{0.5, 0.0, 0.2}, {0.0, -0.3, 0.4}}), 0.9, 0.9);
  } else if (tag == "lasso1d") {
    named = lasso_instance(Vector{{2.0}}, LinearMap(Matrix{{1.0}}), 1.0);
  } else if (tag == "lasso2x2") {
    named = lasso_instance(Vector{{1.5, -0.4}}, LinearMap(Matrix{{1.0, 0.5}, {-0.3, 1.0}}), 0.6);
  } else if (tag == "paper_example_1") {
    return paper_example_1();
  } else if (tag == "paper_example_2") {
    return paper_example_2();
  } else {
    throw Error(Errc::kConfig, fmt::format("unknown instance \"{}\"", tag));
  }
  named.tag = tag;
  return named;
}

void validate_oracle(const NamedInstance& named, double tol) {
  if (!named.instance || !named.oracle) return;
  const double res = kt_residual(*named.instance, *named.oracle, tol);
  if (!(res <= kOracleResidual)) {
    throw Error(Errc::kInvalidArgument,
                fmt::format("{}: oracle residual {} exceeds {}", named.tag, res, kOracleResidual));
  }
}

}  // namespace mflow
