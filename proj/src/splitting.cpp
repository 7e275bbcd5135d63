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

#include "mflow/splitting.hpp"

#include <fmt/format.h>

#include <cmath>
#include <nlohmann/json.hpp>

namespace mflow {

void ProblemInstance::validate() const {
  if (!A || !B) throw Error(Errc::kInvalidArgument, "instance: operators A and B are required");
  if (A->dim() != L.cols()) {
    throw Error(Errc::kDimensionMismatch,
                fmt::format("instance: A acts on dimension {} but L has {} columns", A->dim(),
                            L.cols()));
  }
  if (B->dim() != L.rows()) {
    throw Error(Errc::kDimensionMismatch,
                fmt::format("instance: B acts on dimension {} but L has {} rows", B->dim(),
                            L.rows()));
  }
  if (!(gamma > 0.0 && gamma < 1.0) || !(mu > 0.0 && mu < 1.0)) {
    throw Error(Errc::kInvalidArgument,
                fmt::format("instance: gamma = {} and mu = {} must lie in (0, 1)", gamma, mu));
  }
  for (const auto* pt : {&w_bar, &x0}) {
    if (pt->primal_dim() != primal_dim() || pt->dual_dim() != dual_dim()) {
      throw Error(Errc::kDimensionMismatch,
                  fmt::format("instance: point of shape ({}, {}) but the space is ({}, {})",
                              pt->primal_dim(), pt->dual_dim(), primal_dim(), dual_dim()));
    }
    require_finite(pt->p, "instance point");
    require_finite(pt->v, "instance point");
  }
}

ProblemInstance instance_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(Errc::kConfig, "instance: expected an object");
  for (const char* key : {"A", "B", "L", "w_bar"}) {
    if (!j.contains(key)) throw Error(Errc::kConfig, fmt::format("instance: missing \"{}\"", key));
  }
  ProblemInstance inst;
  inst.A = operator_from_json(j.at("A"));
  inst.B = operator_from_json(j.at("B"));
  inst.L = LinearMap(matrix_from_json(j.at("L"), "instance.L"));
  auto number = [&](const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) {
      throw Error(Errc::kConfig, fmt::format("instance: \"{}\" must be a number", key));
    }
    return j.at(key).get<double>();
  };
  inst.gamma = number("gamma", 0.5);
  inst.mu = number("mu", 0.5);
  inst.w_bar = j.at("w_bar").get<PDPoint>();
  inst.x0 = j.contains("x0") ? j.at("x0").get<PDPoint>() : inst.w_bar;
  inst.validate();
  return inst;
}

TStepDetail kt_operator(const ProblemInstance& inst, const PDPoint& x, double tol) {
  if (x.primal_dim() != inst.primal_dim() || x.dual_dim() != inst.dual_dim()) {
    throw Error(Errc::kDimensionMismatch, "kt_operator: point does not match the instance");
  }
  const auto& L = inst.L;
  TStepDetail d;
  const Vector primal_arg = x.p - inst.gamma * L.adjoint_apply(x.v);
  const Vector dual_arg = L.apply(x.p) + inst.mu * x.v;
  d.a = resolvent(*inst.A, inst.gamma, primal_arg);
  d.a_star = (primal_arg - d.a) / inst.gamma;
  d.b = resolvent(*inst.B, inst.mu, dual_arg);
  d.b_star = (dual_arg - d.b) / inst.mu;
  d.s_star = PDPoint(d.a_star + L.adjoint_apply(d.b_star), d.b - L.apply(d.a));
  d.eta = d.a.dot(d.a_star) + d.b.dot(d.b_star);

  const double s_sq = inner(d.s_star, d.s_star);
  const double excess = inner(x, d.s_star) - d.eta;
  if (std::sqrt(s_sq) <= tol || excess <= 0.0) {
    d.tx = x;
  } else {
    const double t = excess / s_sq;
    d.tx = PDPoint(x.p - t * d.s_star.p, x.v - t * d.s_star.v);
  }
  return d;
}

double kt_residual(const ProblemInstance& inst, const PDPoint& x, double tol) {
  const auto d = kt_operator(inst, x, tol);
  return std::sqrt((d.tx.p - x.p).squaredNorm() + (d.tx.v - x.v).squaredNorm());
}

PointMap kt_map(const ProblemInstance& inst, double tol) {
  return [inst, tol](const Vector& x) {
    return kt_operator(inst, PDPoint::unflatten(x, inst.primal_dim()), tol).tx.flatten();
  };
}

PointMap haugazeau_map(const ProblemInstance& inst, double tol) {
  const Vector w = inst.w_bar.flatten();
  return [inst, tol, w](const Vector& x) {
    const Vector tx = kt_operator(inst, PDPoint::unflatten(x, inst.primal_dim()), tol).tx.flatten();
    return haugazeau_point(w, x, tx);
  };
}

VectorField build_field(const ProblemInstance& inst, double tol) {
  inst.validate();
  return VectorField::from_target(inst.dim(), haugazeau_map(inst, tol));
}

PointMap ex1_projection(MonotoneOpPtr normal_cone) {
  if (!normal_cone) throw Error(Errc::kInvalidArgument, "ex1: operator required");
  return [op = std::move(normal_cone)](const Vector& x) { return resolvent(*op, 1.0, x); };
}

PointMap ex2_resolvent(MonotoneOpPtr a, double gamma) {
  if (!a) throw Error(Errc::kInvalidArgument, "ex2: operator required");
  if (!(gamma > 0.0)) throw Error(Errc::kInvalidArgument, "ex2: step must be positive");
  return [op = std::move(a), gamma](const Vector& x) { return resolvent(*op, gamma, x); };
}

PointMap ex3_forward_backward(MonotoneOpPtr a, MonotoneOpPtr b, double gamma) {
  if (!a || !b) throw Error(Errc::kInvalidArgument, "ex3: operators required");
  if (a->dim() != b->dim()) throw Error(Errc::kDimensionMismatch, "ex3: A and B dimensions differ");
  const double beta = b->cocoercivity();
  if (!(beta > 0.0) || !b->value(Vector::Zero(b->dim()))) {
    throw Error(Errc::kInvalidArgument, "ex3: B must be single-valued and cocoercive");
  }
  if (!(gamma >= 0.0 && gamma <= 2.0 * beta)) {
    throw Error(Errc::kInvalidArgument,
                fmt::format("ex3: step {} outside [0, 2 beta] with beta = {}", gamma, beta));
  }
  return [a = std::move(a), b = std::move(b), gamma](const Vector& x) -> Vector {
    if (gamma == 0.0) return x;
    const Vector forward = x - gamma * *b->value(x);
    return 0.5 * (x + resolvent(*a, gamma, forward));
  };
}

PointMap ex4_kuhn_tucker(const ProblemInstance& inst, double tol) {
  inst.validate();
  return kt_map(inst, tol);
}

}  // namespace mflow
