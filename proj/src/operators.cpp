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

#include "mflow/operators.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>

namespace mflow {

std::optional<bool> MonotoneOp::member(const Vector&, const Vector&, double) const {
  return std::nullopt;
}

std::optional<Vector> MonotoneOp::value(const Vector&) const { return std::nullopt; }

Vector resolvent(const MonotoneOp& op, double gamma, const Vector& x) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(Errc::kInvalidArgument, fmt::format("resolvent: step {} must be positive", gamma));
  }
  if (x.size() != op.dim()) {
    throw Error(Errc::kDimensionMismatch,
                fmt::format("resolvent of {}: got dimension {}, operator acts on {}", op.tag(),
                            x.size(), op.dim()));
  }
  return op.apply_resolvent(gamma, x);
}

Vector yosida(const MonotoneOp& op, double gamma, const Vector& x) {
  return (x - resolvent(op, gamma, x)) / gamma;
}

namespace {

class Quadratic final : public MonotoneOp {
 public:
  explicit Quadratic(Vector b) : b_(std::move(b)) {}
  Eigen::Index dim() const override { return b_.size(); }
  std::string tag() const override { return "quadratic"; }
  Vector apply_resolvent(double gamma, const Vector& x) const override {
    return (x + gamma * b_) / (1.0 + gamma);
  }
  std::optional<bool> member(const Vector& x, const Vector& y, double tol) const override {
    return (y - (x - b_)).lpNorm<Eigen::Infinity>() <= tol;
  }
  std::optional<Vector> value(const Vector& x) const override { return Vector(x - b_); }
  double cocoercivity() const override { return 1.0; }

 private:
  Vector b_;
};

class L1 final : public MonotoneOp {
 public:
  L1(Eigen::Index dim, double weight) : dim_(dim), weight_(weight) {}
  Eigen::Index dim() const override { return dim_; }
  std::string tag() const override { return "l1"; }
  Vector apply_resolvent(double gamma, const Vector& x) const override {
    const double t = gamma * weight_;
    Vector out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double mag = std::max(std::abs(x[i]) - t, 0.0);
      out[i] = std::copysign(mag, x[i]);
      if (mag == 0.0) out[i] = 0.0;
    }
    return out;
  }
  std::optional<bool> member(const Vector& x, const Vector& y, double tol) const override {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (std::abs(x[i]) > tol) {
        if (std::abs(y[i] - std::copysign(weight_, x[i])) > tol) return false;
      } else if (std::abs(y[i]) > weight_ + tol) {
        return false;
      }
    }
    return true;
  }

 private:
  Eigen::Index dim_;
  double weight_;
};

class Box final : public MonotoneOp {
 public:
  Box(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {}
  Eigen::Index dim() const override { return lower_.size(); }
  std::string tag() const override { return "box"; }
  Vector apply_resolvent(double, const Vector& x) const override {
    return x.cwiseMax(lower_).cwiseMin(upper_);
  }
  std::optional<bool> member(const Vector& x, const Vector& y, double tol) const override {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (x[i] < lower_[i] - tol || x[i] > upper_[i] + tol) return false;
      const bool at_lower = x[i] <= lower_[i] + tol;
      const bool at_upper = x[i] >= upper_[i] - tol;
      if (at_lower && at_upper) continue;
      if (at_lower && y[i] > tol) return false;
      if (at_upper && y[i] < -tol) return false;
      if (!at_lower && !at_upper && std::abs(y[i]) > tol) return false;
    }
    return true;
  }

 private:
  Vector lower_;
  Vector upper_;
};

class Ball final : public MonotoneOp {
 public:
  Ball(Vector center, double radius) : center_(std::move(center)), radius_(radius) {}
  Eigen::Index dim() const override { return center_.size(); }
  std::string tag() const override { return "ball"; }
  Vector apply_resolvent(double, const Vector& x) const override {
    const Vector d = x - center_;
    const double len = norm(d);
    if (len <= radius_) return x;
    return center_ + (radius_ / len) * d;
  }
  std::optional<bool> member(const Vector& x, const Vector& y, double tol) const override {
    const Vector d = x - center_;
    const double len = norm(d);
    if (len > radius_ + tol) return false;
    if (len < radius_ - tol) return norm(y) <= tol;
    // Boundary: y must be a nonnegative multiple of the outward normal.
    const double t = y.dot(d) / d.squaredNorm();
    return t >= -tol && norm(y - t * d) <= tol;
  }

 private:
  Vector center_;
  double radius_;
};

class Zero final : public MonotoneOp {
 public:
  explicit Zero(Eigen::Index dim) : dim_(dim) {}
  Eigen::Index dim() const override { return dim_; }
  std::string tag() const override { return "zero"; }
  Vector apply_resolvent(double, const Vector& x) const override { return x; }
  std::optional<bool> member(const Vector&, const Vector& y, double tol) const override {
    return y.lpNorm<Eigen::Infinity>() <= tol;
  }
  std::optional<Vector> value(const Vector& x) const override {
    return Vector(Vector::Zero(x.size()));
  }
  double cocoercivity() const override { return std::numeric_limits<double>::infinity(); }

 private:
  Eigen::Index dim_;
};

class LinearMonotone final : public MonotoneOp {
 public:
  explicit LinearMonotone(Matrix m) : m_(std::move(m)) {
    const Matrix sym = 0.5 * (m_ + m_.transpose());
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
    if (eig.eigenvalues().minCoeff() < -1e-12 * scale) {
      throw Error(Errc::kInvalidArgument, "linear_psd: matrix is not monotone");
    }
    const bool symmetric = (m_ - m_.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * scale;
    if (symmetric) {
      const double top = eig.eigenvalues().maxCoeff();
      cocoercivity_ = top > 0.0 ? 1.0 / top : std::numeric_limits<double>::infinity();
    }
  }
  Eigen::Index dim() const override { return m_.rows(); }
  std::string tag() const override { return "linear_psd"; }
  Vector apply_resolvent(double gamma, const Vector& x) const override {
    std::lock_guard lock(mutex_);
    auto it = factorizations_.find(gamma);
    if (it == factorizations_.end()) {
      const Matrix shifted = Matrix::Identity(m_.rows(), m_.cols()) + gamma * m_;
      it = factorizations_.emplace(gamma, Eigen::PartialPivLU<Matrix>(shifted)).first;
    }
    return it->second.solve(x);
  }
  std::optional<bool> member(const Vector& x, const Vector& y, double tol) const override {
    return (y - m_ * x).lpNorm<Eigen::Infinity>() <= tol;
  }
  std::optional<Vector> value(const Vector& x) const override { return Vector(m_ * x); }
  double cocoercivity() const override { return cocoercivity_; }

 private:
  Matrix m_;
  double cocoercivity_ = 0.0;
  mutable std::mutex mutex_;
  mutable std::map<double, Eigen::PartialPivLU<Matrix>> factorizations_;
};

Eigen::Index require_dim(Eigen::Index dim, std::string_view what) {
  if (dim < 1) throw Error(Errc::kInvalidArgument, fmt::format("{}: dimension must be >= 1", what));
  return dim;
}

}  // namespace

MonotoneOpPtr make_quadratic(Vector b) {
  require_dim(b.size(), "quadratic");
  require_finite(b, "quadratic.b");
  return std::make_shared<Quadratic>(std::move(b));
}

MonotoneOpPtr make_l1(Eigen::Index dim, double weight) {
  require_dim(dim, "l1");
  if (!(weight >= 0.0) || !std::isfinite(weight)) {
    throw Error(Errc::kInvalidArgument, "l1: weight must be finite and nonnegative");
  }
  return std::make_shared<L1>(dim, weight);
}

MonotoneOpPtr make_box(Vector lower, Vector upper) {
  require_dim(lower.size(), "box");
  require_same_dim(lower, upper, "box");
  if ((lower.array() > upper.array()).any()) {
    throw Error(Errc::kInvalidArgument, "box: lower bound exceeds upper bound");
  }
  if (lower.array().isNaN().any() || upper.array().isNaN().any()) {
    throw Error(Errc::kInvalidArgument, "box: NaN bound");
  }
  return std::make_shared<Box>(std::move(lower), std::move(upper));
}

MonotoneOpPtr make_ball(Vector center, double radius) {
  require_dim(center.size(), "ball");
  require_finite(center, "ball.center");
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw Error(Errc::kInvalidArgument, "ball: radius must be finite and nonnegative");
  }
  return std::make_shared<Ball>(std::move(center), radius);
}

MonotoneOpPtr make_zero(Eigen::Index dim) {
  return std::make_shared<Zero>(require_dim(dim, "zero"));
}

MonotoneOpPtr make_linear_monotone(Matrix m) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    throw Error(Errc::kInvalidArgument, "linear_psd: matrix must be square and non-empty");
  }
  if (!m.allFinite()) throw Error(Errc::kInvalidArgument, "linear_psd: non-finite entry");
  return std::make_shared<LinearMonotone>(std::move(m));
}

MonotoneOpPtr operator_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw Error(Errc::kConfig, "operator: expected {\"type\": <tag>, \"params\": {...}}");
  }
  const auto type = j.at("type").get<std::string>();
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  auto number = [&](const char* key, std::optional<double> fallback = std::nullopt) {
    if (!params.contains(key)) {
      if (fallback) return *fallback;
      throw Error(Errc::kConfig, fmt::format("operator {}: missing parameter \"{}\"", type, key));
    }
    if (!params.at(key).is_number()) {
      throw Error(Errc::kConfig, fmt::format("operator {}: \"{}\" must be a number", type, key));
    }
    return params.at(key).get<double>();
  };
  auto vec = [&](const char* key) {
    if (!params.contains(key)) {
      throw Error(Errc::kConfig, fmt::format("operator {}: missing parameter \"{}\"", type, key));
    }
    return vector_from_json(params.at(key), fmt::format("operator {}.{}", type, key));
  };
  auto dim = [&] {
    const double d = number("dim");
    if (d < 1 || d != std::floor(d)) {
      throw Error(Errc::kConfig, fmt::format("operator {}: \"dim\" must be a positive integer", type));
    }
    return static_cast<Eigen::Index>(d);
  };

  if (type == "quadratic") return make_quadratic(vec("b"));
  if (type == "l1") return make_l1(dim(), number("weight", 1.0));
  if (type == "box") return make_box(vec("lower"), vec("upper"));
  if (type == "ball") return make_ball(vec("center"), number("radius"));
  if (type == "zero") return make_zero(dim());
  if (type == "linear_psd") {
    if (!params.contains("matrix")) {
      throw Error(Errc::kConfig, "operator linear_psd: missing parameter \"matrix\"");
    }
    return make_linear_monotone(matrix_from_json(params.at("matrix"), "operator linear_psd.matrix"));
  }
  throw Error(Errc::kConfig, fmt::format("operator: unknown type \"{}\"", type));
}

LinearMap::LinearMap(Matrix m) : m_(std::move(m)) {
  if (m_.rows() < 1 || m_.cols() < 1) throw Error(Errc::kInvalidArgument, "linear map: empty matrix");
  if (!m_.allFinite()) throw Error(Errc::kInvalidArgument, "linear map: non-finite entry");
}

Vector LinearMap::apply(const Vector& x) const {
  if (x.size() != m_.cols()) {
    throw Error(Errc::kDimensionMismatch,
                fmt::format("linear map: input dimension {} but map has {} columns", x.size(),
                            m_.cols()));
  }
  return m_ * x;
}

Vector LinearMap::adjoint_apply(const Vector& y) const {
  if (y.size() != m_.rows()) {
    throw Error(Errc::kDimensionMismatch,
                fmt::format("linear map adjoint: input dimension {} but map has {} rows", y.size(),
                            m_.rows()));
  }
  return m_.transpose() * y;
}

}  // namespace mflow
