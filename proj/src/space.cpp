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

#include "mflow/space.hpp"

#include <fmt/format.h>

#include <cmath>
#include <nlohmann/json.hpp>

namespace mflow {

void require_same_dim(const Vector& a, const Vector& b, std::string_view what) {
  if (a.size() != b.size()) {
    throw Error(Errc::kDimensionMismatch,
                fmt::format("{}: dimension mismatch ({} vs {})", what, a.size(), b.size()));
  }
}

void require_finite(const Vector& a, std::string_view what) {
  if (!all_finite(a)) {
    throw Error(Errc::kNonFinite, fmt::format("{}: non-finite coordinate", what));
  }
}

bool all_finite(const Vector& a) { return a.allFinite(); }

double inner(const Vector& a, const Vector& b) {
  require_same_dim(a, b, "inner");
  return a.dot(b);
}

double norm(const Vector& a) { return std::sqrt(a.squaredNorm()); }

double squared_distance(const Vector& a, const Vector& b) {
  require_same_dim(a, b, "squared_distance");
  return (a - b).squaredNorm();
}

Vector axpy(double alpha, const Vector& x, const Vector& y) {
  require_same_dim(x, y, "axpy");
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = alpha * x[i] + y[i];
  return out;
}

Vector PDPoint::flatten() const {
  Vector out(p.size() + v.size());
  out << p, v;
  return out;
}

PDPoint PDPoint::unflatten(const Vector& x, Eigen::Index primal_dim) {
  if (primal_dim < 0 || primal_dim > x.size()) {
    throw Error(Errc::kDimensionMismatch,
                fmt::format("unflatten: primal dimension {} exceeds size {}", primal_dim, x.size()));
  }
  return PDPoint(x.head(primal_dim), x.tail(x.size() - primal_dim));
}

double inner(const PDPoint& a, const PDPoint& b) { return inner(a.p, b.p) + inner(a.v, b.v); }

double norm(const PDPoint& a) { return std::sqrt(inner(a, a)); }

Vector vector_from_json(const nlohmann::json& j, std::string_view what) {
  if (!j.is_array() || j.empty()) {
    throw Error(Errc::kConfig, fmt::format("{}: expected a non-empty array of numbers", what));
  }
  Vector out(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw Error(Errc::kConfig, fmt::format("{}[{}]: expected a number", what, i));
    }
    out[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  require_finite(out, what);
  return out;
}

nlohmann::json vector_to_json(const Vector& x) {
  auto j = nlohmann::json::array();
  for (double c : x) j.push_back(c);
  return j;
}

Matrix matrix_from_json(const nlohmann::json& j, std::string_view what) {
  if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty()) {
    throw Error(Errc::kConfig, fmt::format("{}: expected a non-empty row-major matrix", what));
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(Errc::kConfig, fmt::format("{}: row {} has the wrong length", what, r));
    }
    out.row(r) = vector_from_json(row, fmt::format("{}[{}]", what, r)).transpose();
  }
  return out;
}

void to_json(nlohmann::json& j, const PDPoint& x) {
  j = nlohmann::json{{"p", vector_to_json(x.p)}, {"v", vector_to_json(x.v)}};
}

void from_json(const nlohmann::json& j, PDPoint& x) {
  if (!j.is_object() || !j.contains("p") || !j.contains("v")) {
    throw Error(Errc::kConfig, "point: expected an object with \"p\" and \"v\"");
  }
  x.p = vector_from_json(j.at("p"), "point.p");
  x.v = vector_from_json(j.at("v"), "point.v");
}

}  // namespace mflow
