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

// Run configuration shared by the command-line driver and the C API.
//
// A config is a JSON object. Recognised keys:
//   instance        built-in tag, path to an instance JSON file, or an inline
//                   instance object (optionally carrying an "oracle" point)
//   mode            "discrete" | "euler"
//   lambda          number or list of numbers in (0, 1]
//   max_iter, tol_residual, tol_step, tolerance, seed, samples,
//   cap_r_fraction, t_end, out
// Unknown keys are rejected so that typos surface early.

#include <cstdint>
#include <string>
#include <vector>

#include "mflow/diagnostics.hpp"

namespace mflow {

struct RunConfig {
  NamedInstance instance;
  SolveMode mode = SolveMode::kDiscrete;
  std::vector<double> lambdas{1.0};
  StopCriteria stop;
  double tolerance = kDefaultTolerance;
  std::uint64_t seed = 0;
  std::size_t samples = 512;
  double cap_r_fraction = 0.1;
  double t_end = 1.0;
  std::string out_dir = ".";

  void validate() const;
  CheckOptions check_options() const;
};

/// Parses `text` (may be empty) and applies `overrides` on top, key by key.
/// Failures throw Error(kConfig) whose message names `origin` and the line and
/// column of the offending token.
RunConfig parse_run_config(const std::string& text, const std::string& origin,
                           const std::string& overrides = "");

/// Loads a built-in tag or, failing that, an instance JSON file.
NamedInstance resolve_instance(const std::string& selector);

}  // namespace mflow
