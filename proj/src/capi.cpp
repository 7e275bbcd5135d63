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

#include "mflow/mflow.h"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <mutex>
#include <new>
#include <nlohmann/json.hpp>

#include "mflow/config.hpp"

struct mflow_session {
  mflow::RunConfig config;
  mflow::DynamicSystem system;
};

struct mflow_trajectory {
  mflow::Trajectory traj;
};

struct mflow_report {
  mflow::AssumptionReport report;
};

namespace {

thread_local std::string g_last_error;

mflow_status status_of(mflow::Errc code) {
  switch (code) {
    case mflow::Errc::kInvalidArgument: return MFLOW_INVALID_ARGUMENT;
    case mflow::Errc::kDimensionMismatch: return MFLOW_DIMENSION_MISMATCH;
    case mflow::Errc::kConfig: return MFLOW_CONFIG_ERROR;
    case mflow::Errc::kEmptyIntersection: return MFLOW_EMPTY_INTERSECTION;
    case mflow::Errc::kNonFinite: return MFLOW_NON_FINITE;
    case mflow::Errc::kIo: return MFLOW_IO_ERROR;
    case mflow::Errc::kUnavailable: return MFLOW_UNAVAILABLE;
  }
  return MFLOW_INTERNAL;
}

// Logging goes to stderr so stdout stays machine-readable. MFLOW_LOG takes a
// spdlog level name (trace, debug, info, warn, err, critical, off).
void init_logging() {
  static std::once_flag once;
  std::call_once(once, [] {
    auto logger = spdlog::stderr_color_mt("mflow");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("MFLOW_LOG")) spdlog::set_level(spdlog::level::from_str(env));
  });
}

template <typename Fn>
mflow_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return MFLOW_OK;
  } catch (const mflow::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return MFLOW_INTERNAL;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* what) {
  if (!p) throw mflow::Error(mflow::Errc::kInvalidArgument, std::string(what) + " is NULL");
}

}  // namespace

extern "C" {

const char* mflow_version(void) { return "1.0.0"; }

const char* mflow_last_error(void) { return g_last_error.c_str(); }

void mflow_string_free(char* s) { std::free(s); }

mflow_status mflow_session_create(const char* config_json, const char* origin,
                                  const char* overrides_json, mflow_session** out) {
  init_logging();
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    auto s = std::make_unique<mflow_session>();
    s->config = mflow::parse_run_config(config_json ? config_json : "", origin ? origin : "config",
                                        overrides_json ? overrides_json : "");
    s->system = s->config.instance.system(s->config.tolerance);
    *out = s.release();
  });
}

void mflow_session_destroy(mflow_session* session) { delete session; }

size_t mflow_session_lambda_count(const mflow_session* session) {
  return session ? session->config.lambdas.size() : 0;
}

double mflow_session_lambda(const mflow_session* session, size_t i) {
  if (!session || i >= session->config.lambdas.size()) return 0.0;
  return session->config.lambdas[i];
}

const char* mflow_session_out_dir(const mflow_session* session) {
  return session ? session->config.out_dir.c_str() : ".";
}

int mflow_session_has_discrete(const mflow_session* session) {
  return session && session->system.discrete_map ? 1 : 0;
}

mflow_status mflow_session_solve(const mflow_session* session, mflow_trajectory** out) {
  return guarded([&] {
    require(session, "session");
    require(out, "out");
    *out = nullptr;
    const auto& cfg = session->config;
    auto t = std::make_unique<mflow_trajectory>();
    t->traj = mflow::solve(session->system, cfg.mode, cfg.lambdas.front(), cfg.stop, cfg.tolerance);
    *out = t.release();
  });
}

mflow_status mflow_session_integrate(const mflow_session* session, double lambda,
                                     mflow_trajectory** out) {
  return guarded([&] {
    require(session, "session");
    require(out, "out");
    *out = nullptr;
    const auto& cfg = session->config;
    auto t = std::make_unique<mflow_trajectory>();
    if (session->system.reference) {
      t->traj = mflow::integrate_horizon(session->system, lambda, cfg.t_end, cfg.tolerance);
    } else {
      t->traj = mflow::solve(session->system, mflow::SolveMode::kEuler, lambda, cfg.stop,
                             cfg.tolerance);
    }
    *out = t.release();
  });
}

mflow_status mflow_session_check(const mflow_session* session, mflow_report** out) {
  return guarded([&] {
    require(session, "session");
    require(out, "out");
    *out = nullptr;
    auto r = std::make_unique<mflow_report>();
    r->report = mflow::run_checks(session->config.instance, session->config.check_options());
    *out = r.release();
  });
}

void mflow_trajectory_destroy(mflow_trajectory* traj) { delete traj; }

size_t mflow_trajectory_length(const mflow_trajectory* traj) {
  return traj ? traj->traj.records.size() : 0;
}

size_t mflow_trajectory_dim(const mflow_trajectory* traj) {
  if (!traj || traj->traj.records.empty()) return 0;
  return static_cast<size_t>(traj->traj.records.front().x.size());
}

mflow_status mflow_trajectory_point(const mflow_trajectory* traj, size_t i, double* out) {
  return guarded([&] {
    require(traj, "trajectory");
    require(out, "out");
    if (i >= traj->traj.records.size()) {
      throw mflow::Error(mflow::Errc::kInvalidArgument, "record index out of range");
    }
    const auto& x = traj->traj.records[i].x;
    std::copy(x.begin(), x.end(), out);
  });
}

mflow_termination mflow_trajectory_termination(const mflow_trajectory* traj) {
  if (!traj) return MFLOW_TERM_BREAKDOWN;
  switch (traj->traj.termination) {
    case mflow::Termination::kResidual: return MFLOW_TERM_RESIDUAL;
    case mflow::Termination::kStep: return MFLOW_TERM_STEP;
    case mflow::Termination::kFieldZero: return MFLOW_TERM_FIELD_ZERO;
    case mflow::Termination::kMaxIter: return MFLOW_TERM_MAX_ITER;
    case mflow::Termination::kHorizon: return MFLOW_TERM_HORIZON;
    case mflow::Termination::kBreakdown: return MFLOW_TERM_BREAKDOWN;
  }
  return MFLOW_TERM_BREAKDOWN;
}

int mflow_trajectory_reference_error(const mflow_trajectory* traj, double* out) {
  if (!traj || !out || !traj->traj.reference_sup_error) return 0;
  *out = *traj->traj.reference_sup_error;
  return 1;
}

mflow_status mflow_trajectory_write_csv(const mflow_trajectory* traj, const char* path) {
  return guarded([&] {
    require(traj, "trajectory");
    require(path, "path");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw mflow::Error(mflow::Errc::kIo, std::string("cannot open ") + path);
    traj->traj.write_csv(os);
    if (!os) throw mflow::Error(mflow::Errc::kIo, std::string("write failed: ") + path);
  });
}

mflow_status mflow_trajectory_summary_json(const mflow_trajectory* traj, char** out) {
  return guarded([&] {
    require(traj, "trajectory");
    require(out, "out");
    *out = dup_string(traj->traj.summary().dump(2));
  });
}

void mflow_report_destroy(mflow_report* report) { delete report; }

int mflow_report_passed(const mflow_report* report) {
  return report && report->report.all_passed() ? 1 : 0;
}

mflow_status mflow_report_table(const mflow_report* report, char** out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    *out = dup_string(report->report.table());
  });
}

mflow_status mflow_report_json(const mflow_report* report, char** out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    *out = dup_string(report->report.to_json().dump(2));
  });
}

mflow_status mflow_project(const double* w, const double* b, const double* c, size_t n,
                           double* out, int* which_case) {
  return guarded([&] {
    require(w, "w");
    require(b, "b");
    require(c, "c");
    require(out, "out");
    if (n == 0) throw mflow::Error(mflow::Errc::kInvalidArgument, "dimension must be positive");
    using Map = Eigen::Map<const mflow::Vector>;
    const auto dim = static_cast<Eigen::Index>(n);
    const mflow::Vector wv = Map(w, dim), bv = Map(b, dim), cv = Map(c, dim);
    mflow::require_finite(wv, "w");
    mflow::require_finite(bv, "b");
    mflow::require_finite(cv, "c");
    const auto r = mflow::haugazeau_q(wv, bv, cv);
    std::copy(r.point.begin(), r.point.end(), out);
    if (which_case) *which_case = static_cast<int>(r.which);
  });
}

}  // extern "C"
