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

// Batch driver. Exit codes:
//   0 success, 1 bad input or config, 2 iteration limit reached,
//   3 breakdown (empty intersection, non-finite values), 4 a check failed.

#include <fmt/format.h>

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "mflow/mflow.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

enum Exit { kOk = 0, kBadInput = 1, kMaxIter = 2, kBreakdown = 3, kCheckFailed = 4 };

struct Options {
  std::string instance;
  std::string config_path;
  std::string mode;
  std::optional<std::string> lambda;
  std::optional<std::size_t> max_iter;
  std::optional<double> tol_residual;
  std::optional<double> tol_step;
  std::optional<std::uint64_t> seed;
  std::string out;
};

struct SessionDeleter {
  void operator()(mflow_session* s) const { mflow_session_destroy(s); }
};
struct TrajectoryDeleter {
  void operator()(mflow_trajectory* t) const { mflow_trajectory_destroy(t); }
};
struct ReportDeleter {
  void operator()(mflow_report* r) const { mflow_report_destroy(r); }
};
using Session = std::unique_ptr<mflow_session, SessionDeleter>;
using TrajectoryPtr = std::unique_ptr<mflow_trajectory, TrajectoryDeleter>;
using Report = std::unique_ptr<mflow_report, ReportDeleter>;

int fail(int code, const std::string& message) {
  std::cerr << "mflow: " << message << "\n";
  return code;
}

int exit_for(mflow_status s) {
  switch (s) {
    case MFLOW_OK: return kOk;
    case MFLOW_EMPTY_INTERSECTION:
    case MFLOW_NON_FINITE: return kBreakdown;
    default: return kBadInput;
  }
}

std::string take(char* s) {
  std::string out = s ? s : "";
  mflow_string_free(s);
  return out;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--instance", o.instance, "built-in tag or instance JSON file");
  cmd->add_option("--config", o.config_path, "run configuration JSON file");
  cmd->add_option("--mode", o.mode, "discrete | euler")->check(CLI::IsMember({"discrete", "euler"}));
  cmd->add_option("--lambda", o.lambda, "comma-separated step sizes in (0, 1]");
  cmd->add_option("--max-iter", o.max_iter, "iteration limit");
  cmd->add_option("--tol-residual", o.tol_residual, "stop when the fixed-point residual drops below");
  cmd->add_option("--tol-step", o.tol_step, "stop when ||x_{n+1} - x_n|| drops below");
  cmd->add_option("--seed", o.seed, "sampling seed");
  cmd->add_option("--out", o.out, "output directory");
}

// Flags become a JSON object layered over the config file.
json overrides_of(const Options& o) {
  json j = json::object();
  if (!o.instance.empty()) j["instance"] = o.instance;
  if (!o.mode.empty()) j["mode"] = o.mode;
  if (o.lambda) {
    json list = json::array();
    std::stringstream ss(*o.lambda);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.find_first_not_of(" \t") == std::string::npos) continue;
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos) {
        throw std::invalid_argument(fmt::format("--lambda: \"{}\" is not a number", item));
      }
      list.push_back(v);
    }
    j["lambda"] = list;
  }
  if (o.max_iter) j["max_iter"] = *o.max_iter;
  if (o.tol_residual) j["tol_residual"] = *o.tol_residual;
  if (o.tol_step) j["tol_step"] = *o.tol_step;
  if (o.seed) j["seed"] = *o.seed;
  if (!o.out.empty()) j["out"] = o.out;
  return j;
}

// Builds the session; returns an exit code on failure.
std::variant<Session, int> open_session(const Options& o) {
  std::string text;
  std::string origin = "config";
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path, std::ios::binary);
    if (!in) return fail(kBadInput, fmt::format("cannot read config \"{}\"", o.config_path));
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
    origin = o.config_path;
  }
  std::string overrides;
  try {
    overrides = overrides_of(o).dump();
  } catch (const std::exception& e) {
    return fail(kBadInput, e.what());
  }
  mflow_session* raw = nullptr;
  const auto st = mflow_session_create(text.c_str(), origin.c_str(), overrides.c_str(), &raw);
  if (st != MFLOW_OK) return fail(kBadInput, mflow_last_error());
  return Session(raw);
}

std::optional<fs::path> prepare_out(const mflow_session* s) {
  fs::path dir = mflow_session_out_dir(s);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    fail(kBadInput, fmt::format("cannot create \"{}\": {}", dir.string(), ec.message()));
    return std::nullopt;
  }
  return dir;
}

int exit_for_termination(mflow_termination t) {
  switch (t) {
    case MFLOW_TERM_MAX_ITER: return kMaxIter;
    case MFLOW_TERM_BREAKDOWN: return kBreakdown;
    default: return kOk;
  }
}

int cmd_solve(const Options& o) {
  auto opened = open_session(o);
  if (auto* code = std::get_if<int>(&opened)) return *code;
  const Session session = std::move(std::get<Session>(opened));
  const auto dir = prepare_out(session.get());
  if (!dir) return kBadInput;

  mflow_trajectory* raw = nullptr;
  if (auto st = mflow_session_solve(session.get(), &raw); st != MFLOW_OK) {
    return fail(exit_for(st), mflow_last_error());
  }
  const TrajectoryPtr traj(raw);
  if (mflow_trajectory_write_csv(traj.get(), (*dir / "trajectory.csv").c_str()) != MFLOW_OK) {
    return fail(kBadInput, mflow_last_error());
  }
  char* summary = nullptr;
  if (mflow_trajectory_summary_json(traj.get(), &summary) != MFLOW_OK) {
    return fail(kBadInput, mflow_last_error());
  }
  const std::string text = take(summary);
  std::ofstream(*dir / "summary.json") << text << "\n";
  std::cout << text << "\n";
  return exit_for_termination(mflow_trajectory_termination(traj.get()));
}

int cmd_integrate(const Options& o) {
  auto opened = open_session(o);
  if (auto* code = std::get_if<int>(&opened)) return *code;
  const Session session = std::move(std::get<Session>(opened));
  const auto dir = prepare_out(session.get());
  if (!dir) return kBadInput;

  struct Row {
    double lambda;
    std::optional<double> error;
  };
  std::vector<Row> rows;
  int worst = kOk;
  for (std::size_t i = 0; i < mflow_session_lambda_count(session.get()); ++i) {
    const double lambda = mflow_session_lambda(session.get(), i);
    mflow_trajectory* raw = nullptr;
    if (auto st = mflow_session_integrate(session.get(), lambda, &raw); st != MFLOW_OK) {
      return fail(exit_for(st), mflow_last_error());
    }
    const TrajectoryPtr traj(raw);
    const auto file = *dir / fmt::format("trajectory_lambda_{}.csv", lambda);
    if (mflow_trajectory_write_csv(traj.get(), file.c_str()) != MFLOW_OK) {
      return fail(kBadInput, mflow_last_error());
    }
    Row row{lambda, std::nullopt};
    double err = 0.0;
    if (mflow_trajectory_reference_error(traj.get(), &err)) row.error = err;
    rows.push_back(row);
    worst = std::max(worst, exit_for_termination(mflow_trajectory_termination(traj.get())));
  }

  std::ofstream table(*dir / "convergence.csv");
  table << "lambda,sup_error,ratio\n";
  std::cout << fmt::format("{:>10} {:>24} {:>12}\n", "lambda", "sup_error", "ratio");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::string err = "nan", ratio = "nan";
    if (rows[i].error) err = fmt::format("{:.17g}", *rows[i].error);
    if (i > 0 && rows[i].error && rows[i - 1].error && *rows[i - 1].error > 0.0) {
      ratio = fmt::format("{:.17g}", *rows[i].error / *rows[i - 1].error);
    }
    table << fmt::format("{:.17g},{},{}\n", rows[i].lambda, err, ratio);
    std::cout << fmt::format("{:>10} {:>24} {:>12.6}\n", rows[i].lambda, err, ratio);
  }
  return worst;
}

int cmd_check(const Options& o) {
  auto opened = open_session(o);
  if (auto* code = std::get_if<int>(&opened)) return *code;
  const Session session = std::move(std::get<Session>(opened));
  const auto dir = prepare_out(session.get());
  if (!dir) return kBadInput;

  mflow_report* raw = nullptr;
  if (auto st = mflow_session_check(session.get(), &raw); st != MFLOW_OK) {
    return fail(exit_for(st), mflow_last_error());
  }
  const Report report(raw);
  char* table = nullptr;
  char* doc = nullptr;
  if (mflow_report_table(report.get(), &table) != MFLOW_OK ||
      mflow_report_json(report.get(), &doc) != MFLOW_OK) {
    return fail(kBadInput, mflow_last_error());
  }
  std::cout << take(table);
  std::ofstream(*dir / "report.json") << take(doc) << "\n";
  return mflow_report_passed(report.get()) ? kOk : kCheckFailed;
}

std::vector<double> parse_point(const std::string& text, const char* name) {
  const json j = json::parse(text);
  if (!j.is_array() || j.empty()) throw std::invalid_argument(fmt::format("{}: expected a JSON array", name));
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw std::invalid_argument(fmt::format("{}: entries must be numbers", name));
    out.push_back(v.get<double>());
  }
  return out;
}

int cmd_project(const std::string& w_text, const std::string& b_text, const std::string& c_text) {
  std::vector<double> w, b, c;
  try {
    w = parse_point(w_text, "w");
    b = parse_point(b_text, "b");
    c = parse_point(c_text, "c");
  } catch (const std::exception& e) {
    return fail(kBadInput, e.what());
  }
  if (w.size() != b.size() || w.size() != c.size()) {
    return fail(kBadInput, "w, b and c must have equal dimensions");
  }
  std::vector<double> out(w.size());
  int which = 0;
  const auto st = mflow_project(w.data(), b.data(), c.data(), w.size(), out.data(), &which);
  if (st == MFLOW_EMPTY_INTERSECTION) return fail(kBreakdown, "empty intersection");
  if (st != MFLOW_OK) return fail(exit_for(st), mflow_last_error());
  static const char* kCase[] = {"", "i", "ii", "iii"};
  json point = out;
  std::cout << point.dump() << "\ncase (" << kCase[which] << ")\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Best-approximation flows for monotone inclusions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mflow_version()));

  Options opts;
  auto* solve = app.add_subcommand("solve", "run the discrete scheme or an Euler flow to convergence");
  auto* integrate = app.add_subcommand("integrate", "Euler trajectories for a list of step sizes");
  auto* check = app.add_subcommand("check", "sampled assumption checks");
  add_common(solve, opts);
  add_common(integrate, opts);
  add_common(check, opts);

  std::string w, b, c;
  auto* project = app.add_subcommand("project", "project w onto H(w,b) n H(b,c)");
  project->add_option("w", w, "JSON array")->required();
  project->add_option("b", b, "JSON array")->required();
  project->add_option("c", c, "JSON array")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }

  if (*solve) return cmd_solve(opts);
  if (*integrate) return cmd_integrate(opts);
  if (*check) return cmd_check(opts);
  return cmd_project(w, b, c);
}
