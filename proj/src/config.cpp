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

#include "mflow/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

namespace mflow {

namespace {

using nlohmann::json;

const std::set<std::string> kKnownKeys = {
    "instance", "mode",      "lambda",  "max_iter",       "tol_residual", "tol_step",
    "tolerance", "seed",     "samples", "cap_r_fraction", "t_end",        "out"};

// 1-based line and column of a byte offset.
std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// A parsed document plus enough context to point at a key when its value is
// rejected after parsing.
class Source {
 public:
  Source(std::string text, std::string origin) : text_(std::move(text)), origin_(std::move(origin)) {}

  json parse() const {
    if (std::all_of(text_.begin(), text_.end(), [](unsigned char c) { return std::isspace(c); })) {
      return json::object();
    }
    try {
      return json::parse(text_);
    } catch (const json::parse_error& e) {
      // e.byte is one past the offending character.
      const auto [line, col] = line_col(text_, e.byte == 0 ? 0 : e.byte - 1);
      std::string what = e.what();
      if (auto pos = what.find("parse error"); pos != std::string::npos) what = what.substr(pos);
      throw Error(Errc::kConfig, fmt::format("{}:{}:{}: {}", origin_, line, col, what));
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    const auto pos = text_.find('"' + key + '"');
    if (pos == std::string::npos) {
      throw Error(Errc::kConfig, fmt::format("{}: \"{}\": {}", origin_, key, message));
    }
    const auto [line, col] = line_col(text_, pos);
    throw Error(Errc::kConfig, fmt::format("{}:{}:{}: \"{}\": {}", origin_, line, col, key, message));
  }

 private:
  std::string text_;
  std::string origin_;
};

NamedInstance instance_from_object(const json& j, const std::string& fallback_tag) {
  NamedInstance named;
  named.tag = j.contains("name") && j.at("name").is_string() ? j.at("name").get<std::string>()
                                                               : fallback_tag;
  named.instance = instance_from_json(j);
  if (j.contains("oracle")) {
    named.oracle = j.at("oracle").get<PDPoint>();
    validate_oracle(named);
  }
  return named;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kConfig, fmt::format("cannot read \"{}\"", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Converts library exceptions raised while interpreting one key into a
// located config error.
template <typename Fn>
auto with_key(const Source& src, const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    src.fail(key, e.what());
  } catch (const json::exception& e) {
    src.fail(key, e.what());
  }
}

double positive_number(const json& v) {
  if (!v.is_number()) throw Error(Errc::kConfig, "expected a number");
  const double x = v.get<double>();
  if (!(x > 0.0) || !std::isfinite(x)) throw Error(Errc::kConfig, "must be positive and finite");
  return x;
}

std::uint64_t unsigned_integer(const json& v) {
  if (!v.is_number_unsigned()) throw Error(Errc::kConfig, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

void apply(RunConfig& cfg, const json& doc, const Source& src) {
  if (!doc.is_object()) throw Error(Errc::kConfig, "config: expected a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kKnownKeys.count(key)) src.fail(key, "unknown key");
    with_key(src, key, [&, &key = key, &value = value] {
      if (key == "instance") {
        cfg.instance = value.is_string() ? resolve_instance(value.get<std::string>())
                                         : instance_from_object(value, "custom");
      } else if (key == "mode") {
        const auto m = value.get<std::string>();
        if (m == "discrete") {
          cfg.mode = SolveMode::kDiscrete;
        } else if (m == "euler") {
          cfg.mode = SolveMode::kEuler;
        } else {
          throw Error(Errc::kConfig, "expected \"discrete\" or \"euler\"");
        }
      } else if (key == "lambda") {
        cfg.lambdas.clear();
        if (value.is_array()) {
          for (const auto& x : value) cfg.lambdas.push_back(positive_number(x));
        } else {
          cfg.lambdas.push_back(positive_number(value));
        }
      } else if (key == "max_iter") {
        cfg.stop.max_iter = unsigned_integer(value);
      } else if (key == "tol_residual") {
        cfg.stop.tol_residual = positive_number(value);
      } else if (key == "tol_step") {
        cfg.stop.tol_step = positive_number(value);
      } else if (key == "tolerance") {
        cfg.tolerance = positive_number(value);
      } else if (key == "seed") {
        cfg.seed = unsigned_integer(value);
      } else if (key == "samples") {
        cfg.samples = unsigned_integer(value);
      } else if (key == "cap_r_fraction") {
        cfg.cap_r_fraction = positive_number(value);
      } else if (key == "t_end") {
        cfg.t_end = positive_number(value);
      } else if (key == "out") {
        cfg.out_dir = value.get<std::string>();
      }
      return 0;
    });
  }
}

}  // namespace

void RunConfig::validate() const {
  if (!instance.instance && !instance.fixture) throw Error(Errc::kConfig, "config: no instance selected");
  if (lambdas.empty()) throw Error(Errc::kConfig, "config: empty lambda list");
  for (double l : lambdas) {
    if (!(l > 0.0 && l <= 1.0)) {
      throw Error(Errc::kConfig, fmt::format("config: lambda = {} must lie in (0, 1]", l));
    }
  }
  if (samples == 0) throw Error(Errc::kConfig, "config: samples must be positive");
  if (!(cap_r_fraction < 1.0)) throw Error(Errc::kConfig, "config: cap_r_fraction must be < 1");
  try {
    stop.validate();
  } catch (const Error& e) {
    throw Error(Errc::kConfig, fmt::format("config: {}", e.what()));
  }
}

CheckOptions RunConfig::check_options() const {
  CheckOptions o;
  o.samples = samples;
  o.seed = seed;
  o.tol = tolerance;
  o.r_fraction = cap_r_fraction;
  o.stop = stop;
  return o;
}

NamedInstance resolve_instance(const std::string& selector) {
  const auto tags = builtin_tags();
  if (std::find(tags.begin(), tags.end(), selector) != tags.end()) return builtin_instance(selector);
  if (!std::filesystem::is_regular_file(selector)) {
    throw Error(Errc::kConfig,
                fmt::format("\"{}\" is neither a built-in instance nor a readable file", selector));
  }
  const Source src(read_file(selector), selector);
  const json doc = src.parse();
  try {
    return instance_from_object(doc, std::filesystem::path(selector).stem().string());
  } catch (const Error& e) {
    throw Error(Errc::kConfig, fmt::format("{}: {}", selector, e.what()));
  } catch (const json::exception& e) {
    throw Error(Errc::kConfig, fmt::format("{}: {}", selector, e.what()));
  }
}

RunConfig parse_run_config(const std::string& text, const std::string& origin,
                           const std::string& overrides) {
  RunConfig cfg;
  const Source base(text, origin);
  const Source extra(overrides, "command line");
  json merged_base = base.parse();
  const json merged_extra = extra.parse();
  if (!merged_base.is_object()) throw Error(Errc::kConfig, fmt::format("{}: expected a JSON object", origin));
  // An instance given on the command line wins; parse the file first so its
  // own errors are still reported against the file.
  if (merged_extra.is_object() && merged_extra.contains("instance")) merged_base.erase("instance");
  apply(cfg, merged_base, base);
  apply(cfg, merged_extra, extra);
  cfg.validate();
  return cfg;
}

}  // namespace mflow
