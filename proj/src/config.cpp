// Copyright 2026 The adiab Authors
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

#include "adiab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "adiab/errors.hpp"

namespace adiab {

namespace pt = boost::property_tree;

namespace {

const std::set<std::string> kModelKeys{"name", "energy", "gamma", "rate", "a", "b", "e1",
                                       "g1", "e2", "g2", "dim", "knots", "commutation_tol"};
const std::set<std::string> kRunKeys{"epsilon", "steps_per_epsilon", "paths", "seed",
                                     "order", "scheme", "out", "workers"};
const std::set<std::string> kVerifyKeys{"paths", "steps"};
const std::set<std::string> kConvergenceKeys{"paths"};
const std::set<std::string> kExpansionKeys{"paths"};

template <class T>
T parse_value(const std::string& key, const std::string& text) {
  try {
    return boost::lexical_cast<T>(boost::trim_copy(text));
  } catch (const boost::bad_lexical_cast&) {
    throw ConfigInvalid(key + ": cannot parse '" + text + "'");
  }
}

std::size_t parse_count(const std::string& key, const std::string& text) {
  const auto v = parse_value<long long>(key, text);
  if (v < 0) throw ConfigInvalid(key + ": must be non-negative");
  return static_cast<std::size_t>(v);
}

Matrix parse_matrix(const std::string& key, const std::string& text, std::size_t dim) {
  std::istringstream in(text);
  std::vector<double> v;
  std::string tok;
  while (in >> tok) v.push_back(parse_value<double>(key, tok));
  if (v.size() != 2 * dim * dim) {
    throw ConfigInvalid(key + ": expected " + std::to_string(2 * dim * dim) + " numbers, got " +
                        std::to_string(v.size()));
  }
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix m(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      const auto n = static_cast<std::size_t>(2 * (r * d + c));
      m(r, c) = cplx(v[n], v[n + 1]);
    }
  }
  return m;
}

void check_keys(const pt::ptree& section, const std::string& name,
                const std::set<std::string>& allowed, bool table_keys = false) {
  for (const auto& [key, _] : section) {
    if (allowed.count(key)) continue;
    if (table_keys && (boost::starts_with(key, "h.") || boost::starts_with(key, "g."))) continue;
    throw ConfigInvalid(name + "." + key + ": unknown key");
  }
}

}  // namespace

std::vector<double> parse_epsilon_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(","));
  std::vector<double> out;
  for (auto& p : parts) {
    boost::trim(p);
    if (p.empty()) continue;
    out.push_back(parse_value<double>("epsilon", p));
  }
  if (out.empty()) throw ConfigInvalid("epsilon: empty list");
  return out;
}

DephasingModel ExperimentConfig::build_model() const {
  auto get = [&](const std::string& key, double fallback) {
    const auto it = model_params.find(key);
    return it == model_params.end() ? fallback : it->second;
  };
  if (model == "rotating_dephasing") {
    return DephasingModel::rotating_dephasing(get("energy", 1.0), get("gamma", 1.0),
                                              get("rate", M_PI / 4));
  }
  if (model == "three_level") {
    return DephasingModel::three_level(get("a", M_PI / 4), get("b", M_PI / 6), get("e1", 1.0),
                                       get("g1", 1.0), get("e2", 2.5), get("g2", 0.6));
  }
  if (model == "table") return DephasingModel::table(table_h, table_g, commutation_tol);
  throw ConfigInvalid("model.name: unknown model '" + model + "'");
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.epsilons.empty()) throw ConfigInvalid("epsilon: at least one value required");
  for (double e : cfg.epsilons) {
    if (!(e > 0.0 && e <= 1.0)) {
      throw ConfigInvalid("epsilon: value " + std::to_string(e) + " outside (0, 1]");
    }
  }
  if (cfg.steps_per_epsilon < 50) throw ConfigInvalid("steps_per_epsilon: must be >= 50");
  if (cfg.paths < 1) throw ConfigInvalid("paths: must be >= 1");
  if (cfg.order > 3) throw ConfigInvalid("order: must be <= 3");
  if (cfg.verify_paths < 1) throw ConfigInvalid("verify.paths: must be >= 1");
  if (cfg.verify_steps < 1) throw ConfigInvalid("verify.steps: must be >= 1");
  if (cfg.convergence_paths < 2) throw ConfigInvalid("convergence.paths: must be >= 2");
  if (cfg.model != "rotating_dephasing" && cfg.model != "three_level" && cfg.model != "table") {
    throw ConfigInvalid("model.name: unknown model '" + cfg.model + "'");
  }
  if (cfg.model == "table" && (cfg.table_h.size() < 5 || cfg.table_h.size() != cfg.table_g.size())) {
    throw ConfigInvalid("model.knots: table model needs >= 5 knots of H and G");
  }
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigInvalid(std::string("config: ") + e.message() + " at line " +
                        std::to_string(e.line()));
  }
  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    if (section == "model") {
      check_keys(body, section, kModelKeys, true);
    } else if (section == "run") {
      check_keys(body, section, kRunKeys);
    } else if (section == "verify") {
      check_keys(body, section, kVerifyKeys);
    } else if (section == "convergence") {
      check_keys(body, section, kConvergenceKeys);
    } else if (section == "expansion") {
      check_keys(body, section, kExpansionKeys);
    } else {
      throw ConfigInvalid(section + ": unknown section");
    }
  }

  if (auto model = tree.get_child_optional("model")) {
    for (const auto& [key, node] : *model) {
      const std::string value = node.get_value<std::string>();
      if (key == "name") {
        cfg.model = boost::trim_copy(value);
      } else if (key == "commutation_tol") {
        cfg.commutation_tol = parse_value<double>("model." + key, value);
      } else if (key != "dim" && key != "knots" && !boost::starts_with(key, "h.") &&
                 !boost::starts_with(key, "g.")) {
        cfg.model_params[key] = parse_value<double>("model." + key, value);
      }
    }
    if (cfg.model == "table") {
      const auto dim = parse_count("model.dim", model->get<std::string>("dim", "0"));
      const auto knots = parse_count("model.knots", model->get<std::string>("knots", "0"));
      if (dim < 1) throw ConfigInvalid("model.dim: must be >= 1");
      for (std::size_t j = 0; j < knots; ++j) {
        for (const char* which : {"h", "g"}) {
          const std::string key = std::string(which) + "." + std::to_string(j);
          const auto node = model->get_optional<std::string>(pt::ptree::path_type(key, '/'));
          if (!node) throw ConfigInvalid("model." + key + ": missing table knot");
          auto& dst = which[0] == 'h' ? cfg.table_h : cfg.table_g;
          dst.push_back(parse_matrix("model." + key, *node, dim));
        }
      }
    }
  }
  if (auto run = tree.get_child_optional("run")) {
    for (const auto& [key, node] : *run) {
      const std::string value = node.get_value<std::string>();
      if (key == "epsilon") cfg.epsilons = parse_epsilon_list(value);
      if (key == "steps_per_epsilon") cfg.steps_per_epsilon = parse_count("steps_per_epsilon", value);
      if (key == "paths") cfg.paths = parse_count("paths", value);
      if (key == "seed") cfg.seed = parse_value<std::uint64_t>("seed", value);
      if (key == "order") cfg.order = parse_count("order", value);
      if (key == "workers") cfg.workers = parse_count("workers", value);
      if (key == "out") cfg.out_dir = boost::trim_copy(value);
      if (key == "scheme") {
        const std::string s = boost::trim_copy(value);
        if (s == "exponential") {
          cfg.scheme = Scheme::Exponential;
        } else if (s == "euler_maruyama") {
          cfg.scheme = Scheme::EulerMaruyama;
        } else {
          throw ConfigInvalid("scheme: expected exponential or euler_maruyama");
        }
      }
    }
  }
  if (auto v = tree.get_child_optional("verify")) {
    if (auto p = v->get_optional<std::string>("paths")) cfg.verify_paths = parse_count("verify.paths", *p);
    if (auto p = v->get_optional<std::string>("steps")) cfg.verify_steps = parse_count("verify.steps", *p);
  }
  if (auto c = tree.get_child_optional("convergence")) {
    if (auto p = c->get_optional<std::string>("paths")) {
      cfg.convergence_paths = parse_count("convergence.paths", *p);
    }
  }
  if (auto c = tree.get_child_optional("expansion")) {
    if (auto p = c->get_optional<std::string>("paths")) {
      cfg.expansion_paths = parse_count("expansion.paths", *p);
    }
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigInvalid("config: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace adiab
