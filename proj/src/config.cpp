#include "tubular/config.hpp"

#include "tubular/catalog.hpp"
#include "tubular/expr.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace tubular {

namespace {

using nlohmann::json;

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : obj.items())
    if (!ok.count(item.key())) throw ConfigError(where + ": unknown key '" + item.key() + "'");
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(where + ": not finite");
  return v;
}

Vector number_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected a list of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = number(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + ": expected a string");
  return j.get<std::string>();
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return j.get<int>();
}

Expr parse_field(const std::string& source, const std::string& where) {
  try {
    return parse_expr(source);
  } catch (const ParseError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

AmbientConfig parse_ambient(const json& j) {
  only_keys(j, "ambient", {"type", "dim", "k", "conformal_factor", "metric"});
  AmbientConfig a;
  if (!j.contains("type")) throw ConfigError("ambient: missing 'type'");
  a.type = text(j["type"], "ambient.type");
  if (a.type != "euclidean" && a.type != "space_form" && a.type != "custom")
    throw ConfigError("ambient.type: expected euclidean, space_form or custom, got '" + a.type + "'");
  if (j.contains("dim")) {
    a.dim = integer(j["dim"], "ambient.dim");
    if (a.dim < 2) throw ConfigError("ambient.dim: must be at least 2");
  }
  if (j.contains("k")) {
    if (a.type != "space_form") throw ConfigError("ambient.k: only valid for space_form");
    a.k = number(j["k"], "ambient.k");
  } else if (a.type == "space_form") {
    throw ConfigError("ambient: space_form needs 'k'");
  }
  const bool has_cf = j.contains("conformal_factor"), has_metric = j.contains("metric");
  if ((has_cf || has_metric) && a.type != "custom")
    throw ConfigError("ambient: metric expressions are only valid for type custom");
  if (a.type == "custom") {
    if (has_cf == has_metric)
      throw ConfigError("ambient: custom needs exactly one of 'conformal_factor' or 'metric'");
    if (has_cf) {
      a.conformal_factor = text(j["conformal_factor"], "ambient.conformal_factor");
      parse_field(a.conformal_factor, "ambient.conformal_factor");
    } else {
      const json& m = j["metric"];
      if (!m.is_array() || m.empty()) throw ConfigError("ambient.metric: expected a square list of lists");
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (!m[i].is_array() || m[i].size() != m.size())
          throw ConfigError("ambient.metric: expected a square list of lists");
        std::vector<std::string> row;
        for (std::size_t c = 0; c < m.size(); ++c) {
          const std::string where = "ambient.metric[" + std::to_string(i) + "][" + std::to_string(c) + "]";
          row.push_back(text(m[i][c], where));
          parse_field(row.back(), where);
        }
        a.metric.push_back(std::move(row));
      }
      const int n = static_cast<int>(a.metric.size());
      if (a.dim != 0 && a.dim != n) throw ConfigError("ambient.metric: size disagrees with ambient.dim");
      a.dim = n;
    }
  }
  return a;
}

SubmanifoldConfig parse_submanifold(const json& j) {
  only_keys(j, "submanifold", {"builtin", "params", "coordinates", "n_params"});
  SubmanifoldConfig s;
  const bool builtin = j.contains("builtin"), custom = j.contains("coordinates");
  if (builtin == custom) throw ConfigError("submanifold: give exactly one of 'builtin' or 'coordinates'");
  if (builtin) {
    if (j.contains("n_params")) throw ConfigError("submanifold.n_params: only valid with coordinates");
    s.builtin = text(j["builtin"], "submanifold.builtin");
    try {
      builtin_info(s.builtin);
    } catch (const Error& e) {
      throw ConfigError(std::string("submanifold.builtin: ") + e.what());
    }
    if (j.contains("params")) {
      const json& params = j["params"];
      if (!params.is_object()) throw ConfigError("submanifold.params: expected an object");
      for (const auto& item : params.items())
        s.params[item.key()] = number(item.value(), "submanifold.params." + item.key());
    }
  } else {
    if (j.contains("params")) throw ConfigError("submanifold.params: only valid with builtin");
    const json& c = j["coordinates"];
    if (!c.is_array() || c.size() < 2) throw ConfigError("submanifold.coordinates: expected at least two expressions");
    for (std::size_t i = 0; i < c.size(); ++i) {
      const std::string where = "submanifold.coordinates[" + std::to_string(i) + "]";
      s.coordinates.push_back(text(c[i], where));
      parse_field(s.coordinates.back(), where);
    }
    if (!j.contains("n_params")) throw ConfigError("submanifold: custom coordinates need 'n_params'");
    s.n_params = integer(j["n_params"], "submanifold.n_params");
    if (s.n_params < 1 || s.n_params >= static_cast<int>(s.coordinates.size()))
      throw ConfigError("submanifold.n_params: must be between 1 and the ambient dimension - 1");
  }
  return s;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  only_keys(root, "config",
            {"ambient", "submanifold", "base_points", "normals", "radii", "samples", "seed", "tolerances"});
  RunConfig cfg;
  if (root.contains("ambient")) cfg.ambient = parse_ambient(root["ambient"]);
  if (!root.contains("submanifold")) throw ConfigError("config: missing 'submanifold'");
  cfg.submanifold = parse_submanifold(root["submanifold"]);

  if (root.contains("base_points")) {
    const json& b = root["base_points"];
    if (!b.is_array() || b.empty()) throw ConfigError("base_points: expected a nonempty list");
    for (std::size_t i = 0; i < b.size(); ++i)
      cfg.base_points.push_back(number_list(b[i], "base_points[" + std::to_string(i) + "]"));
  } else if (cfg.submanifold.builtin.empty()) {
    throw ConfigError("config: custom submanifolds need 'base_points'");
  }

  if (root.contains("normals")) {
    const json& n = root["normals"];
    if (n.is_string()) {
      if (n.get<std::string>() != "all-frame")
        throw ConfigError("normals: expected \"all-frame\" or a list of coefficient vectors");
    } else {
      if (!n.is_array() || n.empty()) throw ConfigError("normals: expected \"all-frame\" or a nonempty list");
      cfg.all_frame_normals = false;
      for (std::size_t i = 0; i < n.size(); ++i)
        cfg.normals.push_back(number_list(n[i], "normals[" + std::to_string(i) + "]"));
    }
  }

  if (root.contains("radii")) {
    const Vector r = number_list(root["radii"], "radii");
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      if (!(r[i] > 0.0)) throw ConfigError("radii: must be positive");
      cfg.radii.push_back(r[i]);
    }
  }
  if (root.contains("samples")) {
    cfg.samples = integer(root["samples"], "samples");
    if (cfg.samples < 1) throw ConfigError("samples: must be at least 1");
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_integer() || root["seed"].get<long long>() < 0)
      throw ConfigError("seed: expected a nonnegative integer");
    cfg.seed = root["seed"].get<std::uint64_t>();
  }
  if (root.contains("tolerances")) {
    const json& t = root["tolerances"];
    only_keys(t, "tolerances", {"ode", "fd"});
    if (t.contains("ode")) cfg.tolerances.ode = number(t["ode"], "tolerances.ode");
    if (t.contains("fd")) cfg.tolerances.fd = number(t["fd"], "tolerances.fd");
    if (!(cfg.tolerances.ode > 0.0) || !(cfg.tolerances.fd > 0.0))
      throw ConfigError("tolerances: must be positive");
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::shared_ptr<const AmbientSpace> build_ambient(const AmbientConfig& a, double fd_step) {
  if (a.dim < 2) throw ConfigError("ambient: dimension unknown; set ambient.dim");
  if (a.type == "euclidean") return std::make_shared<AmbientSpace>(AmbientSpace::euclidean(a.dim));
  if (a.type == "space_form") return std::make_shared<AmbientSpace>(AmbientSpace::space_form(a.dim, a.k));

  const int n = a.dim;
  AmbientSpace::MetricFn metric;
  if (!a.conformal_factor.empty()) {
    const Expr factor = parse_expr(a.conformal_factor);
    if (factor.arity() > n) throw ConfigError("ambient.conformal_factor: uses more than t1..t" + std::to_string(n));
    metric = [factor, n](const Vector& x) {
      return Matrix(factor.eval({x.data(), static_cast<std::size_t>(n)}) * Matrix::Identity(n, n));
    };
  } else {
    std::vector<Expr> entries;
    for (const auto& row : a.metric)
      for (const auto& e : row) {
        entries.push_back(parse_expr(e));
        if (entries.back().arity() > n) throw ConfigError("ambient.metric: uses more than t1..t" + std::to_string(n));
      }
    metric = [entries, n](const Vector& x) {
      Matrix g(n, n);
      const std::span<const double> vars(x.data(), static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = entries[static_cast<std::size_t>(i * n + j)].eval(vars);
      return g;
    };
  }
  // Points where the metric is not finite or not positive definite are outside the domain.
  AmbientSpace::DomainFn domain = [metric](const Vector& x) {
    const Matrix g = metric(x);
    if (!g.allFinite()) return false;
    if ((g - g.transpose()).norm() > 1e-12 * std::max(1.0, g.norm())) return false;
    Eigen::LLT<Matrix> llt(g);
    return llt.info() == Eigen::Success;
  };
  const AmbientSpace custom = AmbientSpace::custom(n, metric, domain);
  return std::make_shared<AmbientSpace>(custom.with_finite_differences(fd_step));
}

Scene build_scene(const RunConfig& cfg) {
  Scene scene;
  const SubmanifoldConfig& sub = cfg.submanifold;
  const double fd = cfg.tolerances.fd;

  if (!sub.builtin.empty()) {
    std::shared_ptr<const AmbientSpace> amb;
    std::map<std::string, double> params = sub.params;
    if (cfg.ambient) {
      // chart curves of the space-form builtins are only geodesic/latitude for their own k
      bool has_k = false;
      for (const auto& bp : builtin_info(sub.builtin).parameters) has_k = has_k || bp.name == "k";
      if (has_k) {
        if (cfg.ambient->type != "space_form")
          throw ConfigError("submanifold: builtin '" + sub.builtin + "' lives in a space form");
        auto it = params.find("k");
        if (it == params.end())
          params["k"] = cfg.ambient->k;
        else if (it->second != cfg.ambient->k)
          throw ConfigError("submanifold.params.k disagrees with ambient.k");
      }
    }
    if (cfg.ambient) {
      AmbientConfig a = *cfg.ambient;
      if (a.dim == 0) a.dim = builtin_ambient(sub.builtin, params)->dim();
      amb = build_ambient(a, fd);
    }
    try {
      scene.immersion = std::make_shared<Immersion>(make_builtin(sub.builtin, params, amb));
    } catch (const PreconditionError& e) {
      throw ConfigError(std::string("submanifold: ") + e.what());
    }
    scene.base_points = cfg.base_points.empty() ? builtin_info(sub.builtin).base_points : cfg.base_points;
    scene.label = sub.builtin;
  } else {
    const int dim = static_cast<int>(sub.coordinates.size());
    AmbientConfig a = cfg.ambient.value_or(AmbientConfig{"euclidean", dim, 0.0, {}, {}});
    if (a.dim == 0) a.dim = dim;
    if (a.dim != dim)
      throw ConfigError("submanifold.coordinates: " + std::to_string(dim) + " expressions for a " +
                        std::to_string(a.dim) + "-dimensional ambient");
    std::vector<Expr> coords;
    for (const auto& c : sub.coordinates) {
      coords.push_back(parse_expr(c));
      if (coords.back().arity() > sub.n_params)
        throw ConfigError("submanifold.coordinates: '" + c + "' uses more than t1..t" +
                          std::to_string(sub.n_params));
    }
    const int n = sub.n_params;
    Immersion::MapFn map = [coords, n](const Vector& q) {
      Vector x(static_cast<Eigen::Index>(coords.size()));
      const std::span<const double> vars(q.data(), static_cast<std::size_t>(n));
      for (std::size_t i = 0; i < coords.size(); ++i) x[static_cast<Eigen::Index>(i)] = coords[i].eval(vars);
      return x;
    };
    for (const Vector& q : cfg.base_points)
      if (q.size() != n) throw ConfigError("base_points: expected " + std::to_string(n) + " parameters per point");
    try {
      scene.immersion = std::make_shared<Immersion>(build_ambient(a, fd), n, map, Immersion::JacobianFn{},
                                                    Immersion::HessianFn{}, cfg.base_points, fd);
    } catch (const PreconditionError& e) {
      throw ConfigError(std::string("submanifold: ") + e.what());
    }
    scene.base_points = cfg.base_points;
    scene.label = "custom";
  }
  scene.ambient = scene.immersion->ambient_ptr();

  const Immersion& imm = *scene.immersion;
  for (std::size_t i = 0; i < scene.base_points.size(); ++i) {
    const Vector& q = scene.base_points[i];
    if (q.size() != imm.n_params())
      throw ConfigError("base_points[" + std::to_string(i) + "]: expected " + std::to_string(imm.n_params()) +
                        " parameters");
    if (!imm.ambient().in_domain(imm.point(q)))
      throw ConfigError("base_points[" + std::to_string(i) + "]: point lies outside the ambient chart");
  }
  const int p = imm.codim();
  if (cfg.all_frame_normals) {
    for (int a = 0; a < p; ++a) scene.normals.push_back(Vector::Unit(p, a));
  } else {
    for (std::size_t i = 0; i < cfg.normals.size(); ++i) {
      const Vector& c = cfg.normals[i];
      if (c.size() != p)
        throw ConfigError("normals[" + std::to_string(i) + "]: expected " + std::to_string(p) + " coefficients");
      if (std::abs(c.norm() - 1.0) > 1e-12)
        throw ConfigError("normals[" + std::to_string(i) + "]: coefficient vector must have unit length");
      scene.normals.push_back(c);
    }
  }
  return scene;
}

}  // namespace tubular
