#include "tubular/catalog.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace tubular {

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

std::vector<BuiltinInfo> make_catalog() {
  const double pi = std::numbers::pi;
  return {
      {"circle", "R^2", {{"rho", 1.0, "radius"}}, "q in R (angle)", {vec({0.0}), vec({2.0})}, false},
      {"sphere", "R^3", {{"rho", 1.0, "radius"}},
       "(theta, phi) with 0 < theta < pi (polar angle, azimuth)", {vec({1.0, 0.5}), vec({2.0, 4.0})}, false},
      {"torus", "R^3", {{"R", 2.0, "center-line radius"}, {"rho", 0.5, "tube radius"}},
       "(u, v) in R^2, rho < R", {vec({0.3, 0.7}), vec({2.5, 4.0})}, false},
      {"helix", "R^3", {{"a", 1.0, "radius"}, {"b", 0.5, "pitch / (2 pi)"}},
       "q in R", {vec({0.0}), vec({1.3})}, false},
      {"line", "R^3", {}, "q in R (x-axis)", {vec({0.0}), vec({2.0})}, true},
      {"plane", "R^4", {}, "(q1, q2) in R^2 (span of e1, e2)", {vec({0.0, 0.0}), vec({0.5, -1.0})}, true},
      {"equator", "S^2(k)", {{"k", 1.0, "ambient curvature (> 0)"}},
       "arclength q with |q| < pi / (2 sqrt k); geodesic through the chart origin",
       {vec({0.0}), vec({0.3})}, true},
      {"latitude-circle", "S^2(k)",
       {{"k", 1.0, "ambient curvature (> 0)"}, {"phi", pi / 4, "latitude in (0, pi/2) about the chart origin"}},
       "angle q in R; circle at distance (pi/2 - phi)/sqrt(k) from the chart origin",
       {vec({0.0}), vec({1.0})}, false},
      {"geodesic-line", "H^2(k)", {{"k", -1.0, "ambient curvature (< 0)"}},
       "arclength q in R; geodesic through the chart origin", {vec({0.0}), vec({0.4})}, true},
  };
}

double param(const std::map<std::string, double>& params, const BuiltinInfo& info,
             const std::string& name) {
  auto it = params.find(name);
  if (it != params.end()) return it->second;
  for (const auto& p : info.parameters)
    if (p.name == name) return p.default_value;
  throw PreconditionError("builtin '" + info.name + "' has no parameter '" + name + "'");
}

void check_params(const std::map<std::string, double>& params, const BuiltinInfo& info) {
  for (const auto& [name, value] : params) {
    bool known = false;
    for (const auto& p : info.parameters) known = known || p.name == name;
    if (!known)
      throw PreconditionError("builtin '" + info.name + "' has no parameter '" + name + "'");
    if (!std::isfinite(value))
      throw PreconditionError("builtin '" + info.name + "': parameter '" + name + "' is not finite");
  }
}

Matrix hessian_1d(const Vector& second) {
  Matrix h(second.size(), 1);
  h.col(0) = second;
  return h;
}

// Arclength parametrization of the chart line through the origin of a
// conformal space-form chart: t' = 1 + (k/4) t^2 = 1 / lambda.
double radial_coordinate(double k, double q) {
  if (k > 0) return 2.0 / std::sqrt(k) * std::tan(0.5 * std::sqrt(k) * q);
  if (k < 0) return 2.0 / std::sqrt(-k) * std::tanh(0.5 * std::sqrt(-k) * q);
  return q;
}

}  // namespace

const std::vector<BuiltinInfo>& catalog() {
  static const std::vector<BuiltinInfo> entries = make_catalog();
  return entries;
}

const BuiltinInfo& builtin_info(std::string_view name) {
  for (const auto& e : catalog())
    if (e.name == name) return e;
  throw PreconditionError("unknown builtin '" + std::string(name) + "'");
}

std::shared_ptr<const AmbientSpace> builtin_ambient(std::string_view name,
                                                    const std::map<std::string, double>& params) {
  const BuiltinInfo& info = builtin_info(name);
  check_params(params, info);
  if (name == "circle") return std::make_shared<AmbientSpace>(AmbientSpace::euclidean(2));
  if (name == "plane") return std::make_shared<AmbientSpace>(AmbientSpace::euclidean(4));
  if (name == "equator" || name == "latitude-circle" || name == "geodesic-line") {
    const double k = param(params, info, "k");
    return std::make_shared<AmbientSpace>(AmbientSpace::space_form(2, k));
  }
  return std::make_shared<AmbientSpace>(AmbientSpace::euclidean(3));
}

Immersion make_builtin(std::string_view name, const std::map<std::string, double>& params,
                       std::shared_ptr<const AmbientSpace> ambient) {
  const BuiltinInfo& info = builtin_info(name);
  check_params(params, info);
  auto default_ambient = builtin_ambient(name, params);
  if (!ambient) {
    ambient = default_ambient;
  } else if (ambient->dim() != default_ambient->dim()) {
    std::ostringstream os;
    os << "builtin '" << name << "' needs a " << default_ambient->dim()
       << "-dimensional ambient, got " << ambient->dim();
    throw PreconditionError(os.str());
  }
  const auto& probes = info.base_points;

  if (name == "circle") {
    const double rho = param(params, info, "rho");
    if (!(rho > 0)) throw PreconditionError("circle: rho must be positive");
    return Immersion(
        ambient, 1,
        [rho](const Vector& q) { return Vector(vec({rho * std::cos(q[0]), rho * std::sin(q[0])})); },
        [rho](const Vector& q) {
          return Matrix(hessian_1d(vec({-rho * std::sin(q[0]), rho * std::cos(q[0])})));
        },
        [rho](const Vector& q) {
          return hessian_1d(vec({-rho * std::cos(q[0]), -rho * std::sin(q[0])}));
        },
        probes);
  }
  if (name == "sphere") {
    const double rho = param(params, info, "rho");
    if (!(rho > 0)) throw PreconditionError("sphere: rho must be positive");
    return Immersion(
        ambient, 2,
        [rho](const Vector& q) {
          const double st = std::sin(q[0]), ct = std::cos(q[0]);
          const double sp = std::sin(q[1]), cp = std::cos(q[1]);
          return Vector(rho * vec({st * cp, st * sp, ct}));
        },
        [rho](const Vector& q) {
          const double st = std::sin(q[0]), ct = std::cos(q[0]);
          const double sp = std::sin(q[1]), cp = std::cos(q[1]);
          Matrix j(3, 2);
          j.col(0) = rho * vec({ct * cp, ct * sp, -st});
          j.col(1) = rho * vec({-st * sp, st * cp, 0.0});
          return j;
        },
        [rho](const Vector& q) {
          const double st = std::sin(q[0]), ct = std::cos(q[0]);
          const double sp = std::sin(q[1]), cp = std::cos(q[1]);
          Matrix h(3, 4);
          h.col(0) = rho * vec({-st * cp, -st * sp, -ct});
          h.col(1) = rho * vec({-ct * sp, ct * cp, 0.0});
          h.col(2) = h.col(1);
          h.col(3) = rho * vec({-st * cp, -st * sp, 0.0});
          return h;
        },
        probes);
  }
  if (name == "torus") {
    const double big = param(params, info, "R");
    const double rho = param(params, info, "rho");
    if (!(rho > 0 && big > rho)) throw PreconditionError("torus: need 0 < rho < R");
    return Immersion(
        ambient, 2,
        [big, rho](const Vector& q) {
          const double w = big + rho * std::cos(q[1]);
          return Vector(vec({w * std::cos(q[0]), w * std::sin(q[0]), rho * std::sin(q[1])}));
        },
        [big, rho](const Vector& q) {
          const double su = std::sin(q[0]), cu = std::cos(q[0]);
          const double sv = std::sin(q[1]), cv = std::cos(q[1]);
          const double w = big + rho * cv;
          Matrix j(3, 2);
          j.col(0) = vec({-w * su, w * cu, 0.0});
          j.col(1) = vec({-rho * sv * cu, -rho * sv * su, rho * cv});
          return j;
        },
        [big, rho](const Vector& q) {
          const double su = std::sin(q[0]), cu = std::cos(q[0]);
          const double sv = std::sin(q[1]), cv = std::cos(q[1]);
          const double w = big + rho * cv;
          Matrix h(3, 4);
          h.col(0) = vec({-w * cu, -w * su, 0.0});
          h.col(1) = vec({rho * sv * su, -rho * sv * cu, 0.0});
          h.col(2) = h.col(1);
          h.col(3) = vec({-rho * cv * cu, -rho * cv * su, -rho * sv});
          return h;
        },
        probes);
  }
  if (name == "helix") {
    const double a = param(params, info, "a");
    const double b = param(params, info, "b");
    if (!(a > 0)) throw PreconditionError("helix: a must be positive");
    return Immersion(
        ambient, 1,
        [a, b](const Vector& q) {
          return Vector(vec({a * std::cos(q[0]), a * std::sin(q[0]), b * q[0]}));
        },
        [a, b](const Vector& q) {
          return hessian_1d(vec({-a * std::sin(q[0]), a * std::cos(q[0]), b}));
        },
        [a](const Vector& q) {
          return hessian_1d(vec({-a * std::cos(q[0]), -a * std::sin(q[0]), 0.0}));
        },
        probes);
  }
  if (name == "line") {
    return Immersion(
        ambient, 1, [](const Vector& q) { return Vector(vec({q[0], 0.0, 0.0})); },
        [](const Vector&) { return hessian_1d(vec({1.0, 0.0, 0.0})); },
        [](const Vector&) { return Matrix(Matrix::Zero(3, 1)); }, probes);
  }
  if (name == "plane") {
    return Immersion(
        ambient, 2, [](const Vector& q) { return Vector(vec({q[0], q[1], 0.0, 0.0})); },
        [](const Vector&) {
          Matrix j = Matrix::Zero(4, 2);
          j(0, 0) = 1.0;
          j(1, 1) = 1.0;
          return j;
        },
        [](const Vector&) { return Matrix(Matrix::Zero(4, 4)); }, probes);
  }
  if (name == "equator" || name == "geodesic-line") {
    const double k = param(params, info, "k");
    if (name == "equator" && !(k > 0)) throw PreconditionError("equator: k must be positive");
    if (name == "geodesic-line" && !(k < 0))
      throw PreconditionError("geodesic-line: k must be negative");
    return Immersion(
        ambient, 1,
        [k](const Vector& q) { return Vector(vec({radial_coordinate(k, q[0]), 0.0})); },
        [k](const Vector& q) {
          const double t = radial_coordinate(k, q[0]);
          return hessian_1d(vec({1.0 + 0.25 * k * t * t, 0.0}));
        },
        [k](const Vector& q) {
          const double t = radial_coordinate(k, q[0]);
          return hessian_1d(vec({0.5 * k * t * (1.0 + 0.25 * k * t * t), 0.0}));
        },
        probes);
  }
  if (name == "latitude-circle") {
    const double k = param(params, info, "k");
    const double phi = param(params, info, "phi");
    if (!(k > 0)) throw PreconditionError("latitude-circle: k must be positive");
    if (!(phi > 0 && phi < std::numbers::pi / 2))
      throw PreconditionError("latitude-circle: phi must lie in (0, pi/2)");
    const double dist = (std::numbers::pi / 2 - phi) / std::sqrt(k);
    const double rc = radial_coordinate(k, dist);
    return Immersion(
        ambient, 1,
        [rc](const Vector& q) { return Vector(vec({rc * std::cos(q[0]), rc * std::sin(q[0])})); },
        [rc](const Vector& q) {
          return hessian_1d(vec({-rc * std::sin(q[0]), rc * std::cos(q[0])}));
        },
        [rc](const Vector& q) {
          return hessian_1d(vec({-rc * std::cos(q[0]), -rc * std::sin(q[0])}));
        },
        probes);
  }
  throw PreconditionError("unknown builtin '" + std::string(name) + "'");
}

}  // namespace tubular
