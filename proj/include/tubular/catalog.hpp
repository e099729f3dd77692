#pragma once

#include "tubular/submanifold.hpp"

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace tubular {

struct BuiltinParameter {
  std::string name;
  double default_value;
  std::string meaning;
};

struct BuiltinInfo {
  std::string name;
  std::string ambient;  // human-readable ambient description
  std::vector<BuiltinParameter> parameters;
  std::string domain;   // parameter domain of the immersion
  std::vector<Vector> base_points;
  bool totally_geodesic;
};

const std::vector<BuiltinInfo>& catalog();
const BuiltinInfo& builtin_info(std::string_view name);

// The ambient a builtin lives in by default (R^2, R^3, R^4, S^2(k), H^2(k)).
std::shared_ptr<const AmbientSpace> builtin_ambient(
    std::string_view name, const std::map<std::string, double>& params = {});

// Builds a catalog immersion with analytic first and second derivatives.
// `ambient` overrides the default ambient; it must have the same dimension.
Immersion make_builtin(std::string_view name,
                       const std::map<std::string, double>& params = {},
                       std::shared_ptr<const AmbientSpace> ambient = nullptr);

}  // namespace tubular
