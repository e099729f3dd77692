#pragma once

#include "tubular/submanifold.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tubular {

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct AmbientConfig {
  std::string type;  // "euclidean", "space_form" or "custom"
  int dim = 0;       // 0: inferred from the submanifold
  double k = 0.0;
  // custom: g = conformal_factor(x) * I, or a full matrix of expressions in t1..tN
  std::string conformal_factor;
  std::vector<std::vector<std::string>> metric;
};

struct SubmanifoldConfig {
  std::string builtin;
  std::map<std::string, double> params;
  std::vector<std::string> coordinates;  // custom immersion, one expression per ambient axis
  int n_params = 0;
};

struct ToleranceConfig {
  double ode = 1e-10;
  double fd = 1e-5;
};

// Contents of a run file. Keys:
//   ambient      {type, dim?, k?, conformal_factor? | metric?}   (optional for builtins)
//   submanifold  {builtin, params?} | {coordinates, n_params}
//   base_points  [[...], ...]        (optional for builtins)
//   normals      "all-frame" | [[...], ...]
//   radii        [...]
//   samples      int >= 1
//   seed         int
//   tolerances   {ode?, fd?}
struct RunConfig {
  std::optional<AmbientConfig> ambient;
  SubmanifoldConfig submanifold;
  std::vector<Vector> base_points;
  bool all_frame_normals = true;
  std::vector<Vector> normals;
  std::vector<double> radii;
  int samples = 10;
  std::uint64_t seed = 0;
  ToleranceConfig tolerances;
};

// Throws ConfigError naming the offending key; unknown keys are rejected.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

// Everything a run needs, resolved from the config.
struct Scene {
  std::shared_ptr<const AmbientSpace> ambient;
  std::shared_ptr<const Immersion> immersion;
  std::vector<Vector> base_points;
  std::vector<Vector> normals;  // unit coefficient vectors
  std::string label;
};

Scene build_scene(const RunConfig& config);

std::shared_ptr<const AmbientSpace> build_ambient(const AmbientConfig& config, double fd_step);

}  // namespace tubular
