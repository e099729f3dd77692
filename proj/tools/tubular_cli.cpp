// tubular: tube metrics of embedded submanifolds from the command line.
//
// exit status: 0 all checked tolerances passed, 1 some tolerance failed,
// 2 bad usage or invalid config.

#include "tubular/catalog.hpp"
#include "tubular/config.hpp"
#include "tubular/runs.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

using namespace tubular;

namespace {

struct Globals {
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::optional<double> ode_tol;
  unsigned threads = 0;
};

// Report sink: the --out file when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw ConfigError("cannot open output file '" + path + "'");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

RunConfig load_config(const Globals& g) {
  if (g.config_path.empty()) throw ConfigError("--config is required for this subcommand");
  RunConfig cfg = load_run_config(g.config_path);
  if (g.seed) cfg.seed = *g.seed;
  if (g.ode_tol) cfg.tolerances.ode = *g.ode_tol;
  return cfg;
}

template <class Report>
int emit(const Globals& g, const Report& rep) {
  Output out(g.out_path);
  if (g.format == "json")
    write_json(out.stream(), rep);
  else
    write_csv(out.stream(), rep);
  out.stream().flush();
  std::cerr << rep.label << ": " << rep.verdict << '\n';
  return rep.pass ? 0 : 1;
}

Vector parse_vector(const std::string& text, const std::string& what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ConfigError(what + ": '" + item + "' is not a number");
    }
  }
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

int cmd_catalog(const Globals& g) {
  Output out(g.out_path);
  std::ostream& os = out.stream();
  if (g.format == "json") {
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const BuiltinInfo& b : catalog()) {
      nlohmann::ordered_json e;
      e["name"] = b.name;
      e["ambient"] = b.ambient;
      nlohmann::ordered_json params = nlohmann::ordered_json::array();
      for (const BuiltinParameter& p : b.parameters)
        params.push_back({{"name", p.name}, {"default", p.default_value}, {"meaning", p.meaning}});
      e["parameters"] = params;
      e["domain"] = b.domain;
      e["totally_geodesic"] = b.totally_geodesic;
      list.push_back(e);
    }
    os << list.dump(2) << '\n';
    return 0;
  }
  os << "name,ambient,parameters,domain,totally_geodesic\n";
  for (const BuiltinInfo& b : catalog()) {
    std::string params;
    for (const BuiltinParameter& p : b.parameters)
      params += (params.empty() ? "" : " ") + p.name + "=" + format_double(p.default_value);
    os << b.name << ",\"" << b.ambient << "\"," << params << ",\"" << b.domain << "\","
       << (b.totally_geodesic ? "yes" : "no") << '\n';
  }
  return 0;
}

struct EvalArgs {
  std::string builtin;
  std::vector<std::string> params;
  std::string q, n, qdot1, ndot1, qdot2, ndot2;
  double r = 0.0;
  std::string model;
};

int cmd_eval(const Globals& g, const EvalArgs& a) {
  RunConfig cfg;
  if (!g.config_path.empty()) {
    cfg = load_config(g);
    if (!a.builtin.empty()) throw ConfigError("give either --config or --builtin, not both");
  } else {
    if (a.builtin.empty()) throw ConfigError("eval needs --config or --builtin");
    cfg.submanifold.builtin = a.builtin;
    for (const std::string& kv : a.params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--param expects name=value, got '" + kv + "'");
      cfg.submanifold.params[kv.substr(0, eq)] = parse_vector(kv.substr(eq + 1), "--param")[0];
    }
    if (g.ode_tol) cfg.tolerances.ode = *g.ode_tol;
  }
  cfg.radii = {a.r};
  const Scene scene = build_scene(cfg);
  const Immersion& imm = *scene.immersion;

  const Vector q = a.q.empty() ? scene.base_points.at(0) : parse_vector(a.q, "--q");
  const Vector n = a.n.empty() ? scene.normals.at(0) : parse_vector(a.n, "--n");
  auto or_zero = [](const std::string& s, int size, const char* what) {
    return s.empty() ? Vector(Vector::Zero(size)) : parse_vector(s, what);
  };
  const TubePoint at{q, a.r, n};
  validate(imm, at);
  const TubeTangent u1{at, or_zero(a.qdot1, imm.n_params(), "--qdot1"), or_zero(a.ndot1, imm.codim(), "--ndot1")};
  const TubeTangent u2{at, a.qdot2.empty() ? u1.qdot : parse_vector(a.qdot2, "--qdot2"),
                       a.ndot2.empty() ? u1.ndot : parse_vector(a.ndot2, "--ndot2")};
  if (u1.qdot.size() != imm.n_params() || u2.qdot.size() != imm.n_params() || u1.ndot.size() != imm.codim() ||
      u2.ndot.size() != imm.codim())
    throw ConfigError("tangent components have the wrong length");

  const double pb = pullback_metric(imm, u1, u2, cfg.tolerances.ode);
  const double sk = sasaki(imm, u1, u2);
  std::optional<double> mv;
  if (!a.model.empty()) mv = model_value(imm, u1, u2, parse_expansion_model(a.model));

  Output out(g.out_path);
  std::ostream& os = out.stream();
  if (g.format == "json") {
    nlohmann::ordered_json j;
    j["subject"] = scene.label;
    j["r"] = a.r;
    j["pullback"] = pb;
    j["sasaki"] = sk;
    if (mv) {
      j["model_variant"] = a.model;
      j["model_value"] = *mv;
      j["residual"] = std::abs(pb - *mv);
    }
    os << j.dump(2) << '\n';
  } else {
    os << "r,pullback,sasaki,model_value,model_variant,residual\n";
    os << format_double(a.r) << ',' << format_double(pb) << ',' << format_double(sk) << ','
       << (mv ? format_double(*mv) : "") << ',' << a.model << ',' << (mv ? format_double(std::abs(pb - *mv)) : "")
       << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tube metrics of embedded submanifolds: pullback, Sasaki metric and closed-form checks"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_path, "JSON run file");
  app.add_option("--out", g.out_path, "write the report here instead of stdout");
  app.add_option("--format", g.format, "report format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", g.seed, "override the config seed");
  app.add_option("--ode-tol", g.ode_tol, "override the ODE tolerance")->check(CLI::PositiveNumber);
  app.add_option("--threads", g.threads, "worker threads (0: hardware concurrency)");

  auto* catalog_cmd = app.add_subcommand("catalog", "list builtin submanifolds and their parameters");

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate pullback and Sasaki metric on one tangent pair");
  eval_cmd->add_option("--builtin", ea.builtin, "builtin name (instead of --config)");
  eval_cmd->add_option("--param", ea.params, "builtin parameter name=value");
  eval_cmd->add_option("--q", ea.q, "base point parameters, comma separated");
  eval_cmd->add_option("--r", ea.r, "tube radius")->required();
  eval_cmd->add_option("--n", ea.n, "unit normal coefficients");
  eval_cmd->add_option("--qdot1", ea.qdot1, "first tangent: parameter velocity");
  eval_cmd->add_option("--ndot1", ea.ndot1, "first tangent: normal coefficient velocity");
  eval_cmd->add_option("--qdot2", ea.qdot2, "second tangent (defaults to the first)");
  eval_cmd->add_option("--ndot2", ea.ndot2, "second tangent (defaults to the first)");
  eval_cmd->add_option("--model", ea.model, "thmA, thmB, thmC_printed, thmC_corrected or sasaki_only");

  std::string theorem;
  auto* verify_cmd = app.add_subcommand("verify", "check a closed form over the configured grid");
  verify_cmd->add_option("--theorem", theorem, "A, B or C")->required()->check(CLI::IsMember({"A", "B", "C"}));

  std::string model = "thmA";
  std::optional<double> min_slope, max_slope;
  auto* order_cmd = app.add_subcommand("order", "log-log convergence study of a model over the radii");
  order_cmd->add_option("--model", model, "thmA, thmB, thmC_printed, thmC_corrected or sasaki_only");
  order_cmd->add_option("--min-slope", min_slope, "fail when a fitted slope is below this");
  order_cmd->add_option("--max-slope", max_slope, "fail when a fitted slope is above this");

  double delta = 1e-4;
  auto* tangency_cmd = app.add_subcommand("tangency", "first-order comparison of the two tube metrics");
  tangency_cmd->add_option("--delta", delta, "radius step of the central difference")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (catalog_cmd->parsed()) return cmd_catalog(g);
    if (eval_cmd->parsed()) return cmd_eval(g, ea);
    if (verify_cmd->parsed()) return emit(g, run_verify(load_config(g), parse_theorem(theorem), g.threads));
    if (order_cmd->parsed())
      return emit(g, run_order(load_config(g), parse_expansion_model(model), min_slope, max_slope, g.threads));
    if (tangency_cmd->parsed()) return emit(g, run_tangency(load_config(g), delta));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
