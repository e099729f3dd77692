#include "tubular/runs.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <thread>
#include <tuple>

namespace tubular {

namespace {

using nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Portable uniform draw in [-1, 1): the distribution classes are
// implementation-defined, the raw engine output is not.
double uniform_pm1(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

Vector uniform_vector(std::mt19937_64& rng, int n) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = uniform_pm1(rng);
  return v;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  for (auto& th : pool) th.join();
}

struct Task {
  int base;
  int normal;
  std::size_t radius;
  int sample;
};

// One grid evaluation: the pullback, the Sasaki value and each model value.
struct Evaluation {
  double pullback = kNaN;
  double sasaki = kNaN;
  std::vector<double> models;
  std::string error;
};

std::vector<Task> make_tasks(const Scene& scene, const RunConfig& cfg) {
  std::vector<Task> tasks;
  for (std::size_t b = 0; b < scene.base_points.size(); ++b)
    for (std::size_t n = 0; n < scene.normals.size(); ++n)
      for (std::size_t r = 0; r < cfg.radii.size(); ++r)
        for (int s = 0; s < cfg.samples; ++s)
          tasks.push_back({static_cast<int>(b), static_cast<int>(n), r, s});
  return tasks;
}

std::vector<Evaluation> evaluate_grid(const Scene& scene, const RunConfig& cfg, const std::vector<Task>& tasks,
                                      const std::vector<ExpansionModel>& models, unsigned threads) {
  const Immersion& imm = *scene.immersion;
  std::vector<Evaluation> out(tasks.size());
  parallel_for(tasks.size(), threads, [&](std::size_t i) {
    const Task& t = tasks[i];
    Evaluation& ev = out[i];
    try {
      const TubePoint at{scene.base_points[static_cast<std::size_t>(t.base)], cfg.radii[t.radius],
                         scene.normals[static_cast<std::size_t>(t.normal)]};
      const SampleDraw draw = draw_sample(cfg.seed, t.base, t.normal, t.sample, imm.n_params(), imm.codim());
      const auto [u1, u2] = make_sample_pair(imm, at, sample_kind(t.sample), draw);
      ev.pullback = pullback_metric(imm, u1, u2, cfg.tolerances.ode);
      ev.sasaki = sasaki(imm, u1, u2);
      for (ExpansionModel m : models) ev.models.push_back(model_value(imm, u1, u2, m));
    } catch (const std::exception& e) {
      ev.error = e.what();
      ev.models.assign(models.size(), kNaN);
    }
  });
  return out;
}

void require_radii(const RunConfig& cfg) {
  if (cfg.radii.empty()) throw ConfigError("radii: at least one radius is required");
}

void require_distinct_radii(const RunConfig& cfg) {
  std::set<double> seen(cfg.radii.begin(), cfg.radii.end());
  if (seen.size() != cfg.radii.size()) throw ConfigError("radii: values must be distinct for a slope fit");
}

std::vector<VerifyRow> rows_for(const std::vector<Task>& tasks, const std::vector<Evaluation>& evals,
                                const RunConfig& cfg, const std::vector<ExpansionModel>& models) {
  std::vector<VerifyRow> rows;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& t = tasks[i];
    for (std::size_t m = 0; m < models.size(); ++m) {
      VerifyRow row;
      row.base_point_index = t.base;
      row.normal_index = t.normal;
      row.r = cfg.radii[t.radius];
      row.sample_index = t.sample;
      row.kind = sample_kind(t.sample);
      row.pullback = evals[i].pullback;
      row.sasaki = evals[i].sasaki;
      row.model_value = evals[i].models[m];
      row.model_variant = to_string(models[m]);
      row.residual = evals[i].error.empty() ? std::abs(row.pullback - row.model_value) : kNaN;
      row.error = evals[i].error;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

// Groups rows of one variant by series and fits the log-log slope over radii.
std::vector<SeriesFit> fit_series(const std::vector<VerifyRow>& rows, const std::string& variant) {
  std::map<std::tuple<int, int, int>, std::vector<const VerifyRow*>> groups;
  for (const VerifyRow& row : rows)
    if (row.model_variant == variant) groups[{row.base_point_index, row.normal_index, row.sample_index}].push_back(&row);
  std::vector<SeriesFit> fits;
  for (auto& [key, members] : groups) {
    SeriesFit fit;
    std::tie(fit.base_point_index, fit.normal_index, fit.sample_index) = key;
    fit.kind = sample_kind(fit.sample_index);
    fit.variant = variant;
    std::sort(members.begin(), members.end(), [](const VerifyRow* a, const VerifyRow* b) { return a->r > b->r; });
    bool failed = false;
    std::vector<double> radii, residuals;
    for (const VerifyRow* row : members) {
      if (!row->error.empty()) {
        failed = true;
        continue;
      }
      fit.max_residual = std::max(fit.max_residual, row->residual);
      if (row->residual > kResidualFloor) {
        radii.push_back(row->r);
        residuals.push_back(row->residual);
      }
    }
    if (failed) {
      fit.status = "failed";
    } else if (fit.max_residual <= kNoiseFloor) {
      fit.status = "noise-floor";
    } else if (radii.size() < 3) {
      fit.status = "too-few-points";
    } else {
      fit.slope = convergence_order(radii, residuals).slope;
      fit.status = "fitted";
    }
    fits.push_back(fit);
  }
  return fits;
}

void slope_range(const std::vector<SeriesFit>& fits, std::optional<double>& lo, std::optional<double>& hi) {
  for (const SeriesFit& f : fits) {
    if (f.status != "fitted") continue;
    lo = lo ? std::min(*lo, f.slope) : f.slope;
    hi = hi ? std::max(*hi, f.slope) : f.slope;
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

ordered_json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

ordered_json row_json(const VerifyRow& row) {
  ordered_json j;
  j["base_point_index"] = row.base_point_index;
  j["normal_index"] = row.normal_index;
  j["r"] = row.r;
  j["sample_index"] = row.sample_index;
  j["sample_kind"] = to_string(row.kind);
  j["pullback"] = number_or_null(row.pullback);
  j["sasaki"] = number_or_null(row.sasaki);
  j["model_value"] = number_or_null(row.model_value);
  j["model_variant"] = row.model_variant;
  j["residual"] = number_or_null(row.residual);
  if (!row.error.empty()) j["error"] = row.error;
  return j;
}

ordered_json fit_json(const SeriesFit& f) {
  ordered_json j;
  j["base_point_index"] = f.base_point_index;
  j["normal_index"] = f.normal_index;
  j["sample_index"] = f.sample_index;
  j["sample_kind"] = to_string(f.kind);
  j["variant"] = f.variant;
  j["status"] = f.status;
  j["slope"] = f.status == "fitted" ? ordered_json(f.slope) : ordered_json(nullptr);
  j["max_residual"] = f.max_residual;
  return j;
}

}  // namespace

Theorem parse_theorem(const std::string& name) {
  if (name == "A") return Theorem::A;
  if (name == "B") return Theorem::B;
  if (name == "C") return Theorem::C;
  throw PreconditionError("unknown theorem '" + name + "' (expected A, B or C)");
}

std::string to_string(Theorem t) {
  switch (t) {
    case Theorem::A: return "A";
    case Theorem::B: return "B";
    case Theorem::C: return "C";
  }
  return "?";
}

std::string to_string(SampleKind k) {
  switch (k) {
    case SampleKind::as_is: return "as-is";
    case SampleKind::horizontal: return "horizontal";
    case SampleKind::vertical: return "vertical";
    case SampleKind::radial_vertical: return "radial-vertical";
  }
  return "?";
}

SampleKind sample_kind(int sample_index) { return static_cast<SampleKind>(sample_index % 4); }

SampleDraw draw_sample(std::uint64_t seed, int base_point_index, int normal_index, int sample_index,
                       int n_params, int codim) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(base_point_index), static_cast<std::uint32_t>(normal_index),
                    static_cast<std::uint32_t>(sample_index)};
  std::mt19937_64 rng(seq);
  SampleDraw d;
  d.qdot1 = uniform_vector(rng, n_params);
  d.ndot1 = uniform_vector(rng, codim);
  d.qdot2 = uniform_vector(rng, n_params);
  d.ndot2 = uniform_vector(rng, codim);
  return d;
}

std::pair<TubeTangent, TubeTangent> make_sample_pair(const Immersion& imm, const TubePoint& at, SampleKind kind,
                                                     const SampleDraw& d) {
  switch (kind) {
    case SampleKind::as_is: return {TubeTangent{at, d.qdot1, d.ndot1}, TubeTangent{at, d.qdot2, d.ndot2}};
    case SampleKind::horizontal: {
      const FrameAtPoint f = frame_at(imm, at.q);
      return {horizontal_lift(imm, at, f.tangent * d.qdot1), horizontal_lift(imm, at, f.tangent * d.qdot2)};
    }
    case SampleKind::vertical: {
      const Vector zero = Vector::Zero(imm.n_params());
      return {TubeTangent{at, zero, d.ndot1}, TubeTangent{at, zero, d.ndot2}};
    }
    case SampleKind::radial_vertical: {
      const TubeTangent u{at, Vector::Zero(imm.n_params()), at.n_coeffs};
      return {u, u};
    }
  }
  throw PreconditionError("unknown sample kind");
}

VerifyReport run_verify(const RunConfig& cfg, Theorem theorem, unsigned threads) {
  require_radii(cfg);
  if (theorem == Theorem::A) require_distinct_radii(cfg);
  const Scene scene = build_scene(cfg);
  const AmbientKind kind = scene.ambient->kind();
  if (theorem == Theorem::B && kind != AmbientKind::euclidean)
    throw ConfigError("theorem B needs a euclidean ambient");
  if (theorem == Theorem::C && kind != AmbientKind::space_form)
    throw ConfigError("theorem C needs a space_form ambient");

  std::vector<ExpansionModel> models;
  switch (theorem) {
    case Theorem::A: models = {ExpansionModel::thmA}; break;
    case Theorem::B: models = {ExpansionModel::thmB}; break;
    case Theorem::C: models = {ExpansionModel::thmC_printed, ExpansionModel::thmC_corrected}; break;
  }
  const std::string gating = to_string(models.back());

  const std::vector<Task> tasks = make_tasks(scene, cfg);
  const std::vector<Evaluation> evals = evaluate_grid(scene, cfg, tasks, models, threads);

  VerifyReport rep;
  rep.label = scene.label;
  rep.theorem = theorem;
  rep.ode_tol = cfg.tolerances.ode;
  rep.rows = rows_for(tasks, evals, cfg, models);
  for (const Evaluation& ev : evals) rep.failures += ev.error.empty() ? 0 : 1;
  for (const VerifyRow& row : rep.rows) {
    if (!row.error.empty()) continue;
    if (row.model_variant == gating) rep.max_residual = std::max(rep.max_residual, row.residual);
    if (row.model_variant == "thmC_printed")
      rep.printed_max_residual = std::max(rep.printed_max_residual.value_or(0.0), row.residual);
  }

  bool ok = rep.failures == 0;
  char buf[160];
  switch (theorem) {
    case Theorem::B:
      ok = ok && rep.max_residual <= kThmBTolerance;
      std::snprintf(buf, sizeof buf, "max residual %.3e (limit %.0e)", rep.max_residual, kThmBTolerance);
      rep.verdict = buf;
      break;
    case Theorem::C:
      ok = ok && rep.max_residual <= kThmCTolerance;
      std::snprintf(buf, sizeof buf, "corrected max residual %.3e (limit %.0e); printed max residual %.3e",
                    rep.max_residual, kThmCTolerance, rep.printed_max_residual.value_or(0.0));
      rep.verdict = buf;
      break;
    case Theorem::A: {
      if (cfg.radii.size() < 3) {
        rep.notes.push_back("slope check skipped: fewer than 3 radii");
        rep.verdict = "slope check skipped (fewer than 3 radii)";
        break;
      }
      rep.fits = fit_series(rep.rows, gating);
      slope_range(rep.fits, rep.slope_min, rep.slope_max);
      std::size_t fitted = 0, out_of_range = 0, floor = 0;
      for (const SeriesFit& f : rep.fits) {
        if (f.status == "noise-floor") ++floor;
        if (f.status != "fitted") continue;
        ++fitted;
        if (f.slope < kSlopeLow || f.slope > kSlopeHigh) ++out_of_range;
        if (!rep.fitted_slope || std::abs(f.slope - 3.0) > std::abs(*rep.fitted_slope - 3.0))
          rep.fitted_slope = f.slope;
      }
      ok = ok && out_of_range == 0;
      if (fitted == 0 && floor == rep.fits.size()) {
        rep.notes.push_back("residuals at noise floor");
        std::snprintf(buf, sizeof buf, "residuals at noise floor (max %.3e <= %.0e); slope check skipped",
                      rep.max_residual, kNoiseFloor);
      } else if (fitted == 0) {
        std::snprintf(buf, sizeof buf, "no series with enough residuals above %.0e to fit", kResidualFloor);
      } else {
        std::snprintf(buf, sizeof buf, "%zu of %zu fitted series outside [%.1f, %.1f]; slopes %.4f .. %.4f",
                      out_of_range, fitted, kSlopeLow, kSlopeHigh, *rep.slope_min, *rep.slope_max);
      }
      rep.verdict = buf;
      break;
    }
  }
  if (rep.failures > 0) rep.verdict += "; " + std::to_string(rep.failures) + " failed samples";
  rep.pass = ok;
  rep.verdict = std::string(ok ? "PASS: " : "FAIL: ") + rep.verdict;
  return rep;
}

OrderReport run_order(const RunConfig& cfg, ExpansionModel model, std::optional<double> expect_low,
                      std::optional<double> expect_high, unsigned threads) {
  require_radii(cfg);
  require_distinct_radii(cfg);
  if (cfg.radii.size() < 3) throw ConfigError("radii: a convergence study needs at least 3 radii");
  const Scene scene = build_scene(cfg);
  const std::vector<ExpansionModel> models = {model};
  const std::vector<Task> tasks = make_tasks(scene, cfg);
  const std::vector<Evaluation> evals = evaluate_grid(scene, cfg, tasks, models, threads);

  OrderReport rep;
  rep.label = scene.label;
  rep.model = model;
  rep.ode_tol = cfg.tolerances.ode;
  rep.expect_low = expect_low;
  rep.expect_high = expect_high;
  rep.rows = rows_for(tasks, evals, cfg, models);
  for (const Evaluation& ev : evals) rep.failures += ev.error.empty() ? 0 : 1;
  rep.fits = fit_series(rep.rows, to_string(model));
  slope_range(rep.fits, rep.slope_min, rep.slope_max);

  bool ok = rep.failures == 0;
  std::size_t outside = 0;
  for (const SeriesFit& f : rep.fits) {
    if (f.status != "fitted") continue;
    if ((expect_low && f.slope < *expect_low) || (expect_high && f.slope > *expect_high)) ++outside;
  }
  ok = ok && outside == 0;
  char buf[160];
  if (rep.slope_min)
    std::snprintf(buf, sizeof buf, "slopes %.4f .. %.4f over %zu series", *rep.slope_min, *rep.slope_max,
                  rep.fits.size());
  else
    std::snprintf(buf, sizeof buf, "no fitted series (%zu series)", rep.fits.size());
  rep.verdict = buf;
  if (expect_low || expect_high) rep.verdict += "; " + std::to_string(outside) + " outside the expected window";
  if (rep.failures > 0) rep.verdict += "; " + std::to_string(rep.failures) + " failed samples";
  rep.pass = ok;
  rep.verdict = std::string(ok ? "PASS: " : "FAIL: ") + rep.verdict;
  return rep;
}

TangencyReport run_tangency(const RunConfig& cfg, double delta) {
  const Scene scene = build_scene(cfg);
  const Immersion& imm = *scene.immersion;
  TangencyReport rep;
  rep.label = scene.label;
  for (std::size_t b = 0; b < scene.base_points.size(); ++b) {
    const Vector& q = scene.base_points[b];
    for (std::size_t n = 0; n < scene.normals.size(); ++n) {
      TangencyRow row;
      row.base_point_index = static_cast<int>(b);
      row.normal_index = static_cast<int>(n);
      try {
        const FrameAtPoint f = frame_at(imm, q);
        std::vector<Vector> probes;
        for (int i = 0; i < imm.n_params(); ++i) probes.push_back(f.tangent.col(i));
        row.result = first_order_tangency(imm, q, scene.normals[n], probes, delta, cfg.tolerances.ode);
        rep.max_defect = std::max(rep.max_defect, row.result.max_defect);
        rep.max_abs_ii = std::max(rep.max_abs_ii, row.result.max_abs_ii);
      } catch (const std::exception& e) {
        row.error = e.what();
        ++rep.failures;
      }
      rep.rows.push_back(std::move(row));
    }
  }
  rep.tangent = rep.max_abs_ii <= kTangencyTolerance;
  rep.pass = rep.failures == 0 && rep.max_defect <= kTangencyTolerance;
  rep.verdict = std::string("first-order tangent: ") + (rep.tangent ? "yes" : "no");
  return rep;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const VerifyReport& rep) {
  out << "base_point_index,normal_index,r,sample_index,sample_kind,pullback,sasaki,model_value,model_variant,"
         "residual\n";
  for (const VerifyRow& row : rep.rows) {
    out << row.base_point_index << ',' << row.normal_index << ',' << format_double(row.r) << ','
        << row.sample_index << ',' << to_string(row.kind) << ',' << format_double(row.pullback) << ','
        << format_double(row.sasaki) << ',' << format_double(row.model_value) << ','
        << csv_field(row.model_variant) << ',' << format_double(row.residual) << '\n';
  }
}

void write_json(std::ostream& out, const VerifyReport& rep) {
  ordered_json j;
  j["subject"] = rep.label;
  j["theorem"] = to_string(rep.theorem);
  ordered_json rows = ordered_json::array();
  for (const VerifyRow& row : rep.rows) rows.push_back(row_json(row));
  j["rows"] = rows;
  if (!rep.fits.empty()) {
    ordered_json fits = ordered_json::array();
    for (const SeriesFit& f : rep.fits) fits.push_back(fit_json(f));
    j["series"] = fits;
  }
  ordered_json summary;
  summary["max_residual"] = rep.max_residual;
  if (rep.printed_max_residual) summary["printed_max_residual"] = *rep.printed_max_residual;
  if (rep.fitted_slope) summary["fitted_slope"] = *rep.fitted_slope;
  if (rep.slope_min) summary["slope_range"] = {*rep.slope_min, *rep.slope_max};
  summary["failed_samples"] = rep.failures;
  summary["pass"] = rep.pass;
  summary["verdict"] = rep.verdict;
  if (!rep.notes.empty()) summary["notes"] = rep.notes;
  ordered_json tol;
  tol["ode"] = rep.ode_tol;
  switch (rep.theorem) {
    case Theorem::A:
      tol["slope_window"] = {kSlopeLow, kSlopeHigh};
      tol["noise_floor"] = kNoiseFloor;
      tol["residual_floor"] = kResidualFloor;
      break;
    case Theorem::B: tol["max_residual"] = kThmBTolerance; break;
    case Theorem::C: tol["max_residual"] = kThmCTolerance; break;
  }
  summary["tolerances"] = tol;
  j["summary"] = summary;
  out << j.dump(2) << '\n';
}

void write_csv(std::ostream& out, const OrderReport& rep) {
  std::map<std::tuple<int, int, int>, const SeriesFit*> by_series;
  for (const SeriesFit& f : rep.fits) by_series[{f.base_point_index, f.normal_index, f.sample_index}] = &f;
  out << "base_point_index,normal_index,sample_index,sample_kind,r,pullback,model_value,model,residual,"
         "series_status,series_slope\n";
  for (const VerifyRow& row : rep.rows) {
    const SeriesFit* f = by_series.at({row.base_point_index, row.normal_index, row.sample_index});
    out << row.base_point_index << ',' << row.normal_index << ',' << row.sample_index << ','
        << to_string(row.kind) << ',' << format_double(row.r) << ',' << format_double(row.pullback) << ','
        << format_double(row.model_value) << ',' << row.model_variant << ',' << format_double(row.residual)
        << ',' << f->status << ',' << (f->status == "fitted" ? format_double(f->slope) : "") << '\n';
  }
}

void write_json(std::ostream& out, const OrderReport& rep) {
  ordered_json j;
  j["subject"] = rep.label;
  j["model"] = to_string(rep.model);
  ordered_json rows = ordered_json::array();
  for (const VerifyRow& row : rep.rows) rows.push_back(row_json(row));
  j["rows"] = rows;
  ordered_json fits = ordered_json::array();
  for (const SeriesFit& f : rep.fits) fits.push_back(fit_json(f));
  j["series"] = fits;
  ordered_json summary;
  if (rep.slope_min) summary["slope_range"] = {*rep.slope_min, *rep.slope_max};
  summary["failed_samples"] = rep.failures;
  summary["pass"] = rep.pass;
  summary["verdict"] = rep.verdict;
  ordered_json tol;
  tol["ode"] = rep.ode_tol;
  tol["residual_floor"] = kResidualFloor;
  tol["noise_floor"] = kNoiseFloor;
  if (rep.expect_low) tol["expect_low"] = *rep.expect_low;
  if (rep.expect_high) tol["expect_high"] = *rep.expect_high;
  summary["tolerances"] = tol;
  j["summary"] = summary;
  out << j.dump(2) << '\n';
}

void write_csv(std::ostream& out, const TangencyReport& rep) {
  out << "base_point_index,normal_index,i,j,derivative,minus_two_ii,defect\n";
  for (const TangencyRow& row : rep.rows) {
    if (!row.error.empty()) continue;
    const Matrix& d = row.result.derivative;
    for (Eigen::Index i = 0; i < d.rows(); ++i)
      for (Eigen::Index k = 0; k < d.cols(); ++k)
        out << row.base_point_index << ',' << row.normal_index << ',' << i << ',' << k << ','
            << format_double(d(i, k)) << ',' << format_double(row.result.ii(i, k)) << ','
            << format_double(std::abs(d(i, k) - row.result.ii(i, k))) << '\n';
  }
}

void write_json(std::ostream& out, const TangencyReport& rep) {
  auto matrix = [](const Matrix& m) {
    ordered_json a = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      ordered_json row = ordered_json::array();
      for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
      a.push_back(row);
    }
    return a;
  };
  ordered_json j;
  j["subject"] = rep.label;
  ordered_json rows = ordered_json::array();
  for (const TangencyRow& row : rep.rows) {
    ordered_json r;
    r["base_point_index"] = row.base_point_index;
    r["normal_index"] = row.normal_index;
    if (row.error.empty()) {
      r["derivative"] = matrix(row.result.derivative);
      r["minus_two_ii"] = matrix(row.result.ii);
      r["max_defect"] = row.result.max_defect;
      r["max_abs_ii"] = row.result.max_abs_ii;
    } else {
      r["error"] = row.error;
    }
    rows.push_back(r);
  }
  j["rows"] = rows;
  ordered_json summary;
  summary["max_defect"] = rep.max_defect;
  summary["max_abs_ii"] = rep.max_abs_ii;
  summary["failed_points"] = rep.failures;
  summary["pass"] = rep.pass;
  summary["verdict"] = rep.verdict;
  summary["tolerances"] = {{"defect", kTangencyTolerance}, {"ii", kTangencyTolerance}};
  j["summary"] = summary;
  out << j.dump(2) << '\n';
}

}  // namespace tubular
