#pragma once

#include "tubular/config.hpp"
#include "tubular/formulas.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace tubular {

// Pass/fail thresholds of the batch runs.
inline constexpr double kThmBTolerance = 1e-8;
inline constexpr double kThmCTolerance = 1e-7;
inline constexpr double kSlopeLow = 2.8;
inline constexpr double kSlopeHigh = 3.2;
// Theorem A series whose residuals all sit below this are exact up to round-off.
inline constexpr double kNoiseFloor = 1e-9;
// Residuals at or below this are left out of slope fits.
inline constexpr double kResidualFloor = 1e-12;
inline constexpr double kTangencyTolerance = 1e-6;

enum class Theorem { A, B, C };
Theorem parse_theorem(const std::string& name);
std::string to_string(Theorem t);

enum class SampleKind { as_is, horizontal, vertical, radial_vertical };
std::string to_string(SampleKind k);
// Round-robin over the four kinds.
SampleKind sample_kind(int sample_index);

// Raw germ data of one random tangent pair; components uniform in [-1, 1].
struct SampleDraw {
  Vector qdot1, ndot1, qdot2, ndot2;
};
// Stream keyed by (seed, base point, normal, sample) so results do not depend
// on evaluation order or radius.
SampleDraw draw_sample(std::uint64_t seed, int base_point_index, int normal_index, int sample_index,
                       int n_params, int codim);
// Shapes the draw into the requested kind at the tube point.
std::pair<TubeTangent, TubeTangent> make_sample_pair(const Immersion& imm, const TubePoint& at,
                                                     SampleKind kind, const SampleDraw& draw);

struct VerifyRow {
  int base_point_index = 0;
  int normal_index = 0;
  double r = 0.0;
  int sample_index = 0;
  SampleKind kind = SampleKind::as_is;
  double pullback = 0.0;
  double sasaki = 0.0;
  double model_value = 0.0;
  std::string model_variant;
  double residual = 0.0;
  std::string error;  // nonempty when the sample failed
};

// Log-log fit over the radii of one (base point, normal, sample) series.
struct SeriesFit {
  int base_point_index = 0;
  int normal_index = 0;
  int sample_index = 0;
  SampleKind kind = SampleKind::as_is;
  std::string variant;
  std::string status;  // "fitted", "noise-floor", "too-few-points", "failed"
  double slope = 0.0;
  double max_residual = 0.0;
};

struct VerifyReport {
  std::string label;
  Theorem theorem = Theorem::B;
  std::vector<VerifyRow> rows;
  std::vector<SeriesFit> fits;
  double ode_tol = 0.0;
  // Largest residual of the gating model (thmA, thmB or thmC_corrected).
  double max_residual = 0.0;
  // Theorem C: largest residual of the printed coefficient, reported alongside.
  std::optional<double> printed_max_residual;
  // Theorem A: the fitted slope farthest from 3, and the range of fitted slopes.
  std::optional<double> fitted_slope;
  std::optional<double> slope_min, slope_max;
  std::size_t failures = 0;
  std::vector<std::string> notes;
  bool pass = false;
  std::string verdict;
};

// Evaluates the theorem on every (base point, normal, radius, sample) and
// checks the thresholds above. Samples run concurrently; `threads` = 0 uses
// the hardware concurrency.
VerifyReport run_verify(const RunConfig& config, Theorem theorem, unsigned threads = 0);

struct OrderReport {
  std::string label;
  ExpansionModel model = ExpansionModel::thmA;
  std::vector<VerifyRow> rows;
  std::vector<SeriesFit> fits;
  double ode_tol = 0.0;
  std::optional<double> slope_min, slope_max;
  std::size_t failures = 0;
  // Optional acceptance window on every fitted slope.
  std::optional<double> expect_low, expect_high;
  bool pass = false;
  std::string verdict;
};

OrderReport run_order(const RunConfig& config, ExpansionModel model,
                      std::optional<double> expect_low = {}, std::optional<double> expect_high = {},
                      unsigned threads = 0);

struct TangencyRow {
  int base_point_index = 0;
  int normal_index = 0;
  TangencyResult result;
  std::string error;
};

struct TangencyReport {
  std::string label;
  std::vector<TangencyRow> rows;
  double max_defect = 0.0;
  double max_abs_ii = 0.0;
  std::size_t failures = 0;
  bool tangent = false;  // max |II| <= kTangencyTolerance
  bool pass = false;     // every defect <= kTangencyTolerance
  std::string verdict;   // "first-order tangent: yes|no"
};

TangencyReport run_tangency(const RunConfig& config, double delta = 1e-4);

// Reports. CSV numbers use 17 significant digits.
void write_csv(std::ostream& out, const VerifyReport& report);
void write_json(std::ostream& out, const VerifyReport& report);
void write_csv(std::ostream& out, const OrderReport& report);
void write_json(std::ostream& out, const OrderReport& report);
void write_csv(std::ostream& out, const TangencyReport& report);
void write_json(std::ostream& out, const TangencyReport& report);

std::string format_double(double v);

}  // namespace tubular
