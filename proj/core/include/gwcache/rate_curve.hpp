#pragma once

// Piecewise-linear, convex, nonincreasing rate-memory tradeoff curves, plus
// the closed-form curves achieved by the caching schemes in this library.
//
// A RateCurve is stored as its ordered breakpoint list; between breakpoints
// the curve is the straight interpolation.  All scheme curves here are exact:
// breakpoints are computed from the defining formulas, not sampled.

#include <cstddef>
#include <vector>

#include "gwcache/gray_wyner.hpp"
#include "gwcache/source_model.hpp"

namespace gwcache {

enum class Criterion { peak, average };

struct BreakPoint {
  double M;  // per-receiver cache size, bits per source symbol
  double R;  // delivery rate, bits per source symbol
};

class RateCurve {
 public:
  // Breakpoints must be sorted with strictly increasing M, nonincreasing R,
  // and convex (slopes nondecreasing), all within tolerance 1e-9.
  // Throws std::invalid_argument otherwise.  A single breakpoint is allowed
  // (degenerate curve defined at one memory value only).
  explicit RateCurve(std::vector<BreakPoint> breakpoints);

  const std::vector<BreakPoint>& breakpoints() const { return pts_; }
  double min_memory() const { return pts_.front().M; }
  double max_memory() const { return pts_.back().M; }

  // Linear interpolation between breakpoints.  Throws std::domain_error if M
  // lies outside [min_memory, max_memory] by more than a 1e-12 slack.
  double eval(double M) const;

  // Slope of the segment ending at breakpoint i (i in [1, size)).
  double incoming_slope(std::size_t i) const;

  std::size_t size() const { return pts_.size(); }

 private:
  std::vector<BreakPoint> pts_;
};

// Lower convex envelope (lower hull) of a point set.  Points are sorted by M;
// interior points lying on or above a chord are dropped, including collinear
// ones, so the result's breakpoints are exactly the hull vertices.
// Throws std::invalid_argument on fewer than 2 points or duplicate M values.
RateCurve lower_convex_envelope(std::vector<BreakPoint> points);

// An affine function R(M) = intercept + slope * M.
struct Line {
  double intercept;
  double slope;
};

// Pointwise maximum of a set of affine functions on [0, m_hi], optionally
// floored at zero, returned as an exact RateCurve (knees at line crossings).
// All lines must be nonincreasing (slope <= 0) so the result is a valid curve.
RateCurve upper_envelope_of_lines(const std::vector<Line>& lines, double m_hi,
                                  bool floor_at_zero = true);

// ---------------------------------------------------------------------------
// Two-file private-description delivery curves (library = the two private
// descriptions of rates rho1, rho2; K receivers, each caching M).
// ---------------------------------------------------------------------------

// Worst-case demand rate.  Breakpoints:
//   (0, s), (g, s - 2g), (s - 2g, g), (s, 0)
// with s = rho1 + rho2 and g = min(rho1, rho2) / K.
RateCurve private_peak_rate_two_file(double rho1, double rho2, int K);

// Expected rate under independent uniform demands.  Breakpoints:
//   (0, (1-c) s), (2g, (1-c) s - (3-4c) g), (s - 2g, g), (s, 0)
// with c = 2^-K.
RateCurve private_avg_rate_two_file(double rho1, double rho2, int K);

// ---------------------------------------------------------------------------
// Full two-file scheme curves (common description cached LFU-style, private
// descriptions as above; memory is split optimally between the parts).
// ---------------------------------------------------------------------------

// Worst-case rate; breakpoints (0, T), (g, T - 2g), (T - 2g, g), (T, 0) with
// T = rho0 + rho1 + rho2, g = min(rho1, rho2) / K.
RateCurve mr_peak_rate_two_file(const GWTuple2& t, int K);

// Expected rate; breakpoints
//   (0, rho0 + (1-c) s), (2g, rho0 + (1-c) s - (3-4c) g),
//   (rho0 + 2g, (1-c) s - (3-4c) g), (T - 2g, g), (T, 0).
RateCurve mr_avg_rate_two_file(const GWTuple2& t, int K);

// ---------------------------------------------------------------------------
// Three-file building blocks (two receivers).
// ---------------------------------------------------------------------------

// Library = the three pairwise descriptions (rate rhoP each); each of the two
// receivers requests the two descriptions covering its file.  Breakpoints:
//   (0, 3 rhoP), (rhoP / 2, 2 rhoP), (3 rhoP / 2, rhoP), (3 rhoP, 0).
RateCurve two_request_rate(double rhoP);

// Library = the three private descriptions (rate rho each), one requested per
// receiver.  Breakpoints: (0, 2 rho), (3 rho / 2, rho / 2), (3 rho, 0).
RateCurve single_request_three_file_rate(double rho);

// Full three-file scheme (two receivers), worst-case rate.  Breakpoints:
//   (0, rho0 + 3 rhoP + 2 rho), (rhoP / 2, rho0 + 2 rhoP + 2 rho),
//   (rho0 + 1.5 (rhoP + rho), rhoP + rho / 2),
//   (rho0 + 3 rhoP + 1.5 rho, rho / 2), (rho0 + 3 rhoP + 3 rho, 0).
RateCurve mr_peak_rate_three_file(const GWTuple3Sym& t);

// ---------------------------------------------------------------------------
// End-to-end curve for a source model.
// ---------------------------------------------------------------------------

// Rate-memory curve of the full scheme at the model's selected operating
// point.  Two-file models accept any K >= 2 and either criterion; three-file
// models require K == 2 and the peak criterion (throws std::invalid_argument
// otherwise).  For the parametric-family sources (Dsbs, TripleBsc) a coarse
// sweep (step 1e-2) over the sum-tight operating-point family double-checks
// that no family member beats the selected point anywhere on the curve
// (throws std::logic_error if that ever fails).
RateCurve gwmr_curve(const SourceModel& model, int K, Criterion criterion);

}  // namespace gwcache
