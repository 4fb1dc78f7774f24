#pragma once

// Converse (lower) bounds on the delivery rate, an exhaustive cut-set bound
// search with explicit witnesses, and achievable-vs-bound gap reporting.

#include <string>
#include <utility>
#include <vector>

#include "gwcache/gray_wyner.hpp"
#include "gwcache/rate_curve.hpp"
#include "gwcache/source_model.hpp"

namespace gwcache {

// One round of demands: files[k-1] is the file index requested by receiver k.
struct DemandVector {
  std::vector<int> files;
};

// A cut-set bound instance: nu consecutive demand rounds, each paired with a
// subset of receivers (1-based ids) whose caches enter the cut.
struct BoundInstance {
  std::vector<DemandVector> demands;
  std::vector<std::vector<int>> subsets;

  int rounds() const { return static_cast<int>(demands.size()); }
  std::string to_string() const;
};

// Cut-set bound on the SUM of the nu delivery rates of the instance:
//
//   sum_i H(D_i | C_2 u ... u C_i)  -  |S~| M  +  H(D~)  -  H(D*)
//
// where D_i = files demanded in round i by receivers in S_i,
//       C_i = files demanded in earlier rounds j < i by receivers in
//             S_i n S_j (conditioning accumulates across rounds),
//       S~  = union of the S_i (|S~| caches are cut),
//       D~  = files demanded in any round by receivers in S~,
//       D*  = union of the D_i.
// The result is floored at 0.  Per-demand bounds divide by nu.
// Throws std::invalid_argument on malformed instances (wrong receiver count,
// file/receiver ids out of range, empty subsets, mismatched lengths).
double cutset_sum_rate_bound(const SourceModel& model, const BoundInstance& inst, double M);

struct PeakBoundSearchResult {
  double value;           // best per-demand bound found
  BoundInstance witness;  // instance attaining it
};

// Exhaustive maximization of cutset_sum_rate_bound(...) / nu over all demand
// sequences and receiver-subset sequences with nu in [1, nu_max] rounds.
// Preconditions: nu_max in [1, 3], K in [1, 3] (throws std::invalid_argument).
PeakBoundSearchResult search_best_peak_bound(const SourceModel& model, int K, double M,
                                             int nu_max);

// ---------------------------------------------------------------------------
// Closed-form bounds.  Each is the maximum of a few affine pieces in M,
// floored at 0; the *_lines variants expose the pieces so callers can build
// the exact piecewise-linear bound curve.
// ---------------------------------------------------------------------------

// Worst-case rate, two files, any K:
//   H12 - 2M,  (H12 + max(H1, H2))/2 - M,  (H12 - M)/2.
double peak_lb_two_file(const SourceModel& model, double M);
std::vector<Line> peak_lb_lines_two_file(const SourceModel& model);

// Expected rate, two files, K receivers (c = 2^-K):
//   (1-2c) H12 + c (H1 + H2) - 2 (1-c) M,
//   H12/2 + (H1 + H2)/4 - M,
//   H12/2 + max(H1, H2)/4 - 3M/4,
//   (H12 - M)/2.
double avg_lb_two_file(const SourceModel& model, int K, double M);
std::vector<Line> avg_lb_lines_two_file(const SourceModel& model, int K);

// Worst-case rate, description-level (two-file scheme delivers from the
// description library of rates t):
//   T - 2M,  rho0 + (rho1 + rho2 + max(rho1, rho2))/2 - M,  (T - M)/2.
double mr_peak_lb(const GWTuple2& t, int K, double M);
std::vector<Line> mr_peak_lb_lines(const GWTuple2& t);

// Expected rate, description-level, K receivers (c = 2^-K):
//   rho0 + (1-c)(rho1 + rho2) - 2 (1-c) M,
//   3 rho0/4 + (rho1 + rho2)/2 + max(rho1, rho2)/4 - 3M/4,
//   rho0 + 3 (rho1 + rho2)/4 - M,
//   (T - M)/2.
double mr_avg_lb(const GWTuple2& t, int K, double M);
std::vector<Line> mr_avg_lb_lines(const GWTuple2& t, int K);

// Worst-case rate, three files, two receivers:
//   maxpair - 2M,  (maxpair - M)/2,  (H123 - M)/3,  (H123 + max_i Hi)/2 - M
// with maxpair = max_{i<j} H(Xi, Xj).
double peak_lb_three_file(const SourceModel& model, double M);
std::vector<Line> peak_lb_lines_three_file(const SourceModel& model);

// Worst-case rate of the two-request network with three descriptions of rate
// rhoP each, two receivers requesting two descriptions apiece:
//   3 rhoP - 2M,  5 rhoP/2 - M,  3 rhoP/2 - M/2.
double two_request_lb(double rhoP, double M);
std::vector<Line> two_request_lb_lines(double rhoP);

// ---------------------------------------------------------------------------
// Gap reporting.
// ---------------------------------------------------------------------------

// A claimed cap on the achievable-minus-bound gap over a memory interval.
struct GapCap {
  double m_lo;
  double m_hi;
  double value;
  std::string name;
};

struct GapRow {
  double M;
  double r_ach;
  double r_lb;
  double gap;
  double cap;  // tightest applicable cap (infinity if none covers this M)
  bool pass;
};

struct GapReport {
  std::vector<GapRow> rows;
  double max_gap;  // exact maximum over the common domain, not just the grid
  // Maximal intervals where gap <= 1e-9, computed exactly from the two
  // curves' combined breakpoints.
  std::vector<std::pair<double, double>> optimal_regions;
  bool all_pass;
};

// Compare an achievable curve against a lower-bound curve on the grid
// m_lo, m_lo + step, ..., m_hi (inclusive, clipped to the common domain).
// Throws std::logic_error if the bound ever exceeds the achievable curve by
// more than 1e-9 (that would mean one of the two is wrong).
GapReport gap_report(const RateCurve& achievable, const RateCurve& lower_bound,
                     const std::vector<GapCap>& caps, double m_lo, double m_hi,
                     double step);

}  // namespace gwcache
