#pragma once

// Description-rate tuples for the common/private (Gray-Wyner) decomposition of
// a two- or three-file source, plus the operating-point selection rules the
// caching schemes build on.
//
// A two-file decomposition splits the pair (X_1, X_2) into a common
// description W_0 of rate rho0 and private descriptions W_1, W_2 of rates
// rho1, rho2.  The three-file symmetric decomposition splits (X_1, X_2, X_3)
// into W_0 (rate rho0), three pairwise descriptions (rate rhoP each) and three
// private descriptions (rate rho each).

#include <array>
#include <string>
#include <vector>

#include "gwcache/source_model.hpp"

namespace gwcache {

// Two-file description rates (rho0, rho1, rho2).  "Sum-tight" means
// rho0 + rho1 + rho2 == H(X_1, X_2), i.e. the tuple sits on the Pangloss
// plane of the region; the schemes here always operate at such tuples.
struct GWTuple2 {
  double rho0;
  double rho1;
  double rho2;

  double sum() const { return rho0 + rho1 + rho2; }
};

// Symmetric three-file description rates: common rho0, pairwise rhoP (each of
// the three two-file descriptions), private rho (each of the three
// single-file descriptions).  Total description budget rho0 + 3 rhoP + 3 rho.
struct GWTuple3Sym {
  double rho0;
  double rhoP;
  double rho;

  double sum() const { return rho0 + 3.0 * rhoP + 3.0 * rho; }
};

// Is the tuple sum-tight for the given source, within tol?
bool sum_tight(const SourceModel& model, const GWTuple2& t, double tol = 1e-9);
bool sum_tight(const SourceModel& model, const GWTuple3Sym& t, double tol = 1e-9);

// Common-information rate of the doubly symmetric binary source along the
// boundary of its decomposition region, as a function of the private rate
// budget rho = rho1 = rho2 per private description:
//
//   boundary(p0, rho) = 1 + h(p0) - 2 rho                     rho <  h(p1)
//                     = f(rho)                                rho >= h(p1)
// with p1 = (1 - sqrt(1 - 2 p0)) / 2 and
//   f(rho) = 1 + h(p0) + p0 log2(p0/2)
//            + (a - p0/2) log2(a - p0/2) + (1 - a - p0/2) log2(1 - a - p0/2),
//   a = inv_binary_entropy(rho).
//
// Preconditions: 0 < p0 < 0.5 and 0 <= rho <= 1 (throws std::domain_error).
// The two branches meet continuously at rho = h(p1).
double dsbs_wyner_boundary(double p0, double rho);

// Smallest-common-rate sum-tight operating point used by the two-file scheme.
//  * Dsbs(p0):        (1 + h(p0) - 2 h(p1), h(p1), h(p1)), p1 as above.
//                     Degenerate p0 = 0 gives (1, 0, 0); p0 = 0.5 gives (0, 1, 1).
//  * Structured2:     (lV, l1, l2).
// Throws std::invalid_argument for three-file models.
GWTuple2 select_operating_point_two_file(const SourceModel& model);

// Memory threshold below which the two-file scheme is provably optimal:
// (1/K) * min(rho1, rho2) at the selected operating point.
// Preconditions: two-file model, K >= 2.
double mk_threshold(const SourceModel& model, int K);

// The four corner points of the symmetric three-file decomposition region
// that the three-file scheme mixes between, as (rho0, rhoP, rho) tuples:
//   [0] (H(X1,X2,X3), 0, 0)                       everything common
//   [1] (0, 0, H(X1))                              everything private
//   [2] (H(X1), H(X2|X1)/3, H(X3|X1,X2)/3)         graded common/pair/private
//   [3] (H(X1), 0, 2 H(X2|X1)/3)                   no pairwise descriptions
// Only defined for the symmetric three-file models (TripleBsc, Structured3
// with lV = H(X1) decomposes differently -- see the selection rule below).
// For TripleBsc all four are achievable corner points; index [2] is sum-tight.
std::array<GWTuple3Sym, 4> three_dms_achievable_points(const SourceModel& model);

// Sum-tight operating point (rho0 + 3 rhoP + 3 rho == H(X1,X2,X3)) that
// maximizes the private rate rho among the achievable family:
//  * TripleBsc:    point [2] of three_dms_achievable_points.
//  * Structured3:  (lV, lU, lX) -- the natural block decomposition.
// Throws std::invalid_argument for two-file models.
GWTuple3Sym select_operating_point_three_file(const SourceModel& model);

// Cut-set membership check for structured sources: does `t` satisfy every
// cut-set inequality required of a valid decomposition of `model`?
//   three files: H(X1,X2,X3) <= rho0 + 3 rhoP + 3 rho
//                H(Xi,Xj)    <= rho0 + 3 rhoP + 2 rho   (all pairs)
//                H(Xi)       <= rho0 + 2 rhoP + rho     (all singles)
// Inequalities are tested with slack tol = 1e-9.  Returns the first violated
// constraint's description in *violation (if non-null).
bool verify_membership_structured(const SourceModel& model, const GWTuple3Sym& t,
                                  std::string* violation = nullptr);
//   two files:   H(X1,X2) <= rho0 + rho1 + rho2
//                H(Xi)    <= rho0 + rhoi              (both i)
bool verify_membership_structured(const SourceModel& model, const GWTuple2& t,
                                  std::string* violation = nullptr);

}  // namespace gwcache
