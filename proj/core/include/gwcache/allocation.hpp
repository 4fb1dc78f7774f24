#pragma once

// Splitting a receiver's cache budget between the common and private parts of
// the description library.  The split rules are closed-form and exactly
// reproduce the scheme curves when composed with the per-part delivery rates.

#include "gwcache/gray_wyner.hpp"
#include "gwcache/rate_curve.hpp"

namespace gwcache {

// Two-file split: mu0 bits/symbol of the common description (cached at every
// receiver, most-popular-first), mu bits/symbol for the private part.
struct Allocation2 {
  double mu0;
  double mu;
};

// Three-file split: mu0 for the common description, muP for the three
// pairwise descriptions combined, mu for the three private descriptions
// combined.  mu0 + muP + mu == M.
struct Allocation3 {
  double mu0;
  double muP;
  double mu;
};

// Memory threshold of a private-delivery curve: the smallest breakpoint at
// which the curve's slope becomes flatter than -1 (strictly), i.e. where a
// cached private bit stops saving at least one delivered bit.  Returns 0 if
// the first segment is already flatter than -1, and the right endpoint if no
// segment is.  Single-point curves return their only memory value.
double cache_threshold(const RateCurve& private_curve);

// Optimal two-file split of budget M (0 <= M <= t.sum()):
//   M in [0, M*):            everything private (common only once private
//                            saturates, which cannot happen below M* <= s)
//   M in [M*, rho0 + M*]:    private pinned at M*, remainder common
//   M in (rho0 + M*, total]: common saturated, remainder private
// where M* = cache_threshold(private_curve) and s = rho1 + rho2.
Allocation2 allocate_two_file(double M, const GWTuple2& t, const RateCurve& private_curve);

// Optimal three-file split of budget M (0 <= M <= t.sum()), two receivers:
//   [0, 1.5 rhoP):                         all into the pairwise layer
//   [1.5 rhoP, rho0 + 1.5 (rhoP + rho)):   pairwise pinned at 1.5 rhoP, the
//                                          remainder first fills the common
//                                          prefix, excess goes private
//   [.., rho0 + 3 rhoP + 1.5 rho):         common full, private pinned at
//                                          1.5 rho, remainder pairwise
//   [.., total]:                           pairwise full, remainder private
Allocation3 allocate_three_file(double M, const GWTuple3Sym& t);

}  // namespace gwcache
