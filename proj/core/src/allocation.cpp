#include "gwcache/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gwcache {

namespace {

void check_budget(double M, double total, const char* op) {
  if (!(M >= -1e-12 && M <= total + 1e-9)) {
    throw std::invalid_argument(std::string(op) + ": M must lie in [0, " +
                                std::to_string(total) + "], got " + std::to_string(M));
  }
}

}  // namespace

double cache_threshold(const RateCurve& private_curve) {
  const auto& pts = private_curve.breakpoints();
  if (pts.size() == 1) return pts.front().M;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    // Slopes are nonpositive; "flatter than -1" with a little slack so that a
    // segment of exact slope -1 still counts as steep.
    if (private_curve.incoming_slope(i) > -1.0 + 1e-9) {
      return pts[i - 1].M;
    }
  }
  return pts.back().M;
}

Allocation2 allocate_two_file(double M, const GWTuple2& t, const RateCurve& private_curve) {
  const double total = t.sum();
  const double s = t.rho1 + t.rho2;
  check_budget(M, total, "allocate_two_file");
  M = std::clamp(M, 0.0, total);
  const double mstar = cache_threshold(private_curve);
  if (M < mstar) {
    return Allocation2{std::max(0.0, M - s), std::min(M, s)};
  }
  if (M <= t.rho0 + mstar) {
    return Allocation2{M - mstar, std::min(mstar, s)};
  }
  return Allocation2{std::min(M, t.rho0), std::max(0.0, M - t.rho0)};
}

Allocation3 allocate_three_file(double M, const GWTuple3Sym& t) {
  const double total = t.sum();
  check_budget(M, total, "allocate_three_file");
  M = std::clamp(M, 0.0, total);
  const double pair_knee = 1.5 * t.rhoP;
  const double b2 = t.rho0 + 1.5 * (t.rhoP + t.rho);
  const double b3 = t.rho0 + 3.0 * t.rhoP + 1.5 * t.rho;
  if (M < pair_knee) {
    return Allocation3{0.0, M, 0.0};
  }
  if (M < b2) {
    const double rem = M - pair_knee;
    const double mu0 = std::min(rem, t.rho0);
    return Allocation3{mu0, pair_knee, rem - mu0};
  }
  if (M < b3) {
    return Allocation3{t.rho0, M - t.rho0 - 1.5 * t.rho, 1.5 * t.rho};
  }
  return Allocation3{t.rho0, 3.0 * t.rhoP, M - t.rho0 - 3.0 * t.rhoP};
}

}  // namespace gwcache
