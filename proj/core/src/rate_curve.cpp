#include "gwcache/rate_curve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gwcache {

namespace {

constexpr double kCurveTol = 1e-9;

void require_nonneg(double v, const char* what) {
  if (!(v >= 0.0)) {
    throw std::invalid_argument(std::string(what) + " must be nonnegative, got " +
                                std::to_string(v));
  }
}

void require_receivers(int K) {
  if (K < 2) {
    throw std::invalid_argument("K must be >= 2, got " + std::to_string(K));
  }
}

// Deduplicate breakpoints whose M coincide (within 1e-12): formula-built
// anchor lists hit this in degenerate parameter regimes, always with equal R.
std::vector<BreakPoint> dedupe_anchors(std::vector<BreakPoint> pts) {
  std::sort(pts.begin(), pts.end(),
            [](const BreakPoint& a, const BreakPoint& b) { return a.M < b.M; });
  std::vector<BreakPoint> out;
  for (const auto& p : pts) {
    if (!out.empty() && std::abs(p.M - out.back().M) <= 1e-12) {
      if (std::abs(p.R - out.back().R) > 1e-9) {
        throw std::invalid_argument("conflicting rates at coincident breakpoints");
      }
      // Keep the lower of the two (they agree within tolerance).
      out.back().R = std::min(out.back().R, p.R);
      continue;
    }
    out.push_back(p);
  }
  return out;
}

// Anchor lists from closed-form scheme curves are convex by construction;
// run them through the hull anyway to drop duplicates and collinear interior
// points, yielding a canonical breakpoint list.
RateCurve curve_from_anchors(std::vector<BreakPoint> anchors) {
  auto pts = dedupe_anchors(std::move(anchors));
  if (pts.size() < 2) return RateCurve(std::move(pts));
  return lower_convex_envelope(std::move(pts));
}

}  // namespace

RateCurve::RateCurve(std::vector<BreakPoint> breakpoints) : pts_(std::move(breakpoints)) {
  if (pts_.empty()) {
    throw std::invalid_argument("RateCurve: needs at least one breakpoint");
  }
  for (std::size_t i = 1; i < pts_.size(); ++i) {
    if (!(pts_[i].M > pts_[i - 1].M)) {
      throw std::invalid_argument("RateCurve: breakpoint memories must be strictly increasing");
    }
    if (pts_[i].R > pts_[i - 1].R + kCurveTol) {
      throw std::invalid_argument("RateCurve: rates must be nonincreasing");
    }
  }
  for (std::size_t i = 2; i < pts_.size(); ++i) {
    if (incoming_slope(i) + kCurveTol < incoming_slope(i - 1)) {
      throw std::invalid_argument("RateCurve: breakpoints must form a convex curve");
    }
  }
}

double RateCurve::incoming_slope(std::size_t i) const {
  return (pts_[i].R - pts_[i - 1].R) / (pts_[i].M - pts_[i - 1].M);
}

double RateCurve::eval(double M) const {
  const double slack = 1e-12 * std::max(1.0, std::abs(pts_.back().M));
  if (M < pts_.front().M - slack || M > pts_.back().M + slack) {
    throw std::domain_error("RateCurve::eval: M=" + std::to_string(M) +
                            " outside curve domain [" + std::to_string(pts_.front().M) +
                            ", " + std::to_string(pts_.back().M) + "]");
  }
  M = std::clamp(M, pts_.front().M, pts_.back().M);
  // First breakpoint with M_i >= M.
  const auto it = std::lower_bound(
      pts_.begin(), pts_.end(), M,
      [](const BreakPoint& p, double m) { return p.M < m; });
  if (it == pts_.begin()) return it->R;
  const BreakPoint& hi = *it;
  const BreakPoint& lo = *(it - 1);
  const double w = (M - lo.M) / (hi.M - lo.M);
  return lo.R + w * (hi.R - lo.R);
}

RateCurve lower_convex_envelope(std::vector<BreakPoint> points) {
  if (points.size() < 2) {
    throw std::invalid_argument("lower_convex_envelope: needs at least 2 points");
  }
  std::sort(points.begin(), points.end(),
            [](const BreakPoint& a, const BreakPoint& b) { return a.M < b.M; });
  double span_m = 0.0, span_r = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (std::abs(points[i].M - points[i - 1].M) <= 1e-12) {
      throw std::invalid_argument("lower_convex_envelope: duplicate memory value " +
                                  std::to_string(points[i].M));
    }
  }
  span_m = points.back().M - points.front().M;
  for (const auto& p : points) span_r = std::max(span_r, std::abs(p.R));
  const double tol = 1e-12 * std::max(1.0, span_m * std::max(1.0, span_r));

  // Andrew's monotone chain, lower hull.  Collinear interior points make the
  // cross product vanish and are dropped.
  std::vector<BreakPoint> hull;
  for (const auto& p : points) {
    while (hull.size() >= 2) {
      const BreakPoint& a = hull[hull.size() - 2];
      const BreakPoint& b = hull[hull.size() - 1];
      const double cross = (b.M - a.M) * (p.R - b.R) - (p.M - b.M) * (b.R - a.R);
      if (cross <= tol) {
        hull.pop_back();  // b is on or above chord a--p
      } else {
        break;
      }
    }
    hull.push_back(p);
  }
  return RateCurve(std::move(hull));
}

RateCurve upper_envelope_of_lines(const std::vector<Line>& lines, double m_hi,
                                  bool floor_at_zero) {
  if (m_hi < 0.0) {
    throw std::invalid_argument("upper_envelope_of_lines: m_hi must be >= 0");
  }
  std::vector<Line> all = lines;
  if (floor_at_zero) all.push_back(Line{0.0, 0.0});
  if (all.empty()) {
    throw std::invalid_argument("upper_envelope_of_lines: no lines given");
  }
  for (const auto& l : all) {
    if (l.slope > 1e-12) {
      throw std::invalid_argument("upper_envelope_of_lines: lines must be nonincreasing");
    }
  }
  // Candidate knees: domain ends plus every pairwise crossing inside.
  std::vector<double> xs = {0.0, m_hi};
  for (std::size_t i = 0; i + 1 < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      const double ds = all[i].slope - all[j].slope;
      if (std::abs(ds) < 1e-15) continue;
      const double x = (all[j].intercept - all[i].intercept) / ds;
      if (x > 0.0 && x < m_hi) xs.push_back(x);
    }
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end(),
                       [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
           xs.end());
  auto value = [&all](double x) {
    double best = all.front().intercept + all.front().slope * x;
    for (const auto& l : all) best = std::max(best, l.intercept + l.slope * x);
    return best;
  };
  std::vector<BreakPoint> pts;
  pts.reserve(xs.size());
  for (double x : xs) pts.push_back(BreakPoint{x, value(x)});
  if (pts.size() < 2) return RateCurve(std::move(pts));
  return lower_convex_envelope(std::move(pts));
}

RateCurve private_peak_rate_two_file(double rho1, double rho2, int K) {
  require_nonneg(rho1, "rho1");
  require_nonneg(rho2, "rho2");
  require_receivers(K);
  const double s = rho1 + rho2;
  if (s == 0.0) return RateCurve({{0.0, 0.0}});
  const double g = std::min(rho1, rho2) / K;
  return curve_from_anchors({{0.0, s}, {g, s - 2.0 * g}, {s - 2.0 * g, g}, {s, 0.0}});
}

RateCurve private_avg_rate_two_file(double rho1, double rho2, int K) {
  require_nonneg(rho1, "rho1");
  require_nonneg(rho2, "rho2");
  require_receivers(K);
  const double s = rho1 + rho2;
  if (s == 0.0) return RateCurve({{0.0, 0.0}});
  const double g = std::min(rho1, rho2) / K;
  const double c = std::ldexp(1.0, -K);  // 2^-K: chance a file goes unrequested, halved
  return curve_from_anchors({{0.0, (1.0 - c) * s},
                             {2.0 * g, (1.0 - c) * s - (3.0 - 4.0 * c) * g},
                             {s - 2.0 * g, g},
                             {s, 0.0}});
}

RateCurve mr_peak_rate_two_file(const GWTuple2& t, int K) {
  require_nonneg(t.rho0, "rho0");
  require_nonneg(t.rho1, "rho1");
  require_nonneg(t.rho2, "rho2");
  require_receivers(K);
  const double total = t.sum();
  if (total == 0.0) return RateCurve({{0.0, 0.0}});
  const double g = std::min(t.rho1, t.rho2) / K;
  return curve_from_anchors(
      {{0.0, total}, {g, total - 2.0 * g}, {total - 2.0 * g, g}, {total, 0.0}});
}

RateCurve mr_avg_rate_two_file(const GWTuple2& t, int K) {
  require_nonneg(t.rho0, "rho0");
  require_nonneg(t.rho1, "rho1");
  require_nonneg(t.rho2, "rho2");
  require_receivers(K);
  const double total = t.sum();
  if (total == 0.0) return RateCurve({{0.0, 0.0}});
  const double s = t.rho1 + t.rho2;
  const double g = std::min(t.rho1, t.rho2) / K;
  const double c = std::ldexp(1.0, -K);
  return curve_from_anchors({{0.0, t.rho0 + (1.0 - c) * s},
                             {2.0 * g, t.rho0 + (1.0 - c) * s - (3.0 - 4.0 * c) * g},
                             {t.rho0 + 2.0 * g, (1.0 - c) * s - (3.0 - 4.0 * c) * g},
                             {total - 2.0 * g, g},
                             {total, 0.0}});
}

RateCurve two_request_rate(double rhoP) {
  require_nonneg(rhoP, "rhoP");
  if (rhoP == 0.0) return RateCurve({{0.0, 0.0}});
  return curve_from_anchors({{0.0, 3.0 * rhoP},
                             {0.5 * rhoP, 2.0 * rhoP},
                             {1.5 * rhoP, rhoP},
                             {3.0 * rhoP, 0.0}});
}

RateCurve single_request_three_file_rate(double rho) {
  require_nonneg(rho, "rho");
  if (rho == 0.0) return RateCurve({{0.0, 0.0}});
  return curve_from_anchors({{0.0, 2.0 * rho}, {1.5 * rho, 0.5 * rho}, {3.0 * rho, 0.0}});
}

RateCurve mr_peak_rate_three_file(const GWTuple3Sym& t) {
  require_nonneg(t.rho0, "rho0");
  require_nonneg(t.rhoP, "rhoP");
  require_nonneg(t.rho, "rho");
  const double total = t.sum();
  if (total == 0.0) return RateCurve({{0.0, 0.0}});
  return curve_from_anchors({{0.0, t.rho0 + 3.0 * t.rhoP + 2.0 * t.rho},
                             {0.5 * t.rhoP, t.rho0 + 2.0 * t.rhoP + 2.0 * t.rho},
                             {t.rho0 + 1.5 * (t.rhoP + t.rho), t.rhoP + 0.5 * t.rho},
                             {t.rho0 + 3.0 * t.rhoP + 1.5 * t.rho, 0.5 * t.rho},
                             {total, 0.0}});
}

namespace {

// Verify that `selected` is pointwise <= `other` over selected's domain.
void check_dominates(const RateCurve& selected, const RateCurve& other, const char* family) {
  const double hi = selected.max_memory();
  const int steps = 100;
  for (int i = 0; i <= steps; ++i) {
    const double m = hi * i / steps;
    const double mine = selected.eval(m);
    const double theirs = m <= other.max_memory() ? other.eval(m) : 0.0;
    if (mine > theirs + 1e-9) {
      throw std::logic_error(std::string("gwmr_curve: ") + family +
                             " family member beats the selected operating point at M=" +
                             std::to_string(m));
    }
  }
}

}  // namespace

RateCurve gwmr_curve(const SourceModel& model, int K, Criterion criterion) {
  validate(model);
  require_receivers(K);
  if (file_count(model) == 2) {
    const GWTuple2 t = select_operating_point_two_file(model);
    RateCurve curve = criterion == Criterion::peak ? mr_peak_rate_two_file(t, K)
                                                   : mr_avg_rate_two_file(t, K);
    if (const auto* d = std::get_if<Dsbs>(&model)) {
      // Sweep the sum-tight family (H12 - 2r, r, r), r in [0, h(p1)].
      const double h12 = subset_entropy(model, FileSubset::all(2));
      const double r_max = t.rho1;
      const int steps = std::max(1, static_cast<int>(std::floor(r_max / 1e-2)));
      for (int i = 0; i <= steps; ++i) {
        const double r = std::min(r_max, r_max * i / steps);
        const GWTuple2 cand{h12 - 2.0 * r, r, r};
        RateCurve cc = criterion == Criterion::peak ? mr_peak_rate_two_file(cand, K)
                                                    : mr_avg_rate_two_file(cand, K);
        check_dominates(curve, cc, "dsbs");
      }
      (void)d;
    }
    return curve;
  }
  // Three-file schemes are defined for two receivers and worst-case rate.
  if (K != 2) {
    throw std::invalid_argument("gwmr_curve: three-file sources support K == 2 only");
  }
  if (criterion != Criterion::peak) {
    throw std::invalid_argument(
        "gwmr_curve: three-file sources support the peak criterion only");
  }
  const GWTuple3Sym t = select_operating_point_three_file(model);
  RateCurve curve = mr_peak_rate_three_file(t);
  if (std::holds_alternative<TripleBsc>(model)) {
    // Sweep mixtures between the all-common corner and the graded corner;
    // every mixture is sum-tight.
    const auto pts = three_dms_achievable_points(model);
    const GWTuple3Sym& common = pts[0];
    const GWTuple3Sym& graded = pts[2];
    for (int i = 0; i <= 100; ++i) {
      const double lam = i / 100.0;
      const GWTuple3Sym cand{(1.0 - lam) * common.rho0 + lam * graded.rho0,
                             lam * graded.rhoP, lam * graded.rho};
      check_dominates(curve, mr_peak_rate_three_file(cand), "triple_bsc");
    }
  }
  return curve;
}

}  // namespace gwcache
