#include "gwcache/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gwcache {

namespace {

double max_of_lines(const std::vector<Line>& lines, double M) {
  double best = 0.0;  // all bounds are floored at zero
  for (const auto& l : lines) best = std::max(best, l.intercept + l.slope * M);
  return best;
}

struct Entropies2 {
  double h1, h2, h12;
};

Entropies2 entropies_two(const SourceModel& model) {
  if (file_count(model) != 2) {
    throw std::invalid_argument("expected a two-file source, got " + describe(model));
  }
  return {subset_entropy(model, FileSubset{1}), subset_entropy(model, FileSubset{2}),
          subset_entropy(model, FileSubset::all(2))};
}

void require_receivers(int K) {
  if (K < 2) {
    throw std::invalid_argument("K must be >= 2, got " + std::to_string(K));
  }
}

}  // namespace

std::string BoundInstance::to_string() const {
  std::ostringstream os;
  os << "nu=" << rounds();
  for (int i = 0; i < rounds(); ++i) {
    os << (i == 0 ? " " : " | ") << "d=(";
    for (std::size_t k = 0; k < demands[i].files.size(); ++k) {
      os << (k ? "," : "") << demands[i].files[k];
    }
    os << ") S={";
    for (std::size_t k = 0; k < subsets[i].size(); ++k) {
      os << (k ? "," : "") << "r" << subsets[i][k];
    }
    os << "}";
  }
  return os.str();
}

double cutset_sum_rate_bound(const SourceModel& model, const BoundInstance& inst, double M) {
  validate(model);
  const int n = file_count(model);
  const int nu = inst.rounds();
  if (nu == 0 || static_cast<int>(inst.subsets.size()) != nu) {
    throw std::invalid_argument(
        "cutset_sum_rate_bound: demands and subsets must be nonempty and equally long");
  }
  const int K = static_cast<int>(inst.demands[0].files.size());
  if (K == 0) {
    throw std::invalid_argument("cutset_sum_rate_bound: empty demand vector");
  }
  for (const auto& d : inst.demands) {
    if (static_cast<int>(d.files.size()) != K) {
      throw std::invalid_argument("cutset_sum_rate_bound: demand vectors differ in length");
    }
    for (int f : d.files) {
      if (f < 1 || f > n) {
        throw std::invalid_argument("cutset_sum_rate_bound: file index out of range");
      }
    }
  }
  for (const auto& s : inst.subsets) {
    if (s.empty()) {
      throw std::invalid_argument("cutset_sum_rate_bound: receiver subsets must be nonempty");
    }
    for (int r : s) {
      if (r < 1 || r > K) {
        throw std::invalid_argument("cutset_sum_rate_bound: receiver index out of range");
      }
    }
  }

  // Files demanded in round i by the receivers listed in `who`.
  auto demanded = [&](int i, const std::vector<int>& who) {
    FileSubset files;
    for (int r : who) files = files.united(FileSubset{inst.demands[i].files[r - 1]});
    return files;
  };
  auto intersect = [](const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    for (int r : a) {
      if (std::find(b.begin(), b.end(), r) != b.end()) out.push_back(r);
    }
    return out;
  };

  double total = 0.0;
  FileSubset conditioning;  // accumulates the C_i across rounds
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < i; ++j) {
      const auto overlap = intersect(inst.subsets[i], inst.subsets[j]);
      conditioning = conditioning.united(demanded(j, overlap));
    }
    const FileSubset di = demanded(i, inst.subsets[i]);
    total += conditional_entropy(model, di, conditioning);
  }

  std::set<int> cut_receivers;
  for (const auto& s : inst.subsets) cut_receivers.insert(s.begin(), s.end());
  const std::vector<int> s_tilde(cut_receivers.begin(), cut_receivers.end());
  total -= static_cast<double>(s_tilde.size()) * M;

  FileSubset d_tilde, d_star;
  for (int i = 0; i < nu; ++i) {
    d_tilde = d_tilde.united(demanded(i, s_tilde));
    d_star = d_star.united(demanded(i, inst.subsets[i]));
  }
  total += subset_entropy(model, d_tilde) - subset_entropy(model, d_star);
  return std::max(0.0, total);
}

PeakBoundSearchResult search_best_peak_bound(const SourceModel& model, int K, double M,
                                             int nu_max) {
  validate(model);
  if (nu_max < 1 || nu_max > 3) {
    throw std::invalid_argument("search_best_peak_bound: nu_max must be in [1, 3]");
  }
  if (K < 1 || K > 3) {
    throw std::invalid_argument("search_best_peak_bound: K must be in [1, 3]");
  }
  const int n = file_count(model);
  int n_demands = 1;
  for (int k = 0; k < K; ++k) n_demands *= n;
  const int n_subsets = (1 << K) - 1;

  auto demand_of = [&](int code) {
    DemandVector d;
    d.files.resize(K);
    for (int k = 0; k < K; ++k) {
      d.files[k] = code % n + 1;
      code /= n;
    }
    return d;
  };
  auto subset_of = [&](int mask) {
    std::vector<int> s;
    for (int k = 1; k <= K; ++k) {
      if ((mask >> (k - 1)) & 1) s.push_back(k);
    }
    return s;
  };

  PeakBoundSearchResult best{-1.0, {}};
  const int combos = n_demands * n_subsets;
  for (int nu = 1; nu <= nu_max; ++nu) {
    long long total = 1;
    for (int i = 0; i < nu; ++i) total *= combos;
    BoundInstance inst;
    inst.demands.resize(nu);
    inst.subsets.resize(nu);
    for (long long it = 0; it < total; ++it) {
      long long code = it;
      for (int i = 0; i < nu; ++i) {
        const int c = static_cast<int>(code % combos);
        code /= combos;
        inst.demands[i] = demand_of(c % n_demands);
        inst.subsets[i] = subset_of(c / n_demands + 1);
      }
      const double value = cutset_sum_rate_bound(model, inst, M) / nu;
      if (value > best.value + 1e-15) {
        best.value = value;
        best.witness = inst;
      }
    }
  }
  return best;
}

std::vector<Line> peak_lb_lines_two_file(const SourceModel& model) {
  const auto e = entropies_two(model);
  const double hmax = std::max(e.h1, e.h2);
  return {{e.h12, -2.0}, {0.5 * (e.h12 + hmax), -1.0}, {0.5 * e.h12, -0.5}};
}

double peak_lb_two_file(const SourceModel& model, double M) {
  return max_of_lines(peak_lb_lines_two_file(model), M);
}

std::vector<Line> avg_lb_lines_two_file(const SourceModel& model, int K) {
  require_receivers(K);
  const auto e = entropies_two(model);
  const double c = std::ldexp(1.0, -K);
  const double hmax = std::max(e.h1, e.h2);
  return {{(1.0 - 2.0 * c) * e.h12 + c * (e.h1 + e.h2), -2.0 * (1.0 - c)},
          {0.5 * e.h12 + 0.25 * (e.h1 + e.h2), -1.0},
          {0.5 * e.h12 + 0.25 * hmax, -0.75},
          {0.5 * e.h12, -0.5}};
}

double avg_lb_two_file(const SourceModel& model, int K, double M) {
  return max_of_lines(avg_lb_lines_two_file(model, K), M);
}

std::vector<Line> mr_peak_lb_lines(const GWTuple2& t) {
  const double s = t.rho1 + t.rho2;
  const double rmax = std::max(t.rho1, t.rho2);
  return {{t.sum(), -2.0}, {t.rho0 + 0.5 * (s + rmax), -1.0}, {0.5 * t.sum(), -0.5}};
}

double mr_peak_lb(const GWTuple2& t, int K, double M) {
  (void)K;  // the worst-case pieces are K-independent
  return max_of_lines(mr_peak_lb_lines(t), M);
}

std::vector<Line> mr_avg_lb_lines(const GWTuple2& t, int K) {
  require_receivers(K);
  const double s = t.rho1 + t.rho2;
  const double c = std::ldexp(1.0, -K);
  const double rmax = std::max(t.rho1, t.rho2);
  return {{t.rho0 + (1.0 - c) * s, -2.0 * (1.0 - c)},
          {0.75 * t.rho0 + 0.5 * s + 0.25 * rmax, -0.75},
          {t.rho0 + 0.75 * s, -1.0},
          {0.5 * t.sum(), -0.5}};
}

double mr_avg_lb(const GWTuple2& t, int K, double M) {
  return max_of_lines(mr_avg_lb_lines(t, K), M);
}

std::vector<Line> peak_lb_lines_three_file(const SourceModel& model) {
  if (file_count(model) != 3) {
    throw std::invalid_argument("expected a three-file source, got " + describe(model));
  }
  double maxpair = 0.0;
  maxpair = std::max(maxpair, subset_entropy(model, FileSubset{1, 2}));
  maxpair = std::max(maxpair, subset_entropy(model, FileSubset{1, 3}));
  maxpair = std::max(maxpair, subset_entropy(model, FileSubset{2, 3}));
  double max1 = 0.0;
  for (int i = 1; i <= 3; ++i) max1 = std::max(max1, subset_entropy(model, FileSubset{i}));
  const double h123 = subset_entropy(model, FileSubset::all(3));
  return {{maxpair, -2.0},
          {0.5 * maxpair, -0.5},
          {h123 / 3.0, -1.0 / 3.0},
          {0.5 * (h123 + max1), -1.0}};
}

double peak_lb_three_file(const SourceModel& model, double M) {
  return max_of_lines(peak_lb_lines_three_file(model), M);
}

std::vector<Line> two_request_lb_lines(double rhoP) {
  if (rhoP < 0.0) {
    throw std::invalid_argument("two_request_lb: rhoP must be nonnegative");
  }
  return {{3.0 * rhoP, -2.0}, {2.5 * rhoP, -1.0}, {1.5 * rhoP, -0.5}};
}

double two_request_lb(double rhoP, double M) {
  return max_of_lines(two_request_lb_lines(rhoP), M);
}

GapReport gap_report(const RateCurve& achievable, const RateCurve& lower_bound,
                     const std::vector<GapCap>& caps, double m_lo, double m_hi,
                     double step) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("gap_report: step must be positive");
  }
  const double lo = std::max({m_lo, achievable.min_memory(), lower_bound.min_memory()});
  const double hi = std::min({m_hi, achievable.max_memory(), lower_bound.max_memory()});
  if (!(lo <= hi)) {
    throw std::invalid_argument("gap_report: empty memory range");
  }
  constexpr double kOptTol = 1e-9;

  auto cap_at = [&caps](double M) {
    double c = std::numeric_limits<double>::infinity();
    for (const auto& g : caps) {
      if (M >= g.m_lo - 1e-12 && M <= g.m_hi + 1e-12) c = std::min(c, g.value);
    }
    return c;
  };
  auto gap_at = [&](double M) {
    const double g = achievable.eval(M) - lower_bound.eval(M);
    if (g < -kOptTol) {
      throw std::logic_error("gap_report: lower bound exceeds achievable rate at M=" +
                             std::to_string(M));
    }
    return g;
  };

  GapReport rep;
  rep.all_pass = true;

  // Grid rows.
  for (double M = lo; M <= hi + 1e-12; M += step) {
    const double m = std::min(M, hi);
    GapRow row;
    row.M = m;
    row.r_ach = achievable.eval(m);
    row.r_lb = lower_bound.eval(m);
    row.gap = std::max(0.0, row.r_ach - row.r_lb);
    gap_at(m);  // bound-violation check
    row.cap = cap_at(m);
    row.pass = row.gap <= row.cap + 1e-9;
    rep.all_pass = rep.all_pass && row.pass;
    rep.rows.push_back(row);
    if (m >= hi) break;
  }

  // Exact analysis on the combined breakpoint knots: between consecutive
  // knots the gap is affine, so extrema and threshold crossings are exact.
  std::vector<double> knots{lo, hi};
  for (const auto& p : achievable.breakpoints()) {
    if (p.M > lo && p.M < hi) knots.push_back(p.M);
  }
  for (const auto& p : lower_bound.breakpoints()) {
    if (p.M > lo && p.M < hi) knots.push_back(p.M);
  }
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
              knots.end());

  rep.max_gap = 0.0;
  for (double k : knots) rep.max_gap = std::max(rep.max_gap, gap_at(k));

  // Optimal regions: per-knot-interval linear scan for {gap <= kOptTol}.
  std::vector<std::pair<double, double>> regions;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i], b = knots[i + 1];
    const double ga = gap_at(a), gb = gap_at(b);
    double lo_in = a, hi_in = b;
    bool any = false;
    if (ga <= kOptTol && gb <= kOptTol) {
      any = true;
    } else if (ga <= kOptTol || gb <= kOptTol) {
      // One endpoint inside: solve ga + t (gb - ga) = kOptTol on [0, 1].
      const double tcross = (kOptTol - ga) / (gb - ga);
      if (ga <= kOptTol) {
        hi_in = a + tcross * (b - a);
      } else {
        lo_in = a + tcross * (b - a);
      }
      any = true;
    }
    if (!any) continue;
    if (!regions.empty() && lo_in <= regions.back().second + 1e-9) {
      regions.back().second = std::max(regions.back().second, hi_in);
    } else {
      regions.emplace_back(lo_in, hi_in);
    }
  }
  rep.optimal_regions = std::move(regions);

  // Cap compliance must also hold at the exact knots, not just grid rows.
  for (double k : knots) {
    if (gap_at(k) > cap_at(k) + 1e-9) rep.all_pass = false;
  }
  return rep;
}

}  // namespace gwcache
