#include "gwcache/source_model.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace gwcache {

namespace {

void check_p0(double p0, const char* model_name) {
  if (!(p0 >= 0.0 && p0 <= 0.5)) {
    throw std::invalid_argument(std::string(model_name) +
                                ": p0 must lie in [0, 0.5], got " + std::to_string(p0));
  }
}

void check_nonneg(double v, const char* what) {
  if (!(v >= 0.0)) {
    throw std::invalid_argument(std::string(what) + " must be nonnegative, got " +
                                std::to_string(v));
  }
}

double plog2p(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

// Entropy of a pmf given as a list of probabilities (zeros allowed).
double pmf_entropy(const std::vector<double>& pmf) {
  double h = 0.0;
  for (double p : pmf) h += plog2p(p);
  return h;
}

// Joint pmf of (X_1,...,X_N) over outcomes indexed by bitmask x
// (bit i-1 of x = value of X_i).
std::vector<double> joint_pmf(const Dsbs& m) {
  const double p = m.p0;
  // p(x1,x2) = 1/2 (1-p) if x1 == x2, 1/2 p otherwise.
  return {0.5 * (1 - p), 0.5 * p, 0.5 * p, 0.5 * (1 - p)};
}

std::vector<double> joint_pmf(const TripleBsc& m) {
  const double p = m.p0;
  std::vector<double> pmf(8, 0.0);
  for (int x = 0; x < 8; ++x) {
    const int s = std::popcount(static_cast<unsigned>(x));
    pmf[x] = 0.5 * std::pow(p, s) * std::pow(1 - p, 3 - s) +
             0.5 * std::pow(p, 3 - s) * std::pow(1 - p, s);
  }
  return pmf;
}

// Marginal entropy of the coordinates selected by `mask` under `pmf`.
double marginal_entropy(const std::vector<double>& pmf, std::uint32_t mask) {
  std::map<std::uint32_t, double> marg;
  for (std::uint32_t x = 0; x < pmf.size(); ++x) {
    marg[x & mask] += pmf[x];
  }
  std::vector<double> probs;
  probs.reserve(marg.size());
  for (const auto& [key, p] : marg) probs.push_back(p);
  return pmf_entropy(probs);
}

}  // namespace

int file_count(const SourceModel& model) {
  return std::visit(
      [](const auto& m) -> int {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Dsbs> || std::is_same_v<T, Structured2>) {
          return 2;
        } else {
          return 3;
        }
      },
      model);
}

void validate(const SourceModel& model) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Dsbs>) {
          check_p0(m.p0, "Dsbs");
        } else if constexpr (std::is_same_v<T, TripleBsc>) {
          check_p0(m.p0, "TripleBsc");
        } else if constexpr (std::is_same_v<T, Structured2>) {
          check_nonneg(m.lV, "Structured2.lV");
          check_nonneg(m.l1, "Structured2.l1");
          check_nonneg(m.l2, "Structured2.l2");
        } else {
          check_nonneg(m.lV, "Structured3.lV");
          check_nonneg(m.lU, "Structured3.lU");
          check_nonneg(m.lX, "Structured3.lX");
        }
      },
      model);
}

std::string describe(const SourceModel& model) {
  std::ostringstream os;
  std::visit(
      [&os](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Dsbs>) {
          os << "dsbs(p0=" << m.p0 << ")";
        } else if constexpr (std::is_same_v<T, TripleBsc>) {
          os << "triple_bsc(p0=" << m.p0 << ")";
        } else if constexpr (std::is_same_v<T, Structured2>) {
          os << "structured2(lV=" << m.lV << ",l1=" << m.l1 << ",l2=" << m.l2 << ")";
        } else {
          os << "structured3(lV=" << m.lV << ",lU=" << m.lU << ",lX=" << m.lX << ")";
        }
      },
      model);
  return os.str();
}

FileSubset::FileSubset(std::initializer_list<int> indices) : mask_(0) {
  for (int i : indices) {
    if (i < 1 || i > 32) {
      throw std::invalid_argument("FileSubset: index out of range: " + std::to_string(i));
    }
    mask_ |= 1u << (i - 1);
  }
}

FileSubset FileSubset::all(int n_files) {
  return FileSubset((1u << n_files) - 1u);
}

int FileSubset::size() const { return std::popcount(mask_); }

std::vector<int> FileSubset::indices() const {
  std::vector<int> out;
  for (int i = 1; i <= 32; ++i) {
    if (contains(i)) out.push_back(i);
  }
  return out;
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("binary_entropy: p must lie in [0, 1], got " +
                            std::to_string(p));
  }
  return plog2p(p) + plog2p(1.0 - p);
}

double inv_binary_entropy(double y) {
  if (!(y >= 0.0 && y <= 1.0)) {
    throw std::domain_error("inv_binary_entropy: y must lie in [0, 1], got " +
                            std::to_string(y));
  }
  if (y == 0.0) return 0.0;
  if (y == 1.0) return 0.5;
  double lo = 0.0, hi = 0.5;
  // h is strictly increasing on [0, 0.5]; bisect until the bracket is tighter
  // than the 1e-12 tolerance.
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (binary_entropy(mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double subset_entropy(const SourceModel& model, FileSubset subset) {
  validate(model);
  const int n = file_count(model);
  if (subset.empty()) {
    throw std::invalid_argument("subset_entropy: subset must be nonempty");
  }
  if (subset.mask() >= (1u << n)) {
    throw std::invalid_argument("subset_entropy: subset mentions a file index beyond N=" +
                                std::to_string(n));
  }
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Dsbs>) {
          return marginal_entropy(joint_pmf(m), subset.mask());
        } else if constexpr (std::is_same_v<T, TripleBsc>) {
          return marginal_entropy(joint_pmf(m), subset.mask());
        } else if constexpr (std::is_same_v<T, Structured2>) {
          // Union of blocks: V appears in every file, X'_i only in file i.
          double h = m.lV;
          if (subset.contains(1)) h += m.l1;
          if (subset.contains(2)) h += m.l2;
          return h;
        } else {
          // U_1 in files {1,3}, U_2 in files {1,2}, U_3 in files {2,3}.
          double h = m.lV;
          if (subset.contains(1) || subset.contains(3)) h += m.lU;
          if (subset.contains(1) || subset.contains(2)) h += m.lU;
          if (subset.contains(2) || subset.contains(3)) h += m.lU;
          h += m.lX * subset.size();
          return h;
        }
      },
      model);
}

double conditional_entropy(const SourceModel& model, FileSubset a, FileSubset b) {
  if (a.empty()) {
    throw std::invalid_argument("conditional_entropy: left subset must be nonempty");
  }
  if (b.empty()) return subset_entropy(model, a);
  return subset_entropy(model, a.united(b)) - subset_entropy(model, b);
}

}  // namespace gwcache
