#include "gwcache/gray_wyner.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gwcache {

namespace {

void require_two_file(const SourceModel& model, const char* op) {
  if (file_count(model) != 2) {
    throw std::invalid_argument(std::string(op) + ": requires a two-file source, got " +
                                describe(model));
  }
}

void require_three_file(const SourceModel& model, const char* op) {
  if (file_count(model) != 3) {
    throw std::invalid_argument(std::string(op) + ": requires a three-file source, got " +
                                describe(model));
  }
}

// Crossover probability p1 such that cascading two BSC(p1) channels yields
// BSC(p0): 2 p1 (1 - p1) = p0.
double dsbs_p1(double p0) { return 0.5 * (1.0 - std::sqrt(1.0 - 2.0 * p0)); }

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

}  // namespace

bool sum_tight(const SourceModel& model, const GWTuple2& t, double tol) {
  require_two_file(model, "sum_tight");
  return std::abs(t.sum() - subset_entropy(model, FileSubset::all(2))) <= tol;
}

bool sum_tight(const SourceModel& model, const GWTuple3Sym& t, double tol) {
  require_three_file(model, "sum_tight");
  return std::abs(t.sum() - subset_entropy(model, FileSubset::all(3))) <= tol;
}

double dsbs_wyner_boundary(double p0, double rho) {
  if (!(p0 > 0.0 && p0 < 0.5)) {
    throw std::domain_error("dsbs_wyner_boundary: p0 must lie in (0, 0.5), got " +
                            std::to_string(p0));
  }
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw std::domain_error("dsbs_wyner_boundary: rho must lie in [0, 1], got " +
                            std::to_string(rho));
  }
  const double p1 = dsbs_p1(p0);
  const double hp1 = binary_entropy(p1);
  if (rho < hp1) {
    // Below the symmetric-plane knee the boundary is the straight line of
    // slope -2 through the total entropy.
    return 1.0 + binary_entropy(p0) - 2.0 * rho;
  }
  // Curved branch: parameterize by a = h^{-1}(rho) in [p1, 0.5].
  const double a = inv_binary_entropy(rho);
  return 1.0 + binary_entropy(p0) + xlog2x(p0) - p0  // p0 * log2(p0 / 2)
         + xlog2x(a - 0.5 * p0) + xlog2x(1.0 - a - 0.5 * p0);
}

GWTuple2 select_operating_point_two_file(const SourceModel& model) {
  require_two_file(model, "select_operating_point_two_file");
  validate(model);
  if (const auto* s = std::get_if<Structured2>(&model)) {
    return GWTuple2{s->lV, s->l1, s->l2};
  }
  const auto& d = std::get<Dsbs>(model);
  // Knee of the boundary: private rates h(p1) each, common rate making the
  // tuple sum-tight.  Degenerate endpoints fall out of the same formulas:
  // p0 = 0 -> (1, 0, 0); p0 = 0.5 -> (0, 1, 1).
  const double hp1 = binary_entropy(dsbs_p1(d.p0));
  return GWTuple2{1.0 + binary_entropy(d.p0) - 2.0 * hp1, hp1, hp1};
}

double mk_threshold(const SourceModel& model, int K) {
  require_two_file(model, "mk_threshold");
  if (K < 2) {
    throw std::invalid_argument("mk_threshold: K must be >= 2, got " + std::to_string(K));
  }
  const GWTuple2 t = select_operating_point_two_file(model);
  return std::min(t.rho1, t.rho2) / static_cast<double>(K);
}

std::array<GWTuple3Sym, 4> three_dms_achievable_points(const SourceModel& model) {
  require_three_file(model, "three_dms_achievable_points");
  validate(model);
  const double h123 = subset_entropy(model, FileSubset::all(3));
  const double h1 = subset_entropy(model, FileSubset{1});
  const double h2g1 = conditional_entropy(model, FileSubset{2}, FileSubset{1});
  const double h3g12 = conditional_entropy(model, FileSubset{3}, FileSubset{1, 2});
  return {
      GWTuple3Sym{h123, 0.0, 0.0},
      GWTuple3Sym{0.0, 0.0, h1},
      GWTuple3Sym{h1, h2g1 / 3.0, h3g12 / 3.0},
      GWTuple3Sym{h1, 0.0, 2.0 * h2g1 / 3.0},
  };
}

GWTuple3Sym select_operating_point_three_file(const SourceModel& model) {
  require_three_file(model, "select_operating_point_three_file");
  validate(model);
  if (const auto* s = std::get_if<Structured3>(&model)) {
    return GWTuple3Sym{s->lV, s->lU, s->lX};
  }
  // TripleBsc: the graded corner (H(X1), H(X2|X1)/3, H(X3|X1,X2)/3) is
  // sum-tight by the chain rule and maximizes the private rate within the
  // achievable corner family.
  return three_dms_achievable_points(model)[2];
}

namespace {

bool check_cut(double lhs, double rhs, const char* what, std::string* violation) {
  if (lhs <= rhs + 1e-9) return true;
  if (violation != nullptr) {
    std::ostringstream os;
    os << what << ": " << lhs << " > " << rhs;
    *violation = os.str();
  }
  return false;
}

}  // namespace

bool verify_membership_structured(const SourceModel& model, const GWTuple3Sym& t,
                                  std::string* violation) {
  require_three_file(model, "verify_membership_structured");
  const double h123 = subset_entropy(model, FileSubset::all(3));
  if (!check_cut(h123, t.rho0 + 3.0 * t.rhoP + 3.0 * t.rho, "H(X1,X2,X3) cut", violation)) {
    return false;
  }
  static const FileSubset pairs[] = {FileSubset{1, 2}, FileSubset{1, 3}, FileSubset{2, 3}};
  for (const auto& pr : pairs) {
    std::ostringstream name;
    name << "H(X" << pr.indices()[0] << ",X" << pr.indices()[1] << ") cut";
    if (!check_cut(subset_entropy(model, pr), t.rho0 + 3.0 * t.rhoP + 2.0 * t.rho,
                   name.str().c_str(), violation)) {
      return false;
    }
  }
  for (int i = 1; i <= 3; ++i) {
    std::ostringstream name;
    name << "H(X" << i << ") cut";
    if (!check_cut(subset_entropy(model, FileSubset{i}), t.rho0 + 2.0 * t.rhoP + t.rho,
                   name.str().c_str(), violation)) {
      return false;
    }
  }
  return true;
}

bool verify_membership_structured(const SourceModel& model, const GWTuple2& t,
                                  std::string* violation) {
  require_two_file(model, "verify_membership_structured");
  if (!check_cut(subset_entropy(model, FileSubset::all(2)), t.sum(), "H(X1,X2) cut",
                 violation)) {
    return false;
  }
  if (!check_cut(subset_entropy(model, FileSubset{1}), t.rho0 + t.rho1, "H(X1) cut",
                 violation)) {
    return false;
  }
  if (!check_cut(subset_entropy(model, FileSubset{2}), t.rho0 + t.rho2, "H(X2) cut",
                 violation)) {
    return false;
  }
  return true;
}

}  // namespace gwcache
