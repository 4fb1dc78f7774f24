#pragma once

// Memoryless multi-file sources used throughout the library.
//
// A source emits, per time step, one symbol tuple (X_1,...,X_N) with N = 2 or 3
// correlated binary (or component-structured) files.  Everything downstream --
// operating points, rate curves, bounds -- is driven by the joint entropies
// H(X_S) of file subsets S, so the model interface is essentially "evaluate
// subset entropies".  All entropies are in bits per source symbol (log base 2).

#include <cstdint>
#include <initializer_list>
#include <string>
#include <variant>
#include <vector>

namespace gwcache {

// Doubly symmetric binary source: X_1 ~ Bernoulli(1/2), X_2 = X_1 XOR Z with
// Z ~ Bernoulli(p0) independent.  p0 in [0, 0.5]; the endpoints (identical
// files / independent files) are allowed.
struct Dsbs {
  double p0;
};

// Three binary files, pairwise symmetric: X_1 ~ Bernoulli(1/2), and
// X_2 = X_1 XOR Z_2, X_3 = X_1 XOR Z_3 with Z_2, Z_3 iid Bernoulli(p0).
// Joint pmf  p(x1,x2,x3) = 1/2 p0^s (1-p0)^(3-s) + 1/2 p0^(3-s) (1-p0)^s,
// s = x1+x2+x3.
struct TripleBsc {
  double p0;
};

// Two files assembled from independent uniform bit blocks:
//   X_1 = (X'_1, V),  X_2 = (X'_2, V)
// with |V| = lV, |X'_1| = l1, |X'_2| = l2 bits per symbol (fractional lengths
// allowed; entropies are exactly the summed lengths).
struct Structured2 {
  double lV;
  double l1;
  double l2;
};

// Three files assembled from independent uniform bit blocks:
//   X_1 = (V, U_1, U_2, X'_1)
//   X_2 = (V, U_2, U_3, X'_2)
//   X_3 = (V, U_1, U_3, X'_3)
// |V| = lV, |U_j| = lU each, |X'_i| = lX each.  Every pair of files shares V
// and exactly one U block.
struct Structured3 {
  double lV;
  double lU;
  double lX;
};

using SourceModel = std::variant<Dsbs, TripleBsc, Structured2, Structured3>;

// Number of files (2 or 3) the model emits.
int file_count(const SourceModel& model);

// Throws std::invalid_argument if parameters are out of range
// (p0 outside [0, 0.5], negative block lengths).
void validate(const SourceModel& model);

// Short human-readable tag, e.g. "dsbs(p0=0.2)".
std::string describe(const SourceModel& model);

// A subset of file indices out of {1,...,N}, N <= 3.  Kept as a bitmask;
// bit (i-1) set means file i is in the subset.  The empty subset is
// representable (useful as a conditioning set); operations that require a
// nonempty subset check for themselves.
class FileSubset {
 public:
  constexpr FileSubset() : mask_(0) {}
  constexpr explicit FileSubset(std::uint32_t mask) : mask_(mask) {}
  FileSubset(std::initializer_list<int> indices);

  static FileSubset all(int n_files);

  bool contains(int index) const { return (mask_ >> (index - 1)) & 1u; }
  bool empty() const { return mask_ == 0; }
  int size() const;
  std::uint32_t mask() const { return mask_; }

  FileSubset united(FileSubset other) const { return FileSubset(mask_ | other.mask_); }
  FileSubset intersected(FileSubset other) const { return FileSubset(mask_ & other.mask_); }

  // Indices present, ascending (1-based).
  std::vector<int> indices() const;

  friend bool operator==(FileSubset a, FileSubset b) { return a.mask_ == b.mask_; }
  friend bool operator<(FileSubset a, FileSubset b) { return a.mask_ < b.mask_; }

 private:
  std::uint32_t mask_;
};

// Binary entropy h(p) = -p log2 p - (1-p) log2 (1-p), h(0) = h(1) = 0.
// Throws std::domain_error for p outside [0, 1].
double binary_entropy(double p);

// Inverse of h on [0, 0.5]: the unique p in [0, 0.5] with h(p) = y.
// Bisection to absolute tolerance 1e-12.  Throws std::domain_error for
// y outside [0, 1].
double inv_binary_entropy(double y);

// Joint entropy H(X_S) of the files in `subset`.
// For Dsbs/TripleBsc this enumerates the joint pmf (at most 2^3 outcomes)
// and marginalizes; for structured models it sums the lengths of the
// independent blocks appearing in the union of the subset's files.
// Throws std::invalid_argument if subset is empty or mentions a file index
// outside {1,...,N}.
double subset_entropy(const SourceModel& model, FileSubset subset);

// Conditional entropy H(X_a | X_b) = H(X_{a u b}) - H(X_b).
// `a` must be nonempty and valid; `b` may be empty (then this is H(X_a)).
double conditional_entropy(const SourceModel& model, FileSubset a, FileSubset b);

}  // namespace gwcache
