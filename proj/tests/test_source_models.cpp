#include "gwcache/source_model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"

using namespace gwcache;

namespace {

// Independent oracle: entropy of an explicit pmf, -sum p log2 p.
double pmf_entropy(const std::vector<double>& pmf) {
  double h = 0.0;
  for (double p : pmf) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

// Joint pmf of the two-file symmetric source over (x1, x2).
std::vector<double> dsbs_pmf(double p0) {
  return {0.5 * (1 - p0), 0.5 * p0, 0.5 * p0, 0.5 * (1 - p0)};
}

// Joint pmf of the three-file symmetric source over (x1, x2, x3);
// cell weight depends only on s = x1 + x2 + x3.
std::vector<double> triple_pmf(double p0) {
  std::vector<double> pmf(8);
  for (int x = 0; x < 8; ++x) {
    const int s = ((x >> 0) & 1) + ((x >> 1) & 1) + ((x >> 2) & 1);
    pmf[x] = 0.5 * std::pow(p0, s) * std::pow(1 - p0, 3 - s) +
             0.5 * std::pow(p0, 3 - s) * std::pow(1 - p0, s);
  }
  return pmf;
}

// Marginalize a pmf over the files NOT in `keep` (files are pmf index bits,
// file i <-> bit i-1), then take the entropy.
double marginal_entropy(const std::vector<double>& pmf, int n_files, FileSubset keep) {
  std::vector<double> m(1u << n_files, 0.0);
  for (std::size_t x = 0; x < pmf.size(); ++x) {
    std::size_t y = 0;
    int out_bit = 0;
    for (int i = 1; i <= n_files; ++i) {
      if (keep.contains(i)) {
        y |= ((x >> (i - 1)) & 1u) << out_bit;
        ++out_bit;
      }
    }
    m[y] += pmf[x];
  }
  return pmf_entropy(m);
}

double subset_entropy_or_zero(const SourceModel& model, FileSubset s) {
  return s.empty() ? 0.0 : subset_entropy(model, s);
}

}  // namespace

TEST_CASE("binary entropy basics") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(binary_entropy(0.2) == doctest::Approx(0.7219280948873623).epsilon(1e-13));
  for (double p : {0.01, 0.1, 0.25, 0.4}) {
    CHECK(binary_entropy(p) == doctest::Approx(binary_entropy(1.0 - p)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(binary_entropy(-0.01), std::domain_error);
  CHECK_THROWS_AS(binary_entropy(1.01), std::domain_error);
}

TEST_CASE("inverse binary entropy") {
  CHECK(inv_binary_entropy(0.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(inv_binary_entropy(1.0) == doctest::Approx(0.5).epsilon(1e-12));
  // Round trip h(h^-1(y)) = y across the range.
  for (int i = 0; i <= 100; ++i) {
    const double y = i / 100.0;
    CHECK(binary_entropy(inv_binary_entropy(y)) == doctest::Approx(y).epsilon(1e-10));
  }
  // Monotone on a grid.
  double prev = -1.0;
  for (int i = 0; i <= 50; ++i) {
    const double p = inv_binary_entropy(i / 50.0);
    CHECK(p >= prev);
    prev = p;
  }
  CHECK_THROWS_AS(inv_binary_entropy(-0.1), std::domain_error);
  CHECK_THROWS_AS(inv_binary_entropy(1.1), std::domain_error);
}

TEST_CASE("file subset operations") {
  FileSubset s{1, 3};
  CHECK(s.contains(1));
  CHECK(!s.contains(2));
  CHECK(s.contains(3));
  CHECK(s.size() == 2);
  CHECK(s.indices() == std::vector<int>{1, 3});
  CHECK(FileSubset::all(3).mask() == 0b111u);
  CHECK(FileSubset::all(2).mask() == 0b011u);
  CHECK(s.united(FileSubset{2}) == FileSubset::all(3));
  CHECK(s.intersected(FileSubset{3}) == FileSubset{3});
  CHECK(FileSubset{}.empty());
  CHECK(FileSubset{1} < FileSubset{2});
}

TEST_CASE("two-file symmetric source entropies vs pmf oracle") {
  const SourceModel model = Dsbs{0.2};
  CHECK(file_count(model) == 2);
  CHECK(subset_entropy(model, FileSubset{1}) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(subset_entropy(model, FileSubset{2}) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(subset_entropy(model, FileSubset::all(2)) ==
        doctest::Approx(1.7219280948873623).epsilon(1e-13));
  CHECK(conditional_entropy(model, FileSubset{1}, FileSubset{2}) ==
        doctest::Approx(binary_entropy(0.2)).epsilon(1e-12));

  for (double p0 : {0.0, 0.05, 0.2, 0.35, 0.5}) {
    const SourceModel m = Dsbs{p0};
    const auto pmf = dsbs_pmf(p0);
    for (std::uint32_t mask = 1; mask < 4; ++mask) {
      CHECK(subset_entropy(m, FileSubset(mask)) ==
            doctest::Approx(marginal_entropy(pmf, 2, FileSubset(mask))).epsilon(1e-12));
    }
  }
}

TEST_CASE("three-file symmetric source pmf cells and entropies") {
  const double p0 = 0.05;
  const auto pmf = triple_pmf(p0);
  // Corner cells (all bits equal) and single-flip cells.
  CHECK(pmf[0b000] == doctest::Approx(0.42875).epsilon(1e-12));
  CHECK(pmf[0b111] == doctest::Approx(0.42875).epsilon(1e-12));
  for (int x : {0b001, 0b010, 0b100, 0b011, 0b101, 0b110}) {
    CHECK(pmf[x] == doctest::Approx(0.02375).epsilon(1e-12));
  }
  double total = 0.0;
  for (double p : pmf) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));

  const SourceModel model = TripleBsc{p0};
  CHECK(file_count(model) == 3);
  CHECK(subset_entropy(model, FileSubset{1}) == doctest::Approx(1.0).epsilon(1e-13));
  // The pair (X1, X2) is a two-file symmetric source with flip probability
  // 2 p0 (1 - p0).
  const double pair = 1.0 + binary_entropy(2 * p0 * (1 - p0));
  CHECK(subset_entropy(model, FileSubset{1, 2}) == doctest::Approx(pair).epsilon(1e-12));
  for (std::uint32_t mask = 1; mask < 8; ++mask) {
    CHECK(subset_entropy(model, FileSubset(mask)) ==
          doctest::Approx(marginal_entropy(pmf, 3, FileSubset(mask))).epsilon(1e-12));
  }
}

TEST_CASE("structured sources: block-length entropies") {
  const SourceModel two = Structured2{0.5, 0.3, 0.4};
  CHECK(file_count(two) == 2);
  CHECK(subset_entropy(two, FileSubset{1}) == doctest::Approx(0.8).epsilon(1e-13));
  CHECK(subset_entropy(two, FileSubset{2}) == doctest::Approx(0.9).epsilon(1e-13));
  CHECK(subset_entropy(two, FileSubset::all(2)) == doctest::Approx(1.2).epsilon(1e-13));
  CHECK(conditional_entropy(two, FileSubset{1}, FileSubset{2}) ==
        doctest::Approx(0.3).epsilon(1e-13));

  const SourceModel three = Structured3{0.5, 1.0, 1.0};
  CHECK(file_count(three) == 3);
  CHECK(subset_entropy(three, FileSubset{1}) == doctest::Approx(3.5).epsilon(1e-13));
  CHECK(subset_entropy(three, FileSubset{1, 2}) == doctest::Approx(5.5).epsilon(1e-13));
  CHECK(subset_entropy(three, FileSubset::all(3)) == doctest::Approx(6.5).epsilon(1e-13));
  // Every pair shares exactly the common block and one pairwise block.
  CHECK(conditional_entropy(three, FileSubset{3}, FileSubset{1, 2}) ==
        doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("model validation and description") {
  CHECK_THROWS_AS(validate(SourceModel{Dsbs{-0.1}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(SourceModel{Dsbs{0.51}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(SourceModel{TripleBsc{0.6}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(SourceModel{Structured2{-0.1, 0.3, 0.4}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(SourceModel{Structured3{0.5, -1.0, 1.0}}), std::invalid_argument);
  CHECK_NOTHROW(validate(SourceModel{Dsbs{0.2}}));
  CHECK(describe(SourceModel{Dsbs{0.2}}).find("dsbs") != std::string::npos);
  CHECK(!describe(SourceModel{Structured3{1, 1, 1}}).empty());
}

TEST_CASE("subset entropy argument checking") {
  const SourceModel model = Dsbs{0.2};
  CHECK_THROWS_AS(subset_entropy(model, FileSubset{}), std::invalid_argument);
  CHECK_THROWS_AS(subset_entropy(model, FileSubset{3}), std::invalid_argument);
  CHECK_THROWS_AS(subset_entropy(SourceModel{TripleBsc{0.1}}, FileSubset(std::uint32_t{8})),
                  std::invalid_argument);
}

TEST_CASE("entropy monotonicity and submodularity over all subsets") {
  std::mt19937_64 rng(20260817);
  std::uniform_real_distribution<double> unif(0.0, 1.5);

  std::vector<SourceModel> models;
  for (double p0 : {0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5}) models.push_back(TripleBsc{p0});
  for (int i = 0; i < 40; ++i) models.push_back(Structured3{unif(rng), unif(rng), unif(rng)});

  for (const auto& model : models) {
    for (std::uint32_t a = 0; a < 8; ++a) {
      for (std::uint32_t b = 0; b < 8; ++b) {
        const FileSubset A(a), B(b);
        const double hA = subset_entropy_or_zero(model, A);
        const double hB = subset_entropy_or_zero(model, B);
        const double hU = subset_entropy_or_zero(model, A.united(B));
        const double hI = subset_entropy_or_zero(model, A.intersected(B));
        if ((a & b) == a) {  // A subset of B: monotone
          CHECK(hA <= hB + 1e-12);
        }
        CHECK(hU + hI <= hA + hB + 1e-12);  // submodular
      }
    }
  }
}
