#pragma once

// Bit-exact simulation of the caching schemes on structured sources: actual
// placement, delivery and decoding of labeled bit blocks, so that rates can
// be counted in bits and losslessness can be checked bit-for-bit.
//
// Every cached item and codeword segment is a labeled XOR of "atoms"
// (individual description bits).  Decoding solves the receiver's linear
// system over GF(2) from its cache plus the codeword only, which makes the
// decoder an exact sufficiency check for these (all linear) schemes.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gwcache/allocation.hpp"
#include "gwcache/gray_wyner.hpp"
#include "gwcache/rate_curve.hpp"
#include "gwcache/source_model.hpp"

namespace gwcache {

using Bits = std::vector<std::uint8_t>;  // one byte per bit, values 0/1

// The description library of one block of F source symbols: for each file
// subset s, the description W_s holds rho_s * F bits.
struct BitLibrary {
  int n_files = 0;
  int F = 0;
  std::map<FileSubset, Bits> descriptions;

  int description_bits(FileSubset key) const;
  // Reassemble file i: concatenation of the descriptions containing i,
  // larger subsets first (ties by ascending subset mask).
  Bits file_bits(int file_index) const;
};

// Draw the description blocks of a structured source (independent fair bits)
// deterministically from `seed`.  All block lengths must be integral at this
// F (throws std::invalid_argument otherwise, as for non-structured models).
BitLibrary gw_encode_structured(const SourceModel& model, std::uint64_t seed, int F);

// A labeled bit block: bits[i] is the XOR of the library atoms in atoms[i].
struct Segment {
  std::string label;
  std::vector<std::vector<int>> atoms;
  Bits bits;

  std::size_t bit_count() const { return bits.size(); }
};

struct CacheContents {
  std::string tag;  // structural recipe, e.g. "lfu:10|xor(q=3)"
  std::vector<Segment> segments;

  std::size_t bit_count() const;
};

struct Codeword {
  std::vector<Segment> segments;

  std::size_t bit_count() const;
};

// One line per segment: "SEG <label> <len_bits>".
std::string codeword_trace(const Codeword& cw);

struct DecodeResult {
  bool ok = false;
  Bits file;            // reconstructed bits (empty on failure)
  std::string missing;  // label of the first unrecoverable bit on failure
};

// ---------------------------------------------------------------------------
// Two-file scheme: common description cached most-popular-prefix at every
// receiver; private descriptions placed by memory sharing between the
// adjacent placement anchors of the chosen criterion's private curve.
// ---------------------------------------------------------------------------
class TwoFileScheme {
 public:
  // Validates that lib's description lengths equal t * F, that M is within
  // [0, t.sum()], and that every split the memory share requires lands on
  // whole bits (throws std::invalid_argument otherwise).
  TwoFileScheme(const GWTuple2& t, int K, double M, Criterion criterion, BitLibrary lib);
  TwoFileScheme(const TwoFileScheme&);
  TwoFileScheme(TwoFileScheme&&) noexcept;
  TwoFileScheme& operator=(const TwoFileScheme&);
  TwoFileScheme& operator=(TwoFileScheme&&) noexcept;
  ~TwoFileScheme();

  int receivers() const { return K_; }
  int block_symbols() const { return lib_.F; }
  const Allocation2& allocation() const { return alloc_; }
  const CacheContents& cache(int receiver) const { return caches_.at(receiver - 1); }

  // demand[k-1] in {1, 2} is receiver k's file.  Returns the broadcast.
  Codeword deliver(const std::vector<int>& demand) const;

  // Reconstruct receiver's demanded file from its cache and the codeword.
  DecodeResult decode(int receiver, const std::vector<int>& demand, const Codeword& cw) const;

  const BitLibrary& library() const { return lib_; }

 private:
  struct Part;  // memory-sharing slice of the private placement
  GWTuple2 t_;
  int K_;
  double M_;
  Criterion criterion_;
  BitLibrary lib_;
  Allocation2 alloc_;
  int lfu_bits_;
  std::vector<Part> parts_;
  std::vector<CacheContents> caches_;
};

TwoFileScheme place_two_file(const GWTuple2& t, int K, double M, Criterion criterion,
                             const BitLibrary& lib);

// ---------------------------------------------------------------------------
// Two-request network: three descriptions of rate rhoP each; two receivers,
// each requesting the two descriptions covering one file index (demand i in
// {1,2,3} requests the two pairwise descriptions containing i).
// ---------------------------------------------------------------------------
class TwoRequestScheme {
 public:
  // lib must hold the three pairwise descriptions at rhoP * F bits each (its
  // other descriptions, if present, must be empty).  Placement anchors sit at
  // M in {0, rhoP/2, rhoP, 3 rhoP/2, 3 rhoP}; memory sharing covers the rest.
  TwoRequestScheme(double rhoP, double M, BitLibrary lib);
  TwoRequestScheme(const TwoRequestScheme&);
  TwoRequestScheme(TwoRequestScheme&&) noexcept;
  TwoRequestScheme& operator=(const TwoRequestScheme&);
  TwoRequestScheme& operator=(TwoRequestScheme&&) noexcept;
  ~TwoRequestScheme();

  const CacheContents& cache(int receiver) const { return caches_.at(receiver - 1); }
  int block_symbols() const { return lib_.F; }

  Codeword deliver(const std::vector<int>& demand) const;  // demand: 2 entries in 1..3

  // Reconstructs the two requested descriptions, concatenated by ascending
  // subset mask.
  DecodeResult decode(int receiver, const std::vector<int>& demand, const Codeword& cw) const;

  const BitLibrary& library() const { return lib_; }

 private:
  struct Part;
  double rhoP_;
  double M_;
  BitLibrary lib_;
  std::vector<Part> parts_;
  std::vector<CacheContents> caches_;
};

TwoRequestScheme place_two_request(double rhoP, double M, const BitLibrary& lib);

// ---------------------------------------------------------------------------
// Three-file scheme, two receivers: common prefix caching + the two-request
// placement on the pairwise descriptions + coded placement on the private
// descriptions, with the budget split by allocate_three_file.
// ---------------------------------------------------------------------------
class ThreeFileScheme {
 public:
  ThreeFileScheme(const GWTuple3Sym& t, double M, BitLibrary lib);
  ThreeFileScheme(const ThreeFileScheme&);
  ThreeFileScheme(ThreeFileScheme&&) noexcept;
  ThreeFileScheme& operator=(const ThreeFileScheme&);
  ThreeFileScheme& operator=(ThreeFileScheme&&) noexcept;
  ~ThreeFileScheme();

  const Allocation3& allocation() const { return alloc_; }
  const CacheContents& cache(int receiver) const { return caches_.at(receiver - 1); }
  int block_symbols() const { return lib_.F; }

  Codeword deliver(const std::vector<int>& demand) const;  // 2 entries in 1..3
  DecodeResult decode(int receiver, const std::vector<int>& demand, const Codeword& cw) const;

  const BitLibrary& library() const { return lib_; }

 private:
  struct PairPart;
  struct PrivPart;
  GWTuple3Sym t_;
  double M_;
  BitLibrary lib_;
  Allocation3 alloc_;
  int lfu_bits_;
  std::vector<PairPart> pair_parts_;
  std::vector<PrivPart> priv_parts_;
  std::vector<CacheContents> caches_;
};

ThreeFileScheme place_three_file(const GWTuple3Sym& t, double M, const BitLibrary& lib);

// ---------------------------------------------------------------------------
// Rate measurement over all demand tuples.
// ---------------------------------------------------------------------------
struct RateMeasurement {
  // (demand tuple, delivered bits / F) for every demand, in enumeration order.
  std::vector<std::pair<std::vector<int>, double>> per_demand;
  double peak = 0.0;     // worst case
  double average = 0.0;  // uniform mean
};

RateMeasurement measure_rate(const TwoFileScheme& scheme);
RateMeasurement measure_rate(const TwoRequestScheme& scheme);
RateMeasurement measure_rate(const ThreeFileScheme& scheme);

}  // namespace gwcache
