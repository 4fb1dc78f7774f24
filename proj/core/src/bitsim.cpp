#include "gwcache/bitsim.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gwcache {

namespace {

// ---------------------------------------------------------------------------
// Atom bookkeeping: every description bit gets a global index.
// ---------------------------------------------------------------------------

std::string key_name(FileSubset s) {
  std::string n = "W";
  for (int i : s.indices()) n += std::to_string(i);
  return n;
}

struct AtomSpace {
  std::vector<FileSubset> keys;  // ascending mask (map order)
  std::vector<int> len;
  std::vector<int> off;
  int total = 0;

  static AtomSpace from(const BitLibrary& lib) {
    AtomSpace sp;
    for (const auto& [key, bits] : lib.descriptions) {
      sp.keys.push_back(key);
      sp.len.push_back(static_cast<int>(bits.size()));
      sp.off.push_back(sp.total);
      sp.total += static_cast<int>(bits.size());
    }
    return sp;
  }

  int key_index(FileSubset key) const {
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (keys[i] == key) return static_cast<int>(i);
    }
    throw std::invalid_argument("unknown description " + key_name(key));
  }

  int atom(FileSubset key, int i) const { return off[key_index(key)] + i; }

  std::string atom_label(int a) const {
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (a >= off[i] && a < off[i] + len[i]) {
        return key_name(keys[i]) + "[" + std::to_string(a - off[i]) + "]";
      }
    }
    return "atom" + std::to_string(a);
  }
};

int exact_bits(double x, const char* what) {
  const long long r = std::llround(x);
  if (std::abs(x - static_cast<double>(r)) > 1e-6) {
    throw std::invalid_argument(std::string(what) +
                                " does not land on whole bits at this F (got " +
                                std::to_string(x) + ")");
  }
  return static_cast<int>(r);
}

void require_even(int bits, const char* what) {
  if (bits % 2 != 0) {
    throw std::invalid_argument(std::string(what) + ": bit count " + std::to_string(bits) +
                                " must be even at this F");
  }
}

std::string range_label(FileSubset key, int start, int len) {
  return key_name(key) + "[" + std::to_string(start) + "," + std::to_string(start + len) + ")";
}

// A term of an XOR segment: `len` bits of `key` starting at `start`.
struct Term {
  FileSubset key;
  int start;
};

Segment make_segment(const AtomSpace& sp, const BitLibrary& lib, const std::vector<Term>& terms,
                     int len, std::string label) {
  Segment seg;
  seg.label = std::move(label);
  seg.atoms.resize(len);
  seg.bits.assign(len, 0);
  for (int i = 0; i < len; ++i) {
    std::vector<int>& combo = seg.atoms[i];
    std::uint8_t v = 0;
    for (const auto& t : terms) {
      const int a = sp.atom(t.key, t.start + i);
      // XOR semantics: a repeated atom cancels.
      auto it = std::find(combo.begin(), combo.end(), a);
      if (it != combo.end()) {
        combo.erase(it);
      } else {
        combo.push_back(a);
      }
      v ^= lib.descriptions.at(t.key).at(t.start + i);
    }
    std::sort(combo.begin(), combo.end());
    seg.bits[i] = v;
  }
  return seg;
}

Segment range_segment(const AtomSpace& sp, const BitLibrary& lib, FileSubset key, int start,
                      int len) {
  return make_segment(sp, lib, {{key, start}}, len, range_label(key, start, len));
}

std::string xor_label(const std::vector<Term>& terms, int len) {
  std::string s;
  for (const auto& t : terms) {
    if (!s.empty()) s += "+";
    s += range_label(t.key, t.start, len);
  }
  return s;
}

// ---------------------------------------------------------------------------
// GF(2) elimination over atoms; rows carry their bit value.
// ---------------------------------------------------------------------------

class Gf2Solver {
 public:
  explicit Gf2Solver(int n_atoms)
      : n_(n_atoms), words_((n_atoms + 63) / 64), pivot_(n_atoms, -1) {}

  void add_segment(const Segment& seg) {
    for (std::size_t i = 0; i < seg.atoms.size(); ++i) {
      std::vector<std::uint64_t> row(words_, 0);
      for (int a : seg.atoms[i]) row[a >> 6] ^= 1ull << (a & 63);
      std::uint8_t val = seg.bits[i];
      insert(std::move(row), val);
    }
  }

  // Value of a single atom if determined by the added rows.
  std::optional<std::uint8_t> query(int atom) const {
    std::vector<std::uint64_t> v(words_, 0);
    v[atom >> 6] = 1ull << (atom & 63);
    std::uint8_t val = 0;
    int c;
    while ((c = lowest_bit(v)) >= 0) {
      const int r = pivot_[c];
      if (r < 0) return std::nullopt;
      for (int w = 0; w < words_; ++w) v[w] ^= rows_[r][w];
      val ^= vals_[r];
    }
    return val;
  }

 private:
  int lowest_bit(const std::vector<std::uint64_t>& v) const {
    for (int w = 0; w < words_; ++w) {
      if (v[w]) return (w << 6) + std::countr_zero(v[w]);
    }
    return -1;
  }

  void insert(std::vector<std::uint64_t> row, std::uint8_t val) {
    int c;
    while ((c = lowest_bit(row)) >= 0) {
      const int r = pivot_[c];
      if (r < 0) {
        pivot_[c] = static_cast<int>(rows_.size());
        rows_.push_back(std::move(row));
        vals_.push_back(val);
        return;
      }
      for (int w = 0; w < words_; ++w) row[w] ^= rows_[r][w];
      val ^= vals_[r];
    }
    // Redundant (or, if val were 1, inconsistent) row; schemes here are
    // consistent by construction, so nothing to keep.
  }

  int n_;
  int words_;
  std::vector<std::vector<std::uint64_t>> rows_;
  std::vector<std::uint8_t> vals_;
  std::vector<int> pivot_;
};

// Descriptions containing `file`, larger subsets first, ties ascending mask.
std::vector<FileSubset> assembly_order(const BitLibrary& lib, int file) {
  std::vector<FileSubset> keys;
  for (const auto& [key, bits] : lib.descriptions) {
    if (key.contains(file)) keys.push_back(key);
  }
  std::stable_sort(keys.begin(), keys.end(), [](FileSubset a, FileSubset b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.mask() < b.mask();
  });
  return keys;
}

DecodeResult decode_keys(const AtomSpace& sp, const CacheContents& cache, const Codeword& cw,
                         const std::vector<FileSubset>& targets) {
  Gf2Solver solver(sp.total);
  for (const auto& seg : cache.segments) solver.add_segment(seg);
  for (const auto& seg : cw.segments) solver.add_segment(seg);
  DecodeResult res;
  for (FileSubset key : targets) {
    const int idx = sp.key_index(key);
    for (int i = 0; i < sp.len[idx]; ++i) {
      const auto v = solver.query(sp.off[idx] + i);
      if (!v) {
        res.ok = false;
        res.file.clear();
        res.missing = sp.atom_label(sp.off[idx] + i);
        return res;
      }
      res.file.push_back(*v);
    }
  }
  res.ok = true;
  return res;
}

// ---------------------------------------------------------------------------
// Memory sharing between adjacent placement anchors.
// ---------------------------------------------------------------------------

struct Share {
  int kind_a = -1;  // -1 means unused
  int kind_b = -1;
  double theta = 0.0;  // weight on kind_a
};

Share find_share(const std::vector<double>& anchors, const std::vector<int>& kinds,
                 double mu_bits, const char* what) {
  const double lo = anchors.front(), hi = anchors.back();
  if (mu_bits < lo - 1e-6 || mu_bits > hi + 1e-6) {
    throw std::invalid_argument(std::string(what) + ": cache share " +
                                std::to_string(mu_bits) + " outside [" + std::to_string(lo) +
                                ", " + std::to_string(hi) + "]");
  }
  mu_bits = std::clamp(mu_bits, lo, hi);
  for (std::size_t j = 0; j + 1 < anchors.size(); ++j) {
    if (anchors[j + 1] - anchors[j] <= 1e-9) continue;  // degenerate anchor pair
    if (mu_bits > anchors[j + 1] + 1e-9) continue;
    const double theta = (anchors[j + 1] - mu_bits) / (anchors[j + 1] - anchors[j]);
    if (theta >= 1.0 - 1e-9) return Share{kinds[j], -1, 1.0};
    if (theta <= 1e-9) return Share{kinds[j + 1], -1, 1.0};
    return Share{kinds[j], kinds[j + 1], theta};
  }
  return Share{kinds.back(), -1, 1.0};
}

void append(std::vector<Segment>& out, Segment seg) {
  if (seg.bit_count() > 0) out.push_back(std::move(seg));
}

// ---------------------------------------------------------------------------
// Pairwise-description layer (two receivers), shared by TwoRequestScheme and
// ThreeFileScheme.  Anchor kinds:
//   0 empty, 1 xor3 (one 3-way XOR half), 2 pairxor (two 2-way XOR halves),
//   3 uncoded (own half of each description), 4 full.
// ---------------------------------------------------------------------------

struct PairGeom {
  int kind = 0;
  int start = 0;
  int len = 0;
  int half = 0;
};

const std::array<FileSubset, 3> kPairKeys = {FileSubset{1, 2}, FileSubset{1, 3},
                                             FileSubset{2, 3}};

std::array<FileSubset, 2> pair_keys_of_file(int f) {
  switch (f) {
    case 1: return {FileSubset{1, 2}, FileSubset{1, 3}};
    case 2: return {FileSubset{1, 2}, FileSubset{2, 3}};
    case 3: return {FileSubset{1, 3}, FileSubset{2, 3}};
    default: throw std::invalid_argument("file index must be in 1..3");
  }
}

std::vector<PairGeom> build_pair_parts(int L, double mu_bits, const char* what) {
  std::vector<PairGeom> parts;
  if (L == 0) return parts;
  const std::vector<double> anchors = {0.0, 0.5 * L, 1.0 * L, 1.5 * L, 3.0 * L};
  const std::vector<int> kinds = {0, 1, 2, 3, 4};
  const Share sh = find_share(anchors, kinds, mu_bits, what);
  auto add = [&](int kind, int start, int len) {
    PairGeom g;
    g.kind = kind;
    g.start = start;
    g.len = len;
    if (kind >= 1 && kind <= 3) {
      require_even(len, what);
      g.half = len / 2;
    }
    if (len > 0) parts.push_back(g);
  };
  if (sh.kind_b < 0) {
    add(sh.kind_a, 0, L);
  } else {
    const int pl = exact_bits(sh.theta * L, what);
    add(sh.kind_a, 0, pl);
    add(sh.kind_b, pl, L - pl);
  }
  return parts;
}

// Cache segments of receiver k (1 or 2) for one part.  Receiver k's half of a
// part is [start + (k-1) half, start + k half).
void pair_cache_segments(const AtomSpace& sp, const BitLibrary& lib, const PairGeom& g, int k,
                         std::vector<Segment>& out) {
  const int h = g.start + (k - 1) * g.half;
  switch (g.kind) {
    case 0:
      break;
    case 1:
      append(out, make_segment(sp, lib,
                               {{kPairKeys[0], h}, {kPairKeys[1], h}, {kPairKeys[2], h}},
                               g.half,
                               xor_label({{kPairKeys[0], h}, {kPairKeys[1], h}, {kPairKeys[2], h}},
                                         g.half)));
      break;
    case 2:
      append(out, make_segment(sp, lib, {{kPairKeys[0], h}, {kPairKeys[1], h}}, g.half,
                               xor_label({{kPairKeys[0], h}, {kPairKeys[1], h}}, g.half)));
      append(out, make_segment(sp, lib, {{kPairKeys[0], h}, {kPairKeys[2], h}}, g.half,
                               xor_label({{kPairKeys[0], h}, {kPairKeys[2], h}}, g.half)));
      break;
    case 3:
      for (const auto& key : kPairKeys) append(out, range_segment(sp, lib, key, h, g.half));
      break;
    case 4:
      for (const auto& key : kPairKeys) append(out, range_segment(sp, lib, key, g.start, g.len));
      break;
    default:
      throw std::logic_error("bad pair part kind");
  }
}

void pair_deliver_segments(const AtomSpace& sp, const BitLibrary& lib, const PairGeom& g,
                           int d1, int d2, std::vector<Segment>& out) {
  const auto r1 = pair_keys_of_file(d1);
  const auto r2 = pair_keys_of_file(d2);
  // Split into common and receiver-unique requested descriptions.
  std::vector<FileSubset> common, uniq1, uniq2;
  for (const auto& key : r1) {
    if (key == r2[0] || key == r2[1]) {
      common.push_back(key);
    } else {
      uniq1.push_back(key);
    }
  }
  for (const auto& key : r2) {
    if (!(key == r1[0] || key == r1[1])) uniq2.push_back(key);
  }
  const int h1 = g.start;             // first half offset
  const int h2 = g.start + g.half;    // second half offset
  switch (g.kind) {
    case 0: {
      std::set<FileSubset> want(common.begin(), common.end());
      want.insert(uniq1.begin(), uniq1.end());
      want.insert(uniq2.begin(), uniq2.end());
      for (const auto& key : want) append(out, range_segment(sp, lib, key, g.start, g.len));
      break;
    }
    case 1: {
      for (const auto& key : common) append(out, range_segment(sp, lib, key, g.start, g.len));
      for (const auto& key : uniq1) append(out, range_segment(sp, lib, key, h2, g.half));
      for (const auto& key : uniq2) append(out, range_segment(sp, lib, key, h1, g.half));
      break;
    }
    case 2: {
      if (uniq1.empty()) {
        // identical demands {P, Q}: send P^1, Q^2, P^2 + Q^1
        const FileSubset P = common[0], Q = common[1];
        append(out, range_segment(sp, lib, P, h1, g.half));
        append(out, range_segment(sp, lib, Q, h2, g.half));
        append(out, make_segment(sp, lib, {{P, h2}, {Q, h1}}, g.half,
                                 xor_label({{P, h2}, {Q, h1}}, g.half)));
      } else {
        append(out, range_segment(sp, lib, common[0], g.start, g.len));
        append(out, make_segment(sp, lib, {{uniq1[0], h2}, {uniq2[0], h1}}, g.half,
                                 xor_label({{uniq1[0], h2}, {uniq2[0], h1}}, g.half)));
      }
      break;
    }
    case 3: {
      if (uniq1.empty()) {
        for (const auto& key : common) {
          append(out, make_segment(sp, lib, {{key, h1}, {key, h2}}, g.half,
                                   xor_label({{key, h1}, {key, h2}}, g.half)));
        }
      } else {
        append(out, make_segment(sp, lib, {{common[0], h1}, {common[0], h2}}, g.half,
                                 xor_label({{common[0], h1}, {common[0], h2}}, g.half)));
        append(out, make_segment(sp, lib, {{uniq1[0], h2}, {uniq2[0], h1}}, g.half,
                                 xor_label({{uniq1[0], h2}, {uniq2[0], h1}}, g.half)));
      }
      break;
    }
    case 4:
      break;
    default:
      throw std::logic_error("bad pair part kind");
  }
}

std::string pair_part_tag(const PairGeom& g) {
  static const char* names[] = {"empty", "xor3", "pairxor", "uncoded", "full"};
  std::ostringstream os;
  os << names[g.kind] << "[" << g.start << "," << g.start + g.len << ")";
  return os.str();
}

void check_budget(const std::vector<CacheContents>& caches, double m_bits, const char* what) {
  for (const auto& c : caches) {
    if (static_cast<double>(c.bit_count()) > m_bits + 1e-6) {
      throw std::logic_error(std::string(what) + ": cache of " +
                             std::to_string(c.bit_count()) + " bits exceeds budget " +
                             std::to_string(m_bits));
    }
  }
}

void check_demand(const std::vector<int>& demand, std::size_t K, int n_files) {
  if (demand.size() != K) {
    throw std::invalid_argument("demand vector must list one file per receiver");
  }
  for (int d : demand) {
    if (d < 1 || d > n_files) {
      throw std::invalid_argument("demanded file index out of range: " + std::to_string(d));
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// BitLibrary
// ---------------------------------------------------------------------------

int BitLibrary::description_bits(FileSubset key) const {
  const auto it = descriptions.find(key);
  return it == descriptions.end() ? 0 : static_cast<int>(it->second.size());
}

Bits BitLibrary::file_bits(int file_index) const {
  Bits out;
  for (FileSubset key : assembly_order(*this, file_index)) {
    const Bits& d = descriptions.at(key);
    out.insert(out.end(), d.begin(), d.end());
  }
  return out;
}

BitLibrary gw_encode_structured(const SourceModel& model, std::uint64_t seed, int F) {
  validate(model);
  if (F < 1) {
    throw std::invalid_argument("gw_encode_structured: F must be >= 1");
  }
  std::vector<std::pair<FileSubset, double>> plan;
  if (const auto* s2 = std::get_if<Structured2>(&model)) {
    plan = {{FileSubset{1}, s2->l1}, {FileSubset{2}, s2->l2}, {FileSubset{1, 2}, s2->lV}};
  } else if (const auto* s3 = std::get_if<Structured3>(&model)) {
    plan = {{FileSubset{1}, s3->lX},    {FileSubset{2}, s3->lX},
            {FileSubset{3}, s3->lX},    {FileSubset{1, 2}, s3->lU},
            {FileSubset{1, 3}, s3->lU}, {FileSubset{2, 3}, s3->lU},
            {FileSubset{1, 2, 3}, s3->lV}};
  } else {
    throw std::invalid_argument(
        "gw_encode_structured: bit-level simulation supports structured sources only, got " +
        describe(model));
  }
  BitLibrary lib;
  lib.n_files = file_count(model);
  lib.F = F;
  std::mt19937_64 rng(seed);
  // Fill in ascending-mask order so the layout is a pure function of the seed.
  std::map<FileSubset, double> lengths(plan.begin(), plan.end());
  for (const auto& [key, rho] : lengths) {
    const int bits = exact_bits(rho * F, key_name(key).c_str());
    Bits b(bits);
    for (int i = 0; i < bits; ++i) b[i] = static_cast<std::uint8_t>(rng() & 1u);
    lib.descriptions.emplace(key, std::move(b));
  }
  return lib;
}

std::size_t CacheContents::bit_count() const {
  std::size_t n = 0;
  for (const auto& s : segments) n += s.bit_count();
  return n;
}

std::size_t Codeword::bit_count() const {
  std::size_t n = 0;
  for (const auto& s : segments) n += s.bit_count();
  return n;
}

std::string codeword_trace(const Codeword& cw) {
  std::ostringstream os;
  for (const auto& s : cw.segments) {
    os << "SEG " << s.label << " " << s.bit_count() << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// TwoFileScheme
// ---------------------------------------------------------------------------

// Private placement anchors: 0 empty, 1 xor (coded pairs), 2 own (own packet
// of each file), 3 yu (everything but own packet), 4 full.
struct TwoFileScheme::Part {
  int kind = 0;
  int s1 = 0, l1 = 0;
  int s2 = 0, l2 = 0;
  int core = 0;
  int q = 0;
};

TwoFileScheme::TwoFileScheme(const TwoFileScheme&) = default;
TwoFileScheme::TwoFileScheme(TwoFileScheme&&) noexcept = default;
TwoFileScheme& TwoFileScheme::operator=(const TwoFileScheme&) = default;
TwoFileScheme& TwoFileScheme::operator=(TwoFileScheme&&) noexcept = default;
TwoFileScheme::~TwoFileScheme() = default;

TwoFileScheme::TwoFileScheme(const GWTuple2& t, int K, double M, Criterion criterion,
                             BitLibrary lib)
    : t_(t), K_(K), M_(M), criterion_(criterion), lib_(std::move(lib)) {
  if (K_ < 2) throw std::invalid_argument("place_two_file: K must be >= 2");
  if (lib_.n_files != 2) {
    throw std::invalid_argument("place_two_file: library must hold two files");
  }
  const int F = lib_.F;
  const int len0 = exact_bits(t_.rho0 * F, "rho0 * F");
  const int len1 = exact_bits(t_.rho1 * F, "rho1 * F");
  const int len2 = exact_bits(t_.rho2 * F, "rho2 * F");
  if (lib_.description_bits(FileSubset{1, 2}) != len0 ||
      lib_.description_bits(FileSubset{1}) != len1 ||
      lib_.description_bits(FileSubset{2}) != len2) {
    throw std::invalid_argument("place_two_file: library sizes do not match the rate tuple");
  }

  const RateCurve priv = criterion_ == Criterion::peak
                             ? private_peak_rate_two_file(t_.rho1, t_.rho2, K_)
                             : private_avg_rate_two_file(t_.rho1, t_.rho2, K_);
  alloc_ = allocate_two_file(M_, t_, priv);
  lfu_bits_ = exact_bits(alloc_.mu0 * F, "mu0 * F");

  const double core_bits = std::min(len1, len2);
  const double s_bits = len1 + len2;
  const double g_bits = core_bits / K_;
  std::vector<double> anchors;
  std::vector<int> kinds;
  if (criterion_ == Criterion::peak) {
    anchors = {0.0, g_bits, s_bits - 2.0 * g_bits, s_bits};
    kinds = {0, 1, 3, 4};
  } else {
    anchors = {0.0, 2.0 * g_bits, s_bits - 2.0 * g_bits, s_bits};
    kinds = {0, 2, 3, 4};
  }
  if (s_bits > 0) {
    const Share sh = find_share(anchors, kinds, alloc_.mu * F, "private placement");
    auto add_part = [&](int kind, int a1, int b1, int a2, int b2) {
      Part p;
      p.kind = kind;
      p.s1 = a1;
      p.l1 = b1 - a1;
      p.s2 = a2;
      p.l2 = b2 - a2;
      p.core = std::min(p.l1, p.l2);
      if (kind == 1) {
        p.q = exact_bits(p.core / (2.0 * K_), "coded packet size");
      } else if (kind == 2 || kind == 3) {
        p.q = exact_bits(p.core / static_cast<double>(K_), "packet size");
      }
      if (p.l1 + p.l2 > 0) parts_.push_back(p);
    };
    if (sh.kind_b < 0) {
      add_part(sh.kind_a, 0, len1, 0, len2);
    } else {
      const int pl1 = exact_bits(sh.theta * len1, "private split of W1");
      const int pl2 = exact_bits(sh.theta * len2, "private split of W2");
      add_part(sh.kind_a, 0, pl1, 0, pl2);
      add_part(sh.kind_b, pl1, len1, pl2, len2);
    }
  }

  // Build per-receiver caches.
  const AtomSpace sp = AtomSpace::from(lib_);
  static const char* names[] = {"empty", "xor", "own", "yu", "full"};
  const FileSubset kW12{1, 2}, kW1{1}, kW2{2};
  for (int k = 1; k <= K_; ++k) {
    CacheContents cc;
    std::ostringstream tag;
    tag << "lfu:" << lfu_bits_;
    if (lfu_bits_ > 0) append(cc.segments, range_segment(sp, lib_, kW12, 0, lfu_bits_));
    for (const Part& p : parts_) {
      tag << "|" << names[p.kind] << "(q=" << p.q << ")";
      switch (p.kind) {
        case 0:
          break;
        case 1:
          for (int h = 0; h < 2; ++h) {
            const int j = 2 * (k - 1) + h;  // packet index, 0-based
            if (p.q == 0) break;
            std::vector<Term> terms = {{kW1, p.s1 + j * p.q}, {kW2, p.s2 + j * p.q}};
            append(cc.segments, make_segment(sp, lib_, terms, p.q, xor_label(terms, p.q)));
          }
          break;
        case 2:
          if (p.q > 0) {
            append(cc.segments, range_segment(sp, lib_, kW1, p.s1 + (k - 1) * p.q, p.q));
            append(cc.segments, range_segment(sp, lib_, kW2, p.s2 + (k - 1) * p.q, p.q));
          }
          break;
        case 3:
          for (int j = 0; j < K_; ++j) {
            if (j == k - 1 || p.q == 0) continue;
            append(cc.segments, range_segment(sp, lib_, kW1, p.s1 + j * p.q, p.q));
            append(cc.segments, range_segment(sp, lib_, kW2, p.s2 + j * p.q, p.q));
          }
          append(cc.segments, range_segment(sp, lib_, kW1, p.s1 + p.core, p.l1 - p.core));
          append(cc.segments, range_segment(sp, lib_, kW2, p.s2 + p.core, p.l2 - p.core));
          break;
        case 4:
          append(cc.segments, range_segment(sp, lib_, kW1, p.s1, p.l1));
          append(cc.segments, range_segment(sp, lib_, kW2, p.s2, p.l2));
          break;
        default:
          throw std::logic_error("bad private part kind");
      }
    }
    cc.tag = tag.str();
    caches_.push_back(std::move(cc));
  }
  check_budget(caches_, M_ * F, "place_two_file");
}

Codeword TwoFileScheme::deliver(const std::vector<int>& demand) const {
  check_demand(demand, static_cast<std::size_t>(K_), 2);
  const AtomSpace sp = AtomSpace::from(lib_);
  const FileSubset kW12{1, 2};
  const std::array<FileSubset, 2> kW = {FileSubset{1}, FileSubset{2}};
  Codeword cw;
  const int len0 = lib_.description_bits(kW12);
  if (len0 > lfu_bits_) {
    append(cw.segments, range_segment(sp, lib_, kW12, lfu_bits_, len0 - lfu_bits_));
  }
  std::set<int> distinct(demand.begin(), demand.end());
  for (const Part& p : parts_) {
    const std::array<int, 2> s = {p.s1, p.s2};
    const std::array<int, 2> l = {p.l1, p.l2};
    switch (p.kind) {
      case 0:
      case 2: {
        if (p.kind == 2 && p.q > 0) {
          // Leader-based pair XORs over the own-packet placement.
          std::array<int, 4> leader_of_file = {0, 0, 0, 0};
          for (int k = K_; k >= 1; --k) leader_of_file[demand[k - 1]] = k;
          auto is_leader = [&](int k) { return leader_of_file[demand[k - 1]] == k; };
          for (int u = 1; u <= K_; ++u) {
            for (int v = u + 1; v <= K_; ++v) {
              if (!is_leader(u) && !is_leader(v)) continue;
              const int fu = demand[u - 1], fv = demand[v - 1];
              std::vector<Term> terms = {{kW[fv - 1], s[fv - 1] + (u - 1) * p.q},
                                         {kW[fu - 1], s[fu - 1] + (v - 1) * p.q}};
              append(cw.segments, make_segment(sp, lib_, terms, p.q, xor_label(terms, p.q)));
            }
          }
          for (int f : distinct) {
            append(cw.segments,
                   range_segment(sp, lib_, kW[f - 1], s[f - 1] + p.core, l[f - 1] - p.core));
          }
        } else {
          // No coded core: just send what is demanded.
          for (int f : distinct) {
            append(cw.segments, range_segment(sp, lib_, kW[f - 1], s[f - 1], l[f - 1]));
          }
        }
        break;
      }
      case 1: {
        if (distinct.size() == 1 || p.q == 0) {
          for (int f : distinct) {
            append(cw.segments, range_segment(sp, lib_, kW[f - 1], s[f - 1], l[f - 1]));
          }
          break;
        }
        // Both files demanded: uncover each receiver's coded pair, then chain
        // within each demand group.
        for (int k = 1; k <= K_; ++k) {
          const int other = 3 - demand[k - 1];
          for (int h = 0; h < 2; ++h) {
            const int j = 2 * (k - 1) + h;
            append(cw.segments,
                   range_segment(sp, lib_, kW[other - 1], s[other - 1] + j * p.q, p.q));
          }
        }
        for (int f = 1; f <= 2; ++f) {
          std::vector<int> group;
          for (int k = 1; k <= K_; ++k) {
            if (demand[k - 1] == f) group.push_back(k);
          }
          for (std::size_t i = 0; i + 1 < group.size(); ++i) {
            const int u = group[i], v = group[i + 1];
            for (int h = 0; h < 2; ++h) {
              std::vector<Term> terms = {{kW[f - 1], s[f - 1] + (2 * (u - 1) + h) * p.q},
                                         {kW[f - 1], s[f - 1] + (2 * (v - 1) + h) * p.q}};
              append(cw.segments, make_segment(sp, lib_, terms, p.q, xor_label(terms, p.q)));
            }
          }
        }
        for (int f : distinct) {
          append(cw.segments,
                 range_segment(sp, lib_, kW[f - 1], s[f - 1] + p.core, l[f - 1] - p.core));
        }
        break;
      }
      case 3: {
        if (p.q > 0) {
          std::vector<Term> terms;
          for (int k = 1; k <= K_; ++k) {
            const int f = demand[k - 1];
            terms.push_back({kW[f - 1], s[f - 1] + (k - 1) * p.q});
          }
          append(cw.segments, make_segment(sp, lib_, terms, p.q, xor_label(terms, p.q)));
        }
        break;
      }
      case 4:
        break;
      default:
        throw std::logic_error("bad private part kind");
    }
  }
  return cw;
}

DecodeResult TwoFileScheme::decode(int receiver, const std::vector<int>& demand,
                                   const Codeword& cw) const {
  check_demand(demand, static_cast<std::size_t>(K_), 2);
  if (receiver < 1 || receiver > K_) {
    throw std::invalid_argument("receiver index out of range");
  }
  const AtomSpace sp = AtomSpace::from(lib_);
  const int f = demand[receiver - 1];
  return decode_keys(sp, caches_[receiver - 1], cw, assembly_order(lib_, f));
}

TwoFileScheme place_two_file(const GWTuple2& t, int K, double M, Criterion criterion,
                             const BitLibrary& lib) {
  return TwoFileScheme(t, K, M, criterion, lib);
}

// ---------------------------------------------------------------------------
// TwoRequestScheme
// ---------------------------------------------------------------------------

struct TwoRequestScheme::Part : PairGeom {};

TwoRequestScheme::TwoRequestScheme(const TwoRequestScheme&) = default;
TwoRequestScheme::TwoRequestScheme(TwoRequestScheme&&) noexcept = default;
TwoRequestScheme& TwoRequestScheme::operator=(const TwoRequestScheme&) = default;
TwoRequestScheme& TwoRequestScheme::operator=(TwoRequestScheme&&) noexcept = default;
TwoRequestScheme::~TwoRequestScheme() = default;

TwoRequestScheme::TwoRequestScheme(double rhoP, double M, BitLibrary lib)
    : rhoP_(rhoP), M_(M), lib_(std::move(lib)) {
  if (rhoP_ < 0.0) throw std::invalid_argument("place_two_request: rhoP must be >= 0");
  if (lib_.n_files != 3) {
    throw std::invalid_argument("place_two_request: library must hold three files");
  }
  const int F = lib_.F;
  const int L = exact_bits(rhoP_ * F, "rhoP * F");
  for (const auto& [key, bits] : lib_.descriptions) {
    const bool is_pair = key.size() == 2;
    const int expect = is_pair ? L : 0;
    if (static_cast<int>(bits.size()) != expect) {
      throw std::invalid_argument(
          "place_two_request: library must hold exactly the three pairwise descriptions");
    }
  }
  if (M_ < -1e-12 || M_ > 3.0 * rhoP_ + 1e-9) {
    throw std::invalid_argument("place_two_request: M must lie in [0, 3 rhoP]");
  }
  for (const PairGeom& g : build_pair_parts(L, std::clamp(M_, 0.0, 3.0 * rhoP_) * F,
                                            "two-request placement")) {
    parts_.push_back(Part{g});
  }
  const AtomSpace sp = AtomSpace::from(lib_);
  for (int k = 1; k <= 2; ++k) {
    CacheContents cc;
    std::ostringstream tag;
    for (const Part& p : parts_) {
      tag << (tag.str().empty() ? "" : "|") << pair_part_tag(p);
      pair_cache_segments(sp, lib_, p, k, cc.segments);
    }
    cc.tag = tag.str();
    caches_.push_back(std::move(cc));
  }
  check_budget(caches_, M_ * F, "place_two_request");
}

Codeword TwoRequestScheme::deliver(const std::vector<int>& demand) const {
  check_demand(demand, 2, 3);
  const AtomSpace sp = AtomSpace::from(lib_);
  Codeword cw;
  for (const Part& p : parts_) {
    pair_deliver_segments(sp, lib_, p, demand[0], demand[1], cw.segments);
  }
  return cw;
}

DecodeResult TwoRequestScheme::decode(int receiver, const std::vector<int>& demand,
                                      const Codeword& cw) const {
  check_demand(demand, 2, 3);
  if (receiver < 1 || receiver > 2) {
    throw std::invalid_argument("receiver index out of range");
  }
  const AtomSpace sp = AtomSpace::from(lib_);
  const auto keys = pair_keys_of_file(demand[receiver - 1]);
  return decode_keys(sp, caches_[receiver - 1], cw, {keys[0], keys[1]});
}

TwoRequestScheme place_two_request(double rhoP, double M, const BitLibrary& lib) {
  return TwoRequestScheme(rhoP, M, lib);
}

// ---------------------------------------------------------------------------
// ThreeFileScheme
// ---------------------------------------------------------------------------

struct ThreeFileScheme::PairPart : PairGeom {};

// Private layer kinds: 0 empty, 1 halves (own half of each file), 2 full.
struct ThreeFileScheme::PrivPart {
  int kind = 0;
  int start = 0;
  int len = 0;
  int half = 0;
};

ThreeFileScheme::ThreeFileScheme(const ThreeFileScheme&) = default;
ThreeFileScheme::ThreeFileScheme(ThreeFileScheme&&) noexcept = default;
ThreeFileScheme& ThreeFileScheme::operator=(const ThreeFileScheme&) = default;
ThreeFileScheme& ThreeFileScheme::operator=(ThreeFileScheme&&) noexcept = default;
ThreeFileScheme::~ThreeFileScheme() = default;

ThreeFileScheme::ThreeFileScheme(const GWTuple3Sym& t, double M, BitLibrary lib)
    : t_(t), M_(M), lib_(std::move(lib)) {
  if (lib_.n_files != 3) {
    throw std::invalid_argument("place_three_file: library must hold three files");
  }
  const int F = lib_.F;
  const int len0 = exact_bits(t_.rho0 * F, "rho0 * F");
  const int lenP = exact_bits(t_.rhoP * F, "rhoP * F");
  const int lenX = exact_bits(t_.rho * F, "rho * F");
  if (lib_.description_bits(FileSubset{1, 2, 3}) != len0) {
    throw std::invalid_argument("place_three_file: common description size mismatch");
  }
  for (const auto& key : kPairKeys) {
    if (lib_.description_bits(key) != lenP) {
      throw std::invalid_argument("place_three_file: pairwise description size mismatch");
    }
  }
  for (int i = 1; i <= 3; ++i) {
    if (lib_.description_bits(FileSubset{i}) != lenX) {
      throw std::invalid_argument("place_three_file: private description size mismatch");
    }
  }

  alloc_ = allocate_three_file(M_, t_);
  lfu_bits_ = exact_bits(alloc_.mu0 * F, "mu0 * F");
  for (const PairGeom& g : build_pair_parts(lenP, alloc_.muP * F, "pairwise placement")) {
    pair_parts_.push_back(PairPart{g});
  }

  // Private layer memory sharing over anchors {0, 1.5 rho, 3 rho} per file.
  if (lenX > 0) {
    const std::vector<double> anchors = {0.0, 1.5 * lenX, 3.0 * lenX};
    const std::vector<int> kinds = {0, 1, 2};
    const Share sh = find_share(anchors, kinds, alloc_.mu * F, "private placement");
    auto add = [&](int kind, int start, int len) {
      PrivPart p;
      p.kind = kind;
      p.start = start;
      p.len = len;
      if (kind == 1) {
        require_even(len, "private halves placement");
        p.half = len / 2;
      }
      if (len > 0) priv_parts_.push_back(p);
    };
    if (sh.kind_b < 0) {
      add(sh.kind_a, 0, lenX);
    } else {
      const int pl = exact_bits(sh.theta * lenX, "private split");
      add(sh.kind_a, 0, pl);
      add(sh.kind_b, pl, lenX - pl);
    }
  }

  const AtomSpace sp = AtomSpace::from(lib_);
  const FileSubset kW123{1, 2, 3};
  static const char* priv_names[] = {"empty", "halves", "full"};
  for (int k = 1; k <= 2; ++k) {
    CacheContents cc;
    std::ostringstream tag;
    tag << "lfu:" << lfu_bits_;
    if (lfu_bits_ > 0) append(cc.segments, range_segment(sp, lib_, kW123, 0, lfu_bits_));
    for (const PairPart& p : pair_parts_) {
      tag << "|" << pair_part_tag(p);
      pair_cache_segments(sp, lib_, p, k, cc.segments);
    }
    for (const PrivPart& p : priv_parts_) {
      tag << "|" << priv_names[p.kind] << "[" << p.start << "," << p.start + p.len << ")";
      switch (p.kind) {
        case 0:
          break;
        case 1:
          for (int i = 1; i <= 3; ++i) {
            append(cc.segments, range_segment(sp, lib_, FileSubset{i},
                                              p.start + (k - 1) * p.half, p.half));
          }
          break;
        case 2:
          for (int i = 1; i <= 3; ++i) {
            append(cc.segments, range_segment(sp, lib_, FileSubset{i}, p.start, p.len));
          }
          break;
        default:
          throw std::logic_error("bad private part kind");
      }
    }
    cc.tag = tag.str();
    caches_.push_back(std::move(cc));
  }
  check_budget(caches_, M_ * F, "place_three_file");
}

Codeword ThreeFileScheme::deliver(const std::vector<int>& demand) const {
  check_demand(demand, 2, 3);
  const AtomSpace sp = AtomSpace::from(lib_);
  const FileSubset kW123{1, 2, 3};
  Codeword cw;
  const int len0 = lib_.description_bits(kW123);
  if (len0 > lfu_bits_) {
    append(cw.segments, range_segment(sp, lib_, kW123, lfu_bits_, len0 - lfu_bits_));
  }
  for (const PairPart& p : pair_parts_) {
    pair_deliver_segments(sp, lib_, p, demand[0], demand[1], cw.segments);
  }
  for (const PrivPart& p : priv_parts_) {
    const FileSubset f1{demand[0]};
    const FileSubset f2{demand[1]};
    switch (p.kind) {
      case 0: {
        std::set<int> distinct(demand.begin(), demand.end());
        for (int f : distinct) {
          append(cw.segments, range_segment(sp, lib_, FileSubset{f}, p.start, p.len));
        }
        break;
      }
      case 1: {
        if (demand[0] == demand[1]) {
          std::vector<Term> terms = {{f1, p.start}, {f1, p.start + p.half}};
          append(cw.segments, make_segment(sp, lib_, terms, p.half, xor_label(terms, p.half)));
        } else {
          std::vector<Term> terms = {{f1, p.start + p.half}, {f2, p.start}};
          append(cw.segments, make_segment(sp, lib_, terms, p.half, xor_label(terms, p.half)));
        }
        break;
      }
      case 2:
        break;
      default:
        throw std::logic_error("bad private part kind");
    }
  }
  return cw;
}

DecodeResult ThreeFileScheme::decode(int receiver, const std::vector<int>& demand,
                                     const Codeword& cw) const {
  check_demand(demand, 2, 3);
  if (receiver < 1 || receiver > 2) {
    throw std::invalid_argument("receiver index out of range");
  }
  const AtomSpace sp = AtomSpace::from(lib_);
  return decode_keys(sp, caches_[receiver - 1], cw,
                     assembly_order(lib_, demand[receiver - 1]));
}

ThreeFileScheme place_three_file(const GWTuple3Sym& t, double M, const BitLibrary& lib) {
  return ThreeFileScheme(t, M, lib);
}

// ---------------------------------------------------------------------------
// Rate measurement
// ---------------------------------------------------------------------------

namespace {

template <typename DeliverFn>
RateMeasurement measure_impl(int n_files, int K, int F, DeliverFn&& deliver) {
  RateMeasurement m;
  std::vector<int> demand(K, 1);
  long long count = 1;
  for (int k = 0; k < K; ++k) count *= n_files;
  double total = 0.0;
  for (long long it = 0; it < count; ++it) {
    long long code = it;
    for (int k = 0; k < K; ++k) {
      demand[k] = static_cast<int>(code % n_files) + 1;
      code /= n_files;
    }
    const Codeword cw = deliver(demand);
    const double rate = static_cast<double>(cw.bit_count()) / F;
    m.per_demand.emplace_back(demand, rate);
    m.peak = std::max(m.peak, rate);
    total += rate;
  }
  m.average = total / static_cast<double>(count);
  return m;
}

}  // namespace

RateMeasurement measure_rate(const TwoFileScheme& scheme) {
  return measure_impl(2, scheme.receivers(), scheme.block_symbols(),
                      [&](const std::vector<int>& d) { return scheme.deliver(d); });
}

RateMeasurement measure_rate(const TwoRequestScheme& scheme) {
  return measure_impl(3, 2, scheme.block_symbols(),
                      [&](const std::vector<int>& d) { return scheme.deliver(d); });
}

RateMeasurement measure_rate(const ThreeFileScheme& scheme) {
  return measure_impl(3, 2, scheme.block_symbols(),
                      [&](const std::vector<int>& d) { return scheme.deliver(d); });
}

}  // namespace gwcache
