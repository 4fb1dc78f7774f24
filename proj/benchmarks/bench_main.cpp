// Microbenchmarks for the hot paths: curve construction, envelope building,
// the exhaustive bound search, and a full bit-level place/deliver/decode
// round trip.

#include <benchmark/benchmark.h>

#include <vector>

#include "gwcache/bitsim.hpp"
#include "gwcache/bounds.hpp"
#include "gwcache/gray_wyner.hpp"
#include "gwcache/rate_curve.hpp"
#include "gwcache/source_model.hpp"

namespace {

using namespace gwcache;

void BM_GwmrCurveDsbs(benchmark::State& state) {
  const SourceModel m = Dsbs{0.2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(gwmr_curve(m, 5, Criterion::peak));
  }
}
BENCHMARK(BM_GwmrCurveDsbs);

void BM_EnvelopeOfLines(benchmark::State& state) {
  const SourceModel m = Dsbs{0.2};
  const std::vector<Line> lines = avg_lb_lines_two_file(m, 5);
  const double hi = subset_entropy(m, FileSubset::all(2));
  for (auto _ : state) {
    benchmark::DoNotOptimize(upper_envelope_of_lines(lines, hi));
  }
}
BENCHMARK(BM_EnvelopeOfLines);

void BM_BoundSearch(benchmark::State& state) {
  const SourceModel m = TripleBsc{0.05};
  const int nu_max = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(search_best_peak_bound(m, 2, 0.7, nu_max));
  }
}
BENCHMARK(BM_BoundSearch)->Arg(1)->Arg(2)->Arg(3);

void BM_BitLevelRoundTrip(benchmark::State& state) {
  const GWTuple2 t{0.5, 0.3, 0.4};
  const BitLibrary lib = gw_encode_structured(Structured2{0.5, 0.3, 0.4}, 1, 120);
  const std::vector<int> demand{1, 2};
  for (auto _ : state) {
    const TwoFileScheme scheme(t, 2, 0.15, Criterion::peak, lib);
    const Codeword cw = scheme.deliver(demand);
    benchmark::DoNotOptimize(scheme.decode(1, demand, cw));
    benchmark::DoNotOptimize(scheme.decode(2, demand, cw));
  }
}
BENCHMARK(BM_BitLevelRoundTrip);

}  // namespace

BENCHMARK_MAIN();
