#pragma once

// Reproducible experiment driver behind the command-line tool: parses a JSON
// experiment description and renders CSV tables (12 significant digits, so
// identical configs produce byte-identical files).

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gwcache/rate_curve.hpp"
#include "gwcache/source_model.hpp"

namespace gwcache {

struct GridSpec {
  double min = 0.0;
  double max = -1.0;  // max < min means "full memory span of the model"
  double step = 0.01;
};

struct ExperimentConfig {
  SourceModel model;
  int K = 2;
  Criterion criterion = Criterion::peak;
  GridSpec grid;
  std::uint64_t seed = 1;
  int F = 120;              // symbols per block in bit-level simulation
  int realizations = 20;    // independent libraries per simulated point
  int nu_max = 2;           // request rounds explored by the bound search
  std::vector<double> memories;  // explicit M values for simulation
};

// Parse a JSON config.  Required: "source" object with "model" set to one of
// "dsbs" (p0), "triple_bsc" (p0), "structured2" (lV, l1, l2), "structured3"
// (lV, lU, lX).  Optional keys: K, criterion ("peak"/"average"), grid
// {min,max,step}, seed, F, realizations, nu_max, memories (array).
// Throws std::invalid_argument on malformed input.
ExperimentConfig parse_config_text(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

// Subcommand bodies.  Each writes a CSV table to `csv`, human-readable notes
// to `log`, and returns 0 on success or 1 if a built-in consistency check
// fails (a lower bound crossing an achievable rate, a failed decode, ...).
//
//  curves:   M, R_gwmr, R_corr_unaware, R_mr_lb, R_opt_lb over the grid.
//  gaps:     M, R_ach, R_lb, gap, cap, pass; logs the exact maximum gap and
//            the memory intervals where the gap vanishes.
//  simulate: bit-level placement/delivery/decoding of structured sources;
//            M, demand, rate_bits_per_symbol, decode_ok rows.  Non-structured
//            models fall back to the curves table (with a note).
//  bounds:   M, closed_form, searched, witness; checks that the exhaustive
//            search is at least as strong as every closed-form bound.
int cmd_curves(const ExperimentConfig& cfg, std::ostream& csv, std::ostream& log);
int cmd_gaps(const ExperimentConfig& cfg, std::ostream& csv, std::ostream& log);
int cmd_simulate(const ExperimentConfig& cfg, std::ostream& csv, std::ostream& log);
int cmd_bounds(const ExperimentConfig& cfg, std::ostream& csv, std::ostream& log);

}  // namespace gwcache
