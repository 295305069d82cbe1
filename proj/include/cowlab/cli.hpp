// Command-line front end: strict JSON config ingestion, reference-table
// reproduction, figure-grid sweeps, discrimination-measurement inspection,
// and a randomized self-check of the closed-form detection statistics
// against the brute-force circuit simulator.
//
// Output contract: results are CSV with a one-line header, every number
// printed with 12 significant digits and no locale dependence, so identical
// (command, config, seed) invocations produce byte-identical bytes. When an
// output path is given, a JSON manifest sidecar (<out>.manifest.json) records
// the command, the config digest, the tool version, the emitted rows, and
// the wall-clock time.
//
// Exit codes: 0 success; 1 tolerance or numeric failure; 2 configuration or
// usage error.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cowlab/params.hpp"

namespace cowlab::cli {

inline constexpr const char* kVersion = "cowlab 1.0.0";

// CSV number formatting: 12 significant digits, shortest general form,
// '.' decimal separator; NaN and infinities print as "nan"/"inf"/"-inf".
std::string format_number(double v);

// FNV-1a 64-bit digest of raw bytes as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

// "lo:hi:n" grid specification; values are linear in the given coordinates
// (the sweep axes are already logarithmic).
struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  int n = 0;
};
GridSpec parse_grid(const std::string& text);      // throws invalid_argument
std::vector<double> grid_values(const GridSpec& g);  // throws on empty grids

// A reference row of one of the reproduction tables, keyed by the
// parameter-set fingerprint (mu, eta_det).
struct ReferenceRow {
  std::string label;  // row kind, e.g. "attack_reach"
  double mu = 0.0;
  double eta_det = 0.0;
  double ref_log10 = 0.0;  // reference log10 of the gain
  double ref_km = 0.0;     // reference distance (informative)
  double tol_log10 = 0.0;  // acceptance tolerance on log10 of the gain
};
const std::vector<ReferenceRow>& reference_rows(const std::string& table_id);

// Parse a config file holding either one parameter object or an array of
// them; every object passes the strict single-object parser.
std::vector<ExperimentalParams> params_sets_from_json(const std::string& text);

// Full command-line entry point (args exclude the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace cowlab::cli
