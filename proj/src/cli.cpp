#include "cowlab/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "cowlab/attack.hpp"
#include "cowlab/bounds.hpp"
#include "cowlab/fock.hpp"
#include "cowlab/usd.hpp"
#include "json.hpp"

namespace cowlab::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static const char* digits = "0123456789abcdef";
  char buf[16];
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xf];
    h >>= 4;
  }
  return std::string(buf, 16);
}

namespace {

double parse_double_strict(std::string_view text, const char* what) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw std::invalid_argument(std::string("grid: bad ") + what + " value");
  return v;
}

}  // namespace

GridSpec parse_grid(const std::string& text) {
  const auto c1 = text.find(':');
  const auto c2 = (c1 == std::string::npos) ? std::string::npos
                                            : text.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos ||
      text.find(':', c2 + 1) != std::string::npos)
    throw std::invalid_argument("grid must have the form lo:hi:n");
  GridSpec g;
  g.lo = parse_double_strict(std::string_view(text).substr(0, c1), "lo");
  g.hi = parse_double_strict(
      std::string_view(text).substr(c1 + 1, c2 - c1 - 1), "hi");
  const std::string_view ns = std::string_view(text).substr(c2 + 1);
  const auto res = std::from_chars(ns.data(), ns.data() + ns.size(), g.n);
  if (res.ec != std::errc{} || res.ptr != ns.data() + ns.size())
    throw std::invalid_argument("grid: bad point count");
  return g;
}

std::vector<double> grid_values(const GridSpec& g) {
  if (g.n <= 0) throw std::invalid_argument("grid is empty");
  std::vector<double> xs;
  xs.reserve(g.n);
  if (g.n == 1) {
    xs.push_back(g.lo);
    return xs;
  }
  for (int i = 0; i < g.n; ++i)
    xs.push_back(g.lo + (g.hi - g.lo) * static_cast<double>(i) / (g.n - 1));
  return xs;
}

const std::vector<ReferenceRow>& reference_rows(const std::string& table_id) {
  static const std::vector<ReferenceRow> t3 = {
      {"attack_reach", 0.06, 0.22, -2.62, 47.0, 0.01},
      {"attack_reach", 0.1, 0.27, -2.19, 38.0, 0.01},
      {"crossing_coincidence", 0.06, 0.22, -3.44, 97.0, 0.05},
      {"crossing_coincidence", 0.1, 0.27, -2.92, 81.0, 0.05},
  };
  static const std::vector<ReferenceRow> t4 = {
      {"crossing_decoy", 0.06, 0.22, -8.16, 387.0, 0.10},
      {"crossing_decoy", 0.1, 0.27, -7.27, 340.0, 0.10},
  };
  static const std::vector<ReferenceRow> t5 = {
      {"four_state_reach", 0.06, 0.22, -5.66, 231.0, 0.05},
      {"four_state_reach", 0.1, 0.27, -4.79, 190.0, 0.05},
  };
  if (table_id == "table3") return t3;
  if (table_id == "table4") return t4;
  if (table_id == "table5") return t5;
  throw std::invalid_argument("unknown table: " + table_id);
}

std::vector<ExperimentalParams> params_sets_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") +
                                e.what());
  }
  std::vector<ExperimentalParams> out;
  if (j.is_array()) {
    if (j.empty())
      throw std::invalid_argument("config array holds no parameter sets");
    for (const auto& entry : j) out.push_back(params_from_json_object(entry.dump()));
  } else {
    out.push_back(params_from_json_object(j.dump()));
  }
  return out;
}

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write CSV to the output path (or the stream when no path is given) and a
// manifest sidecar next to it. Binary mode keeps the bytes identical across
// platforms.
void emit(const std::string& csv, const std::string& out_path,
          std::ostream& out, const json& manifest) {
  if (out_path.empty()) {
    out << csv;
    return;
  }
  {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot write: " + out_path);
    f << csv;
  }
  {
    const std::string mp = out_path + ".manifest.json";
    std::ofstream f(mp, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot write: " + mp);
    f << manifest.dump(2) << "\n";
  }
}

double wall_ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

// Run fn(0..n-1) on a pool of worker threads (grid order is restored by
// writing into pre-sized slots); the first exception wins and is rethrown.
template <typename Fn>
void parallel_for(int n, const Fn& fn) {
  const int hw = static_cast<int>(
      std::max(1u, std::thread::hardware_concurrency()));
  const int n_threads = std::min(hw, n);
  if (n_threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  const auto work = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

double log10_or(double v, double fallback) {
  return (v > 0.0) ? std::log10(v) : fallback;
}

CrossingResult compute_row(const std::string& row_kind,
                           const ExperimentalParams& p) {
  if (row_kind == "attack_reach") return reach_three_state(p);
  if (row_kind == "crossing_coincidence") return crossing_coincidence(p);
  if (row_kind == "crossing_decoy") return crossing_decoy(p);
  if (row_kind == "four_state_reach") return reach_four_state(p);
  throw std::invalid_argument("unknown row kind: " + row_kind);
}

int run_reproduce(const std::string& table, const std::string& config_path,
                  const std::string& out_path, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string config_bytes = read_file(config_path);
  const std::vector<ExperimentalParams> sets =
      params_sets_from_json(config_bytes);
  const std::vector<ReferenceRow>& rows = reference_rows(table);

  // Resolve every reference row to a configured parameter set up front so
  // that configuration errors surface before any computation starts.
  std::vector<const ExperimentalParams*> chosen;
  chosen.reserve(rows.size());
  for (const ReferenceRow& r : rows) {
    const ExperimentalParams* hit = nullptr;
    for (const ExperimentalParams& p : sets)
      if (std::abs(p.mu - r.mu) < 1e-12 &&
          std::abs(p.eta_det - r.eta_det) < 1e-12) {
        hit = &p;
        break;
      }
    if (!hit) {
      std::ostringstream msg;
      msg << "config has no parameter set with mu=" << r.mu
          << " and eta_det=" << r.eta_det;
      throw std::invalid_argument(msg.str());
    }
    chosen.push_back(hit);
  }

  std::ostringstream csv;
  csv << "label,log10_g_zero,attenuation_db,l_zero_km,reference_value,"
         "abs_error\n";
  json mrows = json::array();
  bool all_pass = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ReferenceRow& r = rows[i];
    const CrossingResult res = compute_row(r.label, *chosen[i]);
    const double lg = std::log10(res.g_zero);
    const double abs_error = std::abs(lg - r.ref_log10);
    const bool pass = abs_error <= r.tol_log10;
    all_pass = all_pass && pass;
    const std::string label = r.label + "_mu" + format_number(r.mu);
    csv << label << ',' << format_number(lg) << ','
        << format_number(res.attenuation_db) << ','
        << format_number(res.l_zero_km) << ',' << format_number(r.ref_log10)
        << ',' << format_number(abs_error) << '\n';
    mrows.push_back({{"label", label},
                     {"log10_g_zero", lg},
                     {"attenuation_db", res.attenuation_db},
                     {"l_zero_km", res.l_zero_km},
                     {"reference_value", r.ref_log10},
                     {"reference_km", r.ref_km},
                     {"abs_error", abs_error},
                     {"tolerance", r.tol_log10},
                     {"pass", pass},
                     {"witness", res.witness}});
  }
  const json manifest = {{"command", "reproduce"},
                         {"target", table},
                         {"version", kVersion},
                         {"config_digest", fnv1a_hex(config_bytes)},
                         {"rows", mrows},
                         {"wall_ms", wall_ms_since(t0)}};
  emit(csv.str(), out_path, out, manifest);
  return all_pass ? 0 : 1;
}

int run_sweep(const std::string& figure, const std::string& config_path,
              const std::string& grid_text, const std::string& out_path,
              std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string config_bytes = read_file(config_path);
  const std::vector<ExperimentalParams> sets =
      params_sets_from_json(config_bytes);
  if (sets.size() != 1)
    throw std::invalid_argument("sweep needs a single parameter object");
  const ExperimentalParams p = sets[0];
  const std::vector<double> xs = grid_values(parse_grid(grid_text));
  const int n = static_cast<int>(xs.size());

  std::vector<std::string> columns;
  std::vector<std::vector<double>> table(n);

  if (figure == "fig6" || figure == "fig8") {
    columns = (figure == "fig6")
                  ? std::vector<std::string>{"log10_g_zero", "log10_min_g_coin",
                                             "log10_honest_g_coin"}
                  : std::vector<std::string>{"log10_g_zero", "log10_max_ratio",
                                             "log10_honest_ratio"};
    parallel_for(n, [&](int i) {
      const double lg = xs[i];
      const double g = std::pow(10.0, lg);
      double attack_col = std::nan("");
      double honest_col = std::nan("");
      if (figure == "fig6") {
        const CoinMinimizeResult r = minimize_coincidences(p, g, 5);
        if (r.status == LpStatus::optimal)
          attack_col = log10_or(r.g_zero_coin, -300.0);
      } else {
        const DecoyMaximizeResult r = maximize_decoy_rate(p, g);
        if (r.feasible) attack_col = log10_or(r.g_zero_decoy / g, -300.0);
      }
      try {
        const double length = distance_for_gain(p, g, expected_gain);
        const double eta_sys = channel_point(p, length).eta_sys;
        honest_col = (figure == "fig6")
                         ? std::log10(expected_coincidence_rate(p, eta_sys))
                         : std::log10(expected_decoy_gain(p, eta_sys) / g);
      } catch (const std::domain_error&) {
      }
      table[i] = {lg, attack_col, honest_col};
    });
  } else if (figure == "fig9" || figure == "fig11") {
    columns = {"log10_eta", "log10_r_upp", "log10_r_linear_ref",
               "log10_r_quadratic_ref"};
    const bool four = (figure == "fig11");
    if (four && !(p.f_d > 0.0 || p.f_v > 0.0))
      throw std::invalid_argument(
          "fig11 needs a config with the f_d/f_v split");
    const double key_fraction = four ? 1.0 - p.f_d - p.f_v : 1.0 - p.f;
    std::vector<double> etas(n), rates(n);
    parallel_for(n, [&](int i) {
      etas[i] = std::pow(10.0, xs[i]);
      const double mu =
          four ? mu_max_four_state(p, etas[i]) : mu_max_decoy(p, etas[i]);
      rates[i] = key_fraction * etas[i] * mu;
    });
    // Reference power laws are anchored at the largest transmission point.
    int anchor = 0;
    for (int i = 1; i < n; ++i)
      if (etas[i] > etas[anchor]) anchor = i;
    const double eta_a = etas[anchor], rate_a = rates[anchor];
    for (int i = 0; i < n; ++i) {
      const double ratio = etas[i] / eta_a;
      table[i] = {xs[i], std::log10(rates[i]), std::log10(rate_a * ratio),
                  std::log10(rate_a * ratio * ratio)};
    }
  } else {
    throw std::invalid_argument("unknown figure: " + figure);
  }

  std::ostringstream csv;
  for (std::size_t c = 0; c < columns.size(); ++c)
    csv << (c ? "," : "") << columns[c];
  csv << '\n';
  json mrows = json::array();
  for (int i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < table[i].size(); ++c)
      csv << (c ? "," : "") << format_number(table[i][c]);
    csv << '\n';
    json row = json::object();
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const double v = table[i][c];
      if (std::isfinite(v))
        row[columns[c]] = v;
      else
        row[columns[c]] = nullptr;
    }
    mrows.push_back(row);
  }
  const json manifest = {{"command", "sweep"},
                         {"target", figure},
                         {"version", kVersion},
                         {"config_digest", fnv1a_hex(config_bytes)},
                         {"grid", grid_text},
                         {"rows", mrows},
                         {"wall_ms", wall_ms_since(t0)}};
  emit(csv.str(), out_path, out, manifest);
  return 0;
}

void print_usd_json(const UsdSolution& sol, const std::string& variant,
                    const FourStateUsdReport* report, std::ostream& out,
                    const std::optional<double>& zeta = std::nullopt) {
  out << "{\n";
  out << "  \"variant\": \"" << variant << "\",\n";
  if (zeta.has_value())
    out << "  \"zeta\": " << format_number(*zeta) << ",\n";
  out << "  \"q_s\": " << format_number(sol.q_s) << ",\n";
  out << "  \"q_s_d\": " << format_number(sol.q_s_d) << ",\n";
  out << "  \"q_s_v\": " << format_number(sol.q_s_v) << ",\n";
  out << "  \"p_c\": " << format_number(sol.p_c) << ",\n";
  out << "  \"p_given_c\": [" << format_number(sol.p_given_c[0]) << ", "
      << format_number(sol.p_given_c[1]) << ", "
      << format_number(sol.p_given_c[2]) << ", "
      << format_number(sol.p_given_c[3]) << "]";
  if (report != nullptr) {
    out << ",\n  \"certificates\": {\n";
    out << "    \"povm_min_eigenvalue\": "
        << format_number(report->povm_min_eigenvalue) << ",\n";
    out << "    \"completeness_residual\": "
        << format_number(report->completeness_residual) << ",\n";
    out << "    \"max_cross_probability\": "
        << format_number(report->max_cross_probability) << ",\n";
    out << "    \"sdp_relative_gap\": "
        << format_number(report->sdp_relative_gap) << ",\n";
    out << "    \"objective\": " << format_number(report->objective) << "\n";
    out << "  }";
  }
  out << "\n}\n";
}

int run_usd(double mu, double f, const std::optional<double>& zeta,
            bool four_state, const std::optional<double>& fd,
            const std::optional<double>& fv, std::ostream& out) {
  if (four_state) {
    if (!fd.has_value() || !fv.has_value())
      throw std::invalid_argument("--four-state requires --fd and --fv");
    if (zeta.has_value())
      throw std::invalid_argument("--zeta does not apply to --four-state");
    FourStateUsdReport report;
    const UsdSolution sol = four_state_usd(mu, *fd, *fv, &report);
    print_usd_json(sol, "four_state", &report, out);
    return 0;
  }
  if (fd.has_value() || fv.has_value())
    throw std::invalid_argument("--fd/--fv require --four-state");
  if (zeta.has_value()) {
    print_usd_json(tunable_usd(mu, f, *zeta), "three_state_tunable", nullptr,
                   out, zeta);
    return 0;
  }
  print_usd_json(three_state_usd(mu, f), "three_state", nullptr, out);
  return 0;
}

// ---------------------------------------------------------------------------
// oracle-check: randomized closed-form vs brute-force circuit comparisons
// ---------------------------------------------------------------------------

// Deterministic uniforms straight from the engine output; the standard
// distributions are implementation-defined and would break byte-identical
// reports across standard libraries.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct OracleFamily {
  const char* name;
  double max_deviation = 0.0;
  int worst_n = -1;
  double worst_t = 0.0, worst_eta = 0.0;

  void offer(double dev, int n, double t, double eta) {
    if (dev > max_deviation) {
      max_deviation = dev;
      worst_n = n;
      worst_t = t;
      worst_eta = eta;
    }
  }
};

double stats_deviation(const PulseStats& a, const PulseStats& b) {
  double d = std::abs(a.p_click - b.p_click);
  d = std::max(d, std::abs(a.p_coin - b.p_coin));
  d = std::max(d, std::abs(a.p_single_click - b.p_single_click));
  d = std::max(d, std::abs(a.p_double_click - b.p_double_click));
  d = std::max(d, std::abs(a.p_single_coin - b.p_single_coin));
  d = std::max(d, std::abs(a.p_double_coin - b.p_double_coin));
  return d;
}

int run_oracle_check(std::uint64_t seed, int cases, bool inject_fault,
                     std::ostream& out) {
  if (cases <= 0) throw std::invalid_argument("--cases must be positive");
  std::mt19937_64 rng(seed);
  OracleFamily families[4] = {{"individual_pulse"},
                              {"double_pulse"},
                              {"coincidence_patterns"},
                              {"distribution_mixtures"}};
  for (int c = 0; c < cases; ++c) {
    const int n = static_cast<int>(rng() % 6);
    const double t = 0.3 + 0.7 * uniform01(rng);
    const double eta = 0.05 + 0.95 * uniform01(rng);

    {
      const PulseStats sim = simulate_individual_fock(n, t, eta);
      PulseStats closed = closed_individual_fock(n, t, eta);
      if (inject_fault) closed.p_click += 1e-6;
      const double dev = std::max(std::abs(sim.p_click - closed.p_click),
                                  std::abs(sim.p_coin - closed.p_coin));
      families[0].offer(dev, n, t, eta);
    }
    {
      const PulseStats sim = simulate_double_fock(n, t, eta);
      const PulseStats closed = closed_double_fock(n, t, eta);
      families[1].offer(stats_deviation(sim, closed), n, t, eta);
    }
    {
      const CoinPatterns sim = simulate_double_patterns_fock(n, t, eta);
      const CoinPatterns closed = closed_double_patterns_fock(n, t, eta);
      double dev = 0.0;
      for (int k = 0; k < 6; ++k)
        dev = std::max(dev, std::abs(sim[k] - closed[k]));
      families[2].offer(dev, n, t, eta);
    }
    {
      const int m = 2 + static_cast<int>(rng() % 5);  // 2..6 weights
      std::vector<double> w(m);
      double sum = 0.0;
      for (double& v : w) {
        v = 1e-3 + uniform01(rng);
        sum += v;
      }
      for (double& v : w) v /= sum;
      const PhotonDistribution dist = PhotonDistribution::validated(w);
      const PulseStats si = simulate_individual(dist, t, eta);
      const PulseStats ci = closed_individual(dist, t, eta);
      const PulseStats sd = simulate_double(dist, t, eta);
      const PulseStats cd = closed_double(dist, t, eta);
      const double dev =
          std::max(std::max(std::abs(si.p_click - ci.p_click),
                            std::abs(si.p_coin - ci.p_coin)),
                   stats_deviation(sd, cd));
      families[3].offer(dev, m - 1, t, eta);
    }
  }
  constexpr double kGate = 1e-10;
  bool ok = true;
  for (const OracleFamily& fam : families) {
    out << "family " << fam.name
        << ": max_deviation=" << format_number(fam.max_deviation) << " (cases "
        << cases << ")\n";
    if (fam.max_deviation > kGate) {
      ok = false;
      out << "  exceeded " << format_number(kGate) << " at n=" << fam.worst_n
          << " t_B=" << format_number(fam.worst_t)
          << " eta_det=" << format_number(fam.worst_eta) << "\n";
    }
  }
  out << (ok ? "oracle-check OK\n" : "oracle-check FAILED\n");
  return ok ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{
      "deterministic calculator for zero-error intercept-resend attack "
      "reach and countermeasures in coherent-one-way QKD"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string rep_table, rep_config, rep_out;
  CLI::App* rep = app.add_subcommand(
      "reproduce", "recompute reference-table rows and compare");
  rep->add_option("table", rep_table, "table3|table4|table5")
      ->required()
      ->check(CLI::IsMember({"table3", "table4", "table5"}));
  rep->add_option("--config", rep_config, "parameter JSON (canonical array)")
      ->required();
  rep->add_option("--out", rep_out, "CSV path (+ .manifest.json sidecar)");

  std::string sw_figure, sw_config, sw_grid, sw_out;
  CLI::App* sw =
      app.add_subcommand("sweep", "tabulate a figure curve on a grid");
  sw->add_option("figure", sw_figure, "fig6|fig8|fig9|fig11")
      ->required()
      ->check(CLI::IsMember({"fig6", "fig8", "fig9", "fig11"}));
  sw->add_option("--config", sw_config, "parameter JSON (single object)")
      ->required();
  sw->add_option("--grid", sw_grid, "lo:hi:n in the figure's x coordinate")
      ->required();
  sw->add_option("--out", sw_out, "CSV path (+ .manifest.json sidecar)");

  double usd_mu = 0.0, usd_f = 0.155;
  std::optional<double> usd_zeta, usd_fd, usd_fv;
  bool usd_four = false;
  CLI::App* usd =
      app.add_subcommand("usd", "print a discrimination solution as JSON");
  usd->add_option("--mu", usd_mu, "signal intensity")->required();
  usd->add_option("--f", usd_f, "decoy fraction (default 0.155)");
  usd->add_option("--zeta", usd_zeta, "tunable discrimination parameter");
  usd->add_flag("--four-state", usd_four, "four-signal ensemble");
  usd->add_option("--fd", usd_fd, "double-pulse fraction (four-state)");
  usd->add_option("--fv", usd_fv, "vacuum fraction (four-state)");

  std::uint64_t oc_seed = 1;
  int oc_cases = 200;
  bool oc_fault = false;
  CLI::App* oc = app.add_subcommand(
      "oracle-check",
      "randomized closed-form vs brute-force circuit comparison");
  oc->add_option("--seed", oc_seed, "RNG seed (default 1)");
  oc->add_option("--cases", oc_cases, "number of random cases (default 200)");
  oc->add_flag("--inject-fault", oc_fault,
               "perturb one closed form to exercise the failure path");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("cowlab");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(argv_store.size());
  for (const std::string& s : argv_store) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (rep->parsed()) return run_reproduce(rep_table, rep_config, rep_out, out);
    if (sw->parsed())
      return run_sweep(sw_figure, sw_config, sw_grid, sw_out, out);
    if (usd->parsed())
      return run_usd(usd_mu, usd_f, usd_zeta, usd_four, usd_fd, usd_fv, out);
    if (oc->parsed()) return run_oracle_check(oc_seed, oc_cases, oc_fault, out);
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << "no subcommand selected\n";
  return 2;
}

}  // namespace cowlab::cli
