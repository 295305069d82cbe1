// Exact few-photon simulation of the receiver optics, plus the closed-form
// detection statistics it certifies.
//
// The receiver model: each incoming pulse slot passes a loss beamsplitter of
// transmittance eta_det, then a tap of transmittance t_B toward the data
// detector (modes b_i); the reflected part enters a one-bin-delay
// interferometer made of two balanced beamsplitters whose output ports at
// slot u are c_u (destructive) and d_u (constructive). The simulator carries
// the full multimode pure state — nothing is traced out — and reads event
// probabilities by classifying basis kets, so agreement with the closed forms
// is a genuine end-to-end check of both.
#pragma once

#include <array>
#include <complex>
#include <map>
#include <string>
#include <vector>

namespace cowlab {

// Photon-number distribution |q_n|^2 for n = 0..n_cut (vector index = n).
// Probabilities must be nonnegative and sum to 1 within 1e-12.
struct PhotonDistribution {
  std::vector<double> probs;

  int n_cut() const { return static_cast<int>(probs.size()) - 1; }
  static PhotonDistribution delta(int n, int n_cut);
  static PhotonDistribution validated(std::vector<double> probs);
};

// Detection statistics of one resent signal (an isolated non-empty pulse or
// a consecutive double pulse). Expected counts, so values live in [0, 2]:
//   p_click        expected number of data clicks across the signal's slots
//   p_coin         expected number of same-slot data+monitor coincidences
//   p_single_*     probability of exactly one such event
//   p_double_*     probability of events in both slots
// with the identities p_click = p_single_click + 2 p_double_click and
// p_coin = p_single_coin + 2 p_double_coin.
struct PulseStats {
  double p_click = 0.0;
  double p_coin = 0.0;
  double p_single_click = 0.0;
  double p_double_click = 0.0;
  double p_single_coin = 0.0;
  double p_double_coin = 0.0;
};

// The six exclusive ways a double pulse can produce exactly one coincidence,
// indexed by the slot-1/slot-2 event pattern (data click, monitor click):
//   0: (11)(00)   coincidence in slot 1, nothing in slot 2
//   1: (11)(10)   coincidence in slot 1, lone data click in slot 2
//   2: (11)(01)   coincidence in slot 1, lone monitor click in slot 2
//   3: (00)(11)   nothing in slot 1, coincidence in slot 2
//   4: (10)(11)   lone data click in slot 1, coincidence in slot 2
//   5: (01)(11)   lone monitor click in slot 1, coincidence in slot 2
using CoinPatterns = std::array<double, 6>;

// ---------------------------------------------------------------------------
// Sparse multimode Fock states
// ---------------------------------------------------------------------------

enum class BsPhase {
  // a -> sqrt(T) a + sqrt(1-T) b,  b -> -sqrt(1-T) a + sqrt(T) b
  real_reflection,
  // a -> sqrt(T) a + i sqrt(1-T) b,  b -> i sqrt(1-T) a + sqrt(T) b
  imaginary_reflection,
};

// Pure state over named modes as a sparse map from occupation tuples to
// complex amplitudes. Mode names follow the receiver convention (a_i input,
// b_i data, c_i/d_i monitor outputs, e_i loss).
struct MultiModeFockState {
  std::vector<std::string> modes;
  std::map<std::vector<int>, std::complex<double>> amps;

  int mode_index(const std::string& name) const;  // throws if unknown
};

MultiModeFockState vacuum_state(const std::vector<std::string>& modes);
// Add a vacuum mode with the given name; returns its index.
int add_mode(MultiModeFockState& state, const std::string& name);
void rename_mode(MultiModeFockState& state, const std::string& old_name,
                 const std::string& new_name);
double norm_sq(const MultiModeFockState& state);
// Largest total photon number over basis kets with nonzero amplitude.
int max_total_photons(const MultiModeFockState& state);

// Exact two-mode beamsplitter on the named modes; photon number conserving
// and unitary for any transmittance in [0, 1].
MultiModeFockState apply_beamsplitter(const MultiModeFockState& state,
                                      const std::string& mode_a,
                                      const std::string& mode_b,
                                      double transmittance,
                                      BsPhase phase = BsPhase::real_reflection);

// ---------------------------------------------------------------------------
// Receiver statistics: simulated and closed-form
// ---------------------------------------------------------------------------

// n photons in one isolated pulse slot / split across a symmetric double
// pulse, pushed through the full receiver circuit.
PulseStats simulate_individual_fock(int n, double t_B, double eta_det);
PulseStats simulate_double_fock(int n, double t_B, double eta_det);
CoinPatterns simulate_double_patterns_fock(int n, double t_B, double eta_det);

// Closed-form counterparts; every formula is evaluated directly rather than
// derived from the others, so the cross-identities stay meaningful tests.
PulseStats closed_individual_fock(int n, double t_B, double eta_det);
PulseStats closed_double_fock(int n, double t_B, double eta_det);
CoinPatterns closed_double_patterns_fock(int n, double t_B, double eta_det);

// Distribution-level statistics are the photon-number mixtures of the
// per-n statistics (each detection probability is linear in |q_n|^2).
PulseStats simulate_individual(const PhotonDistribution& q, double t_B,
                               double eta_det);
PulseStats simulate_double(const PhotonDistribution& p, double t_B,
                           double eta_det);
PulseStats closed_individual(const PhotonDistribution& q, double t_B,
                             double eta_det);
PulseStats closed_double(const PhotonDistribution& p, double t_B,
                         double eta_det);

}  // namespace cowlab
