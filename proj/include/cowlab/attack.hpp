// Calculus of the zero-error intercept-resend attack: the eavesdropper
// measures every signal with unambiguous discrimination, and whenever a run
// of consecutive conclusive results bounded by inconclusive (vacuum-resent)
// positions occurs, she resends states that reproduce Bob's expected
// sequence exactly — no bit errors, full interference visibility. What she
// cannot fully reproduce are the rates: the data click gain, the
// data-monitor coincidence rate, and the decoy-position gain. This module
// turns per-block click formulas into those rates and optimizes the knobs
// she does have (resend photon statistics, block acceptance probabilities,
// the tunable discrimination parameter).
#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cowlab/fock.hpp"
#include "cowlab/optim.hpp"
#include "cowlab/params.hpp"
#include "cowlab/usd.hpp"

namespace cowlab {

// Expected numbers of isolated non-empty pulses (individual) and adjacent
// non-empty pulse pairs (double) a resent block of k conclusive key signals
// contributes, indexed by the block's boundary type [last][first].
struct BlockCounts {
  double n_individual[2][2] = {};
  double n_double[2][2] = {};
};

// The boundary-type table: at k = 2 the type fixes the block completely; for
// k >= 3 every type averages (k-1)/2 individual pulses while the double-pulse
// count depends on the boundary, (k-1)/4, (k+1)/4, (k-3)/4, (k-1)/4 for
// types 00, 01, 10, 11. Satisfies n_individual[0][0] = (k-1) -
// 2*n_double[0][0].
BlockCounts block_counts(int k);

// Expected data clicks from a resent block of k conclusive signals when each
// kept non-empty pulse clicks with certainty, as a function of the key
// posterior p0 = p(0|c) = p(1|c) in (0, 1/2]. At p0 = 1/2 this is k-1.
double p_click_three_state(int k, double p0);

// Fold per-block values into a per-signal rate: blocks of k = 2..m_max
// consecutive conclusive outcomes occur with the geometric weights of the
// conclusive probability p_c, runs longer than m_max are truncated to m_max,
// and the result is normalized per transmitted signal.
double gain_zero(double p_c, int m_max,
                 const std::function<double(int)>& per_block);

// Click and coincidence rates of one resent block when Eve draws the
// isolated-pulse photon statistics from q and the pulse-pair statistics from
// p: (k-1)/2 * [individual + double/2] for both observables.
struct CoinAttackStats {
  double p_click = 0.0;
  double p_coin = 0.0;
};
CoinAttackStats coin_attack_stats(int k, const PhotonDistribution& q,
                                  const PhotonDistribution& p, double t_B,
                                  double eta_det);

// Minimize the coincidence rate over resend photon distributions subject to
// reproducing the target click gain: a linear program in the photon-number
// weights (|q_n|^2, |p_n|^2), n = 0..n_cut.
struct CoinMinimizeResult {
  LpStatus status = LpStatus::infeasible;
  double g_zero = 0.0;       // the reproduced click gain (= g_target)
  double g_zero_coin = 0.0;  // the smallest achievable coincidence rate
  PhotonDistribution q, p;   // optimizing distributions
};
CoinMinimizeResult minimize_coincidences(const ExperimentalParams& params,
                                         double g_target, int n_cut = 5);

// Expected decoy-position clicks of a block of k conclusive signals under
// the tunable measurement, as a function of p2 = p(2|c): closed form and the
// equivalent first-order recursion (the closed form switches to the
// recursion near p2 = 1 where it loses precision to cancellation).
double p_click_decoy(int k, double p2);
double p_click_decoy_closed(int k, double p2);
double p_click_decoy_recursive(int k, double p2);

// Gains of the tunable attack at discrimination parameter zeta with block
// acceptance probabilities gamma[k-2] for k = 2..m_max: the key-line gain
// uses the certainty-click block formula and the decoy line the formula
// above. Eve accepts a conclusive block of length k with probability
// gamma_k, so both gains are linear in gamma.
struct DecoyAttackGains {
  double g_zero = 0.0;
  double g_zero_decoy = 0.0;
  // Largest |difference| between the certainty-click block formula and the
  // general recursion with a vanishing vacuum posterior, over the used k:
  // a diagnostic that the key-line formula remains exact when p(2|c) > 0.
  double click_formula_discrepancy = 0.0;
};
DecoyAttackGains decoy_attack_gains(const ExperimentalParams& params,
                                    double zeta,
                                    const std::vector<double>& gamma);

// Maximize the decoy-line gain over zeta and gamma subject to reproducing
// the target total gain: an outer 1-D search over zeta around an inner
// linear program in gamma.
struct DecoyMaximizeResult {
  bool feasible = false;
  double g_zero = 0.0;        // reproduced total gain (= g_target)
  double g_zero_decoy = 0.0;  // largest achievable decoy-line gain
  double zeta = 0.0;
  std::vector<double> gamma;
};
DecoyMaximizeResult maximize_decoy_rate(const ExperimentalParams& params,
                                        double g_target);

// Expected data clicks of a block of k conclusive four-signal outcomes,
// given the posterior (p0, p1, p2, p3) with p0 = p1: closed form and the
// equivalent one-step recursion with base p_click(2) = 2 p0 (1 - p2).
double p_click_four_state(int k, const std::array<double, 4>& p_given_c);
double p_click_four_state_closed(int k, const std::array<double, 4>& p_given_c);
double p_click_four_state_recursive(int k,
                                    const std::array<double, 4>& p_given_c);
// Same conditioned on the identity of the block's first signal (0..3).
double p_click_four_state_given_first(int k, int first,
                                      const std::array<double, 4>& p_given_c);

// The zero-error gain against the four-signal protocol: solve the
// four-signal discrimination problem and fold the block click formula.
struct FourStateGainResult {
  double g_zero = 0.0;
  UsdSolution usd;
};
FourStateGainResult four_state_gain_zero(const ExperimentalParams& params);

// ---------------------------------------------------------------------------
// Declarative attack description
// ---------------------------------------------------------------------------

enum class AttackVariant { three_state, three_state_tunable, four_state };

struct AttackConfig {
  AttackVariant variant = AttackVariant::three_state;
  // Either the explicit resend photon statistics (isolated pulses q,
  // pulse pairs p) or the high-intensity limit where every kept non-empty
  // pulse clicks with certainty; the two are mutually exclusive.
  bool high_intensity = false;
  std::optional<PhotonDistribution> resend_individual;
  std::optional<PhotonDistribution> resend_double;
  std::vector<double> gamma;  // per-block acceptance, k = 2..m_max; empty = 1
  double zeta = 0.0;          // tunable variant only
};

struct AttackResult {
  double g_zero = 0.0;
  double g_zero_coin = 0.0;
  double g_zero_decoy = 0.0;
  std::string witness;  // human-readable summary of what was evaluated
};

AttackResult evaluate_attack(const ExperimentalParams& params,
                             const AttackConfig& config);

}  // namespace cowlab
