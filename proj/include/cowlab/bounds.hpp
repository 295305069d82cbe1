// Where the countermeasures bite: for a fixed experiment this module finds
// the distance beyond which the zero-error attack reproduces every monitored
// rate (the crossing), the distance at which it reproduces the raw gain (the
// reach), and — treating the attack as a fundamental constraint — the largest
// secure intensity and the resulting upper bound on the key rate as a
// function of the channel transmission.
#pragma once

#include <string>
#include <vector>

#include "cowlab/attack.hpp"
#include "cowlab/params.hpp"

namespace cowlab {

// A distance-like answer: the gain at which the condition flips, expressed
// also as total channel attenuation and fiber length.
struct CrossingResult {
  double g_zero = 0.0;          // the gain at the crossing / reach
  double attenuation_db = 0.0;  // -10 log10(eta_channel) at that point
  double l_zero_km = 0.0;       // fiber length with the configured loss
  std::string witness;          // how the value was obtained
};

// Distance at which the high-intensity attack reproduces the total gain:
// the honest gain falls to the attack's distance-independent value.
CrossingResult reach_three_state(const ExperimentalParams& params);

// Distance beyond which the attack can also reproduce the data-monitor
// coincidence rate: the smallest coincidence rate compatible with the gain
// (optimized over resend photon statistics up to n_cut) falls below the
// honest rate. Detection works at shorter distances only.
CrossingResult crossing_coincidence(const ExperimentalParams& params,
                                    int n_cut = 5);

// Distance beyond which the tunable attack can also reproduce the
// decoy-position gain: the largest decoy-line gain compatible with the total
// gain (optimized over the discrimination parameter and block acceptance)
// reaches the honest decoy gain.
CrossingResult crossing_decoy(const ExperimentalParams& params);

// Distance at which the attack against the four-signal protocol reproduces
// the total gain (its blocking countermeasure variant of reach_three_state).
CrossingResult reach_four_state(const ExperimentalParams& params);

// Largest intensity that stays secure against the attack at overall channel
// transmission eta (detector efficiency is absorbed into eta here): below
// mu_max the attack cannot reproduce the monitored rates, at mu_max it can.
// The search is capped; a cap return means "no insecurity up to the cap".
inline constexpr double kMuMaxCap = 20.0;
double mu_max_decoy(const ExperimentalParams& params, double eta);
double mu_max_four_state(const ExperimentalParams& params, double eta);

enum class BoundVariant { decoy_monitoring, four_state };

struct RatePoint {
  double eta = 0.0;     // overall channel transmission
  double mu_max = 0.0;  // largest secure intensity at this transmission
  double rate = 0.0;    // key-fraction * eta * mu_max
};

// Upper bound on the secret-key rate versus transmission on a logarithmic
// grid, with the power-law exponent fitted by least squares on the central
// 60% of grid points (boundary points feel the cap and the grid edges).
// The default window sits in the low-transmission regime where the bound
// follows a clean power law; at larger transmissions the largest secure
// intensity leaves the asymptotic regime and eventually hits the search cap
// (the honest rates outgrow every attack), bending the curve away from the
// fitted power.
struct RateCurve {
  std::vector<RatePoint> points;
  double fitted_exponent = 0.0;
};
RateCurve upper_bound_curve(const ExperimentalParams& params,
                            BoundVariant variant, double eta_min = 1e-5,
                            double eta_max = 1e-3, int n_points = 25);

}  // namespace cowlab
