// Experiment description and honest-channel detection statistics for a
// coherent-one-way QKD link: key pulse pairs (alpha,0) and (0,alpha) sent with
// prior (1-f)/2 each and a decoy pair (alpha,alpha) with prior f; the
// four-signal variant splits f into a double-pulse fraction f_d and a vacuum
// signal fraction f_v. The receiver splits a fraction t_B of the light to the
// data detector and the rest into a one-bin delay interferometer.
//
// Efficiency conventions are explicit everywhere: eta_channel is the fiber
// transmission 10^(-alpha*L/10), eta_det the detector efficiency, and the
// gain functions take the already-composed eta_sys = eta_channel * eta_det as
// an argument, so callers decide the composition rather than the library
// guessing it.
#pragma once

#include <functional>
#include <string>

namespace cowlab {

struct ExperimentalParams {
  double mu = 0.0;       // mean photon number |alpha|^2 per non-empty pulse
  double f = 0.0;        // decoy-signal fraction
  double f_d = 0.0;      // four-signal variant: double-pulse fraction
  double f_v = 0.0;      // four-signal variant: vacuum-signal fraction
  double t_B = 0.0;      // receiver splitting ratio toward the data line
  double eta_det = 0.0;  // detector efficiency
  double alpha_channel_db_per_km = 0.0;  // fiber attenuation
  int m_max = 10;        // longest resent block of consecutive conclusives
};

struct ChannelPoint {
  double length_km = 0.0;
  double eta_channel = 1.0;  // 10^(-alpha*L/10)
  double eta_sys = 1.0;      // eta_channel * eta_det
};

// Throws std::invalid_argument when a field is out of range (mu <= 0,
// f outside (0,1), t_B outside (0,1], eta_det outside (0,1], negative
// attenuation, m_max < 2, or f_d + f_v != f when the pair is used).
void validate(const ExperimentalParams& p);

// Channel transmission at a given fiber length; rejects negative lengths.
ChannelPoint channel_point(const ExperimentalParams& p, double length_km);

// Probability that the data detector fires in a signal slot, averaged over
// the three-signal ensemble: key signals carry one non-empty pulse, the decoy
// carries two.
double expected_gain(const ExperimentalParams& p, double eta_sys);

// Rate of data-and-monitor coincidences in the same slot, averaged over the
// signal ensemble and over the content of the preceding pulse.
double expected_coincidence_rate(const ExperimentalParams& p, double eta_sys);

// Click rate restricted to decoy signals: f * (1 - exp(-2 mu t_B eta_sys)).
double expected_decoy_gain(const ExperimentalParams& p, double eta_sys);

// Data click rate of the four-signal ensemble (vacuum signals never click).
double expected_gain_four_state(const ExperimentalParams& p, double eta_sys);

// Invert a gain function: find the fiber length at which
// gain_fn(p, eta_sys(L)) equals gain_target, to relative accuracy 1e-12.
// Throws std::domain_error when the target is not reachable on [0, inf).
double distance_for_gain(
    const ExperimentalParams& p, double gain_target,
    const std::function<double(const ExperimentalParams&, double)>& gain_fn);

// Strict JSON loading. Accepts exactly the keys
//   mu, f, f_d, f_v, t_B, eta_det, alpha_channel_db_per_km, m_max
// with mu, f, t_B, eta_det, alpha_channel_db_per_km required, f_d/f_v
// optional as a pair, and m_max optional (default 10). Unknown keys, wrong
// types, and out-of-range values all throw std::invalid_argument.
ExperimentalParams params_from_json_object(const std::string& json_text);

}  // namespace cowlab
