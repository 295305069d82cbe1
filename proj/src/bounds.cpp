#include "cowlab/bounds.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "cowlab/optim.hpp"
#include "cowlab/usd.hpp"

namespace cowlab {

namespace {

using GainFn = std::function<double(const ExperimentalParams&, double)>;

CrossingResult result_at_gain(const ExperimentalParams& params, double g,
                              const GainFn& honest_gain, std::string witness) {
  CrossingResult out;
  out.g_zero = g;
  out.l_zero_km = distance_for_gain(params, g, honest_gain);
  const ChannelPoint cp = channel_point(params, out.l_zero_km);
  out.attenuation_db = -10.0 * std::log10(cp.eta_channel);
  out.witness = std::move(witness);
  return out;
}

// Scan the gain decade range downward for the sign change of the detection
// margin (positive = the attack cannot yet match the monitored rate) and
// polish the flip with bisection. Returns the crossing gain.
double crossing_gain(const std::function<double(double)>& margin_of_lg) {
  constexpr double kLgHigh = -1.0, kLgLow = -10.0;
  constexpr int kSamples = 200;
  double prev_lg = 0.0, prev_s = 0.0;
  bool have_prev = false;
  for (int i = 0; i < kSamples; ++i) {
    const double lg =
        kLgHigh + (kLgLow - kLgHigh) * static_cast<double>(i) / (kSamples - 1);
    const double s = margin_of_lg(lg);
    if (have_prev && prev_s > 0.0 && s <= 0.0) {
      const double root = find_root(margin_of_lg, lg, prev_lg, 1e-10);
      return std::pow(10.0, root);
    }
    prev_lg = lg;
    prev_s = s;
    have_prev = true;
  }
  throw std::domain_error(
      "crossing: no detection-margin sign change in the scanned gain range");
}

double safe_log10(double v) { return std::log10(std::max(v, 1e-300)); }

}  // namespace

CrossingResult reach_three_state(const ExperimentalParams& params) {
  validate(params);
  AttackConfig config;
  config.variant = AttackVariant::three_state;
  config.high_intensity = true;
  const AttackResult attack = evaluate_attack(params, config);
  std::ostringstream w;
  w << "gain reproduced by the high-intensity attack (" << attack.witness
    << ")";
  return result_at_gain(params, attack.g_zero, expected_gain, w.str());
}

CrossingResult crossing_coincidence(const ExperimentalParams& params,
                                    int n_cut) {
  validate(params);
  if (params.t_B >= 1.0)
    throw std::domain_error(
        "crossing_coincidence: the monitor line receives no light at t_B = 1");
  const auto margin = [&](double lg) {
    const double g = std::pow(10.0, lg);
    double length;
    try {
      length = distance_for_gain(params, g, expected_gain);
    } catch (const std::domain_error&) {
      return 1.0;  // gain not honestly reachable: short-distance side
    }
    const ChannelPoint cp = channel_point(params, length);
    const double c_honest = expected_coincidence_rate(params, cp.eta_sys);
    const CoinMinimizeResult att = minimize_coincidences(params, g, n_cut);
    if (att.status != LpStatus::optimal) return 1.0;  // cannot match the gain
    return safe_log10(att.g_zero_coin) - safe_log10(c_honest);
  };
  const double g = crossing_gain(margin);
  std::ostringstream w;
  w << "smallest attack coincidence rate meets the honest rate (resend "
       "photon numbers up to "
    << n_cut << ")";
  return result_at_gain(params, g, expected_gain, w.str());
}

CrossingResult crossing_decoy(const ExperimentalParams& params) {
  validate(params);
  if (!(params.f > 0.0))
    throw std::domain_error("crossing_decoy: no decoy positions to monitor");
  const auto margin = [&](double lg) {
    const double g = std::pow(10.0, lg);
    double length;
    try {
      length = distance_for_gain(params, g, expected_gain);
    } catch (const std::domain_error&) {
      return 1.0;
    }
    const ChannelPoint cp = channel_point(params, length);
    const double d_honest = expected_decoy_gain(params, cp.eta_sys);
    const DecoyMaximizeResult r = maximize_decoy_rate(params, g);
    if (!r.feasible) return 1.0;  // cannot match the total gain at all
    // Detected while her best decoy-line fraction stays below the honest one.
    return safe_log10(d_honest / g) - safe_log10(r.g_zero_decoy / g);
  };
  const double g = crossing_gain(margin);
  return result_at_gain(params, g, expected_gain,
                        "largest attack decoy-line gain meets the honest "
                        "decoy gain (tuned discrimination and block "
                        "acceptance)");
}

CrossingResult reach_four_state(const ExperimentalParams& params) {
  validate(params);
  const FourStateGainResult g4 = four_state_gain_zero(params);
  std::ostringstream w;
  w << "gain reproduced by the attack on the four-signal protocol "
       "(conclusive probability "
    << g4.usd.p_c << ")";
  return result_at_gain(params, g4.g_zero, expected_gain_four_state, w.str());
}

namespace {

void check_eta(double eta) {
  if (!(eta > 0.0 && eta <= 1.0))
    throw std::invalid_argument("mu_max: eta must lie in (0, 1]");
}

// First intensity at which the margin turns nonnegative, scanning upward.
// The margin need not be monotone: at large intensity the honest rates can
// outrun the attack again, so probing only the cap would miss an insecure
// window in between.  The reported maximum is the bottom of that window.
double mu_max_from_margin(const std::function<double(double)>& margin) {
  constexpr double kLo = 1e-6;
  constexpr int kSamples = 80;
  double prev = kLo;
  if (margin(prev) >= 0.0) return kLo;  // insecure from the start
  for (int i = 1; i < kSamples; ++i) {
    const double mu =
        kLo * std::pow(kMuMaxCap / kLo,
                       static_cast<double>(i) / (kSamples - 1));
    if (margin(mu) >= 0.0) return find_root(margin, prev, mu, 1e-9);
    prev = mu;
  }
  return kMuMaxCap;  // secure across the whole scanned range
}

}  // namespace

double mu_max_decoy(const ExperimentalParams& params, double eta) {
  validate(params);
  check_eta(eta);
  if (!(params.f > 0.0))
    throw std::invalid_argument("mu_max_decoy: no decoy positions to monitor");
  // Secure at intensity mu while the honest gain -- taken with ideal
  // detectors, eta being the channel transmittance alone -- still exceeds
  // the gain at which the attack first matches the monitored decoy rate.
  // Equivalently: an attack forced to reproduce this gain cannot reach the
  // honest decoy rate at the distance the monitored channel associates with
  // it.  The margin is negative on the secure side.
  const auto margin = [&](double mu) {
    ExperimentalParams p = params;
    p.mu = mu;
    const double g = expected_gain(p, eta);
    double length;
    try {
      length = distance_for_gain(p, g, expected_gain);
    } catch (const std::domain_error&) {
      return -1.0;  // beyond the whole monitored curve: trivially secure
    }
    const ChannelPoint cp = channel_point(p, length);
    const double d_honest = expected_decoy_gain(p, cp.eta_sys);
    const DecoyMaximizeResult r = maximize_decoy_rate(p, g);
    if (!r.feasible) return -1.0;  // cannot even match the gain: secure
    return r.g_zero_decoy - d_honest;  // >= 0: the attack goes unnoticed
  };
  return mu_max_from_margin(margin);
}

double mu_max_four_state(const ExperimentalParams& params, double eta) {
  validate(params);
  check_eta(eta);
  if (!(params.f_d > 0.0 || params.f_v > 0.0))
    throw std::invalid_argument(
        "mu_max_four_state: needs the f_d/f_v split");
  const auto margin = [&](double mu) {
    ExperimentalParams p = params;
    p.mu = mu;
    const double g_honest = expected_gain_four_state(p, eta);
    double g_attack;
    try {
      g_attack = four_state_gain_zero(p).g_zero;
    } catch (const std::runtime_error&) {
      // The discrimination problem degenerates for vanishing intensity,
      // exactly where the attack gain vanishes faster than the honest gain.
      if (mu < 1e-3) return -1.0;
      throw;
    }
    return g_attack - g_honest;
  };
  return mu_max_from_margin(margin);
}

RateCurve upper_bound_curve(const ExperimentalParams& params,
                            BoundVariant variant, double eta_min,
                            double eta_max, int n_points) {
  validate(params);
  if (!(eta_min > 0.0 && eta_min < eta_max && eta_max <= 1.0))
    throw std::invalid_argument("upper_bound_curve: bad transmission range");
  if (n_points < 5)
    throw std::invalid_argument("upper_bound_curve: needs at least 5 points");
  const double key_fraction = (variant == BoundVariant::decoy_monitoring)
                                  ? 1.0 - params.f
                                  : 1.0 - params.f_d - params.f_v;
  RateCurve curve;
  curve.points.reserve(n_points);
  for (int i = 0; i < n_points; ++i) {
    RatePoint pt;
    pt.eta = eta_min * std::pow(eta_max / eta_min,
                                static_cast<double>(i) / (n_points - 1));
    pt.mu_max = (variant == BoundVariant::decoy_monitoring)
                    ? mu_max_decoy(params, pt.eta)
                    : mu_max_four_state(params, pt.eta);
    pt.rate = key_fraction * pt.eta * pt.mu_max;
    curve.points.push_back(pt);
  }
  // Slope of log10(rate) vs log10(eta) over the central 60% of grid indices.
  const int start = n_points / 5;
  const int end = n_points - 1 - start;
  double sx = 0.0, sy = 0.0;
  const int m = end - start + 1;
  for (int i = start; i <= end; ++i) {
    sx += std::log10(curve.points[i].eta);
    sy += std::log10(curve.points[i].rate);
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (int i = start; i <= end; ++i) {
    const double dx = std::log10(curve.points[i].eta) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log10(curve.points[i].rate) - my);
  }
  curve.fitted_exponent = sxy / sxx;
  return curve;
}

}  // namespace cowlab
