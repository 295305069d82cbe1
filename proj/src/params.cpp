#include "cowlab/params.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace cowlab {

namespace {

// 1 - exp(-x) without cancellation for small x.
double one_minus_exp(double x) { return -std::expm1(-x); }

}  // namespace

void validate(const ExperimentalParams& p) {
  if (!(p.mu > 0.0)) throw std::invalid_argument("params: mu must be > 0");
  if (!(p.f > 0.0 && p.f < 1.0))
    throw std::invalid_argument("params: f must lie in (0,1)");
  if (!(p.t_B > 0.0 && p.t_B <= 1.0))
    throw std::invalid_argument("params: t_B must lie in (0,1]");
  if (!(p.eta_det > 0.0 && p.eta_det <= 1.0))
    throw std::invalid_argument("params: eta_det must lie in (0,1]");
  if (!(p.alpha_channel_db_per_km >= 0.0))
    throw std::invalid_argument("params: attenuation must be >= 0");
  if (p.m_max < 2) throw std::invalid_argument("params: m_max must be >= 2");
  if (p.f_d != 0.0 || p.f_v != 0.0) {
    if (!(p.f_d >= 0.0) || !(p.f_v >= 0.0))
      throw std::invalid_argument("params: f_d and f_v must be >= 0");
    if (std::abs(p.f_d + p.f_v - p.f) > 1e-12)
      throw std::invalid_argument("params: f_d + f_v must equal f");
  }
}

ChannelPoint channel_point(const ExperimentalParams& p, double length_km) {
  if (!(length_km >= 0.0))
    throw std::invalid_argument("channel_point: negative length");
  ChannelPoint c;
  c.length_km = length_km;
  c.eta_channel =
      std::pow(10.0, -p.alpha_channel_db_per_km * length_km / 10.0);
  c.eta_sys = c.eta_channel * p.eta_det;
  return c;
}

double expected_gain(const ExperimentalParams& p, double eta_sys) {
  const double x = eta_sys * p.t_B * p.mu;
  return (1.0 - p.f) * one_minus_exp(x) + p.f * one_minus_exp(2.0 * x);
}

double expected_coincidence_rate(const ExperimentalParams& p, double eta_sys) {
  // Data click in the slot times a monitor click fed by either one or two
  // non-empty pulses, weighted by the joint statistics of each signal and the
  // pulse that preceded it. Collected over the ensemble the two monitor
  // brightness classes carry weights (1-f)(3+f)/4 and (1+6f+f^2)/4.
  const double x = eta_sys * p.t_B * p.mu;
  const double half = eta_sys * (1.0 - p.t_B) * p.mu / 2.0;
  const double data = one_minus_exp(x);
  const double mono = one_minus_exp(half);        // one contributing pulse
  const double duo = one_minus_exp(2.0 * half);   // two contributing pulses
  const double f = p.f;
  return (data / 4.0) *
         ((1.0 - f) * (3.0 + f) * mono + (1.0 + 6.0 * f + f * f) * duo);
}

double expected_decoy_gain(const ExperimentalParams& p, double eta_sys) {
  return p.f * one_minus_exp(2.0 * eta_sys * p.t_B * p.mu);
}

double expected_gain_four_state(const ExperimentalParams& p, double eta_sys) {
  const double x = eta_sys * p.t_B * p.mu;
  return (1.0 - p.f_d - p.f_v) * one_minus_exp(x) +
         p.f_d * one_minus_exp(2.0 * x);
}

double distance_for_gain(
    const ExperimentalParams& p, double gain_target,
    const std::function<double(const ExperimentalParams&, double)>& gain_fn) {
  validate(p);
  if (!(gain_target > 0.0))
    throw std::domain_error("distance_for_gain: target must be > 0");
  const auto gain_at = [&](double length) {
    return gain_fn(p, channel_point(p, length).eta_sys);
  };
  const double g0 = gain_at(0.0);
  if (gain_target > g0)
    throw std::domain_error("distance_for_gain: target above zero-length gain");
  if (gain_target == g0) return 0.0;
  if (p.alpha_channel_db_per_km == 0.0)
    throw std::domain_error("distance_for_gain: lossless fiber never decays");

  // Gain decreases monotonically with length; expand a log-spaced bracket,
  // then bisect to the contracted relative accuracy.
  double lo = 0.0, hi = 1.0;
  int guard = 0;
  while (gain_at(hi) > gain_target) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 60)
      throw std::domain_error("distance_for_gain: target below reachable range");
  }
  for (int iter = 0; iter < 300; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double g = gain_at(mid);
    if (std::abs(g - gain_target) <= 1e-12 * gain_target) return mid;
    if (g > gain_target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

ExperimentalParams params_from_json_object(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: not valid JSON: ") +
                                e.what());
  }
  if (!j.is_object())
    throw std::invalid_argument("config: expected a JSON object");

  static const char* known[] = {"mu",      "f",   "f_d",
                                "f_v",     "t_B", "eta_det",
                                "alpha_channel_db_per_km", "m_max"};
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok)
      throw std::invalid_argument("config: unknown key '" + item.key() + "'");
  }

  const auto need_number = [&](const char* key) {
    if (!j.contains(key))
      throw std::invalid_argument(std::string("config: missing key '") + key +
                                  "'");
    if (!j[key].is_number())
      throw std::invalid_argument(std::string("config: key '") + key +
                                  "' must be a number");
    return j[key].get<double>();
  };

  ExperimentalParams p;
  p.mu = need_number("mu");
  p.f = need_number("f");
  p.t_B = need_number("t_B");
  p.eta_det = need_number("eta_det");
  p.alpha_channel_db_per_km = need_number("alpha_channel_db_per_km");

  const bool has_fd = j.contains("f_d");
  const bool has_fv = j.contains("f_v");
  if (has_fd != has_fv)
    throw std::invalid_argument(
        "config: f_d and f_v must be given together or not at all");
  if (has_fd) {
    p.f_d = need_number("f_d");
    p.f_v = need_number("f_v");
  }
  if (j.contains("m_max")) {
    if (!j["m_max"].is_number_integer())
      throw std::invalid_argument("config: m_max must be an integer");
    p.m_max = j["m_max"].get<int>();
  }
  validate(p);
  return p;
}

}  // namespace cowlab
