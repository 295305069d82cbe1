#include <cmath>
#include <stdexcept>

#include "cowlab/attack.hpp"
#include "cowlab/bounds.hpp"
#include "cowlab/params.hpp"
#include "doctest.h"

namespace {

cowlab::ExperimentalParams setup_a() {
  cowlab::ExperimentalParams p;
  p.mu = 0.06;
  p.f = 0.155;
  p.t_B = 0.9;
  p.eta_det = 0.22;
  p.alpha_channel_db_per_km = 0.1625;
  return p;
}

cowlab::ExperimentalParams setup_b() {
  cowlab::ExperimentalParams p = setup_a();
  p.mu = 0.1;
  p.eta_det = 0.27;
  p.alpha_channel_db_per_km = 0.168;
  return p;
}

cowlab::ExperimentalParams setup_a4() {
  cowlab::ExperimentalParams p = setup_a();
  p.f_d = 0.1;
  p.f_v = 0.055;
  return p;
}

cowlab::ExperimentalParams setup_b4() {
  cowlab::ExperimentalParams p = setup_b();
  p.f_d = 0.1;
  p.f_v = 0.055;
  return p;
}

void check_internal_consistency(const cowlab::ExperimentalParams& p,
                                const cowlab::CrossingResult& r,
                                double (*gain)(const cowlab::ExperimentalParams&,
                                               double)) {
  // Attenuation is the fiber loss at the reported length, and the honest
  // gain there reproduces the crossing gain.
  CHECK(std::abs(r.attenuation_db - p.alpha_channel_db_per_km * r.l_zero_km) <=
        1e-9 * (1.0 + r.attenuation_db));
  const cowlab::ChannelPoint cp = cowlab::channel_point(p, r.l_zero_km);
  CHECK(std::abs(gain(p, cp.eta_sys) - r.g_zero) <= 1e-9 * r.g_zero);
  CHECK(!r.witness.empty());
}

}  // namespace

TEST_CASE("attack reach at the reference operating points") {
  const cowlab::CrossingResult a = cowlab::reach_three_state(setup_a());
  CHECK(std::abs(std::log10(a.g_zero) - (-2.62)) <= 0.01);
  CHECK(std::abs(a.l_zero_km - 47.0) <= 3.0);
  CHECK(std::abs(a.attenuation_db - 7.6) <= 0.5);
  check_internal_consistency(setup_a(), a, cowlab::expected_gain);

  const cowlab::CrossingResult b = cowlab::reach_three_state(setup_b());
  CHECK(std::abs(std::log10(b.g_zero) - (-2.19)) <= 0.01);
  CHECK(std::abs(b.l_zero_km - 38.0) <= 3.0);
  CHECK(std::abs(b.attenuation_db - 6.4) <= 0.5);
}

TEST_CASE("coincidence-monitoring crossing at the reference operating points") {
  const cowlab::CrossingResult a = cowlab::crossing_coincidence(setup_a());
  CHECK(std::abs(std::log10(a.g_zero) - (-3.44)) <= 0.05);
  CHECK(std::abs(a.l_zero_km - 97.0) <= 3.0);
  CHECK(std::abs(a.attenuation_db - 15.8) <= 0.5);
  check_internal_consistency(setup_a(), a, cowlab::expected_gain);

  const cowlab::CrossingResult b = cowlab::crossing_coincidence(setup_b());
  CHECK(std::abs(std::log10(b.g_zero) - (-2.92)) <= 0.05);
  CHECK(std::abs(b.l_zero_km - 81.0) <= 3.0);
  CHECK(std::abs(b.attenuation_db - 13.7) <= 0.5);

  // Coincidence monitoring extends the protected range beyond the raw reach.
  CHECK(cowlab::reach_three_state(setup_a()).l_zero_km < a.l_zero_km);

  // At the crossing the minimized attack coincidence rate meets the honest
  // rate to the bisection tolerance.
  const cowlab::ChannelPoint cp = cowlab::channel_point(setup_a(), a.l_zero_km);
  const double honest =
      cowlab::expected_coincidence_rate(setup_a(), cp.eta_sys);
  const cowlab::CoinMinimizeResult att =
      cowlab::minimize_coincidences(setup_a(), a.g_zero);
  REQUIRE(att.status == cowlab::LpStatus::optimal);
  CHECK(std::abs(std::log10(att.g_zero_coin) - std::log10(honest)) <= 1e-3);

  cowlab::ExperimentalParams no_monitor = setup_a();
  no_monitor.t_B = 1.0;
  CHECK_THROWS_AS(cowlab::crossing_coincidence(no_monitor), std::domain_error);
}

TEST_CASE("decoy-rate crossing at the reference operating points") {
  const cowlab::CrossingResult a = cowlab::crossing_decoy(setup_a());
  CHECK(std::abs(std::log10(a.g_zero) - (-8.16)) <= 0.10);
  CHECK(std::abs(a.l_zero_km - 387.0) <= 8.0);
  CHECK(std::abs(a.attenuation_db - 62.9) <= 1.5);
  check_internal_consistency(setup_a(), a, cowlab::expected_gain);

  const cowlab::CrossingResult b = cowlab::crossing_decoy(setup_b());
  CHECK(std::abs(std::log10(b.g_zero) - (-7.27)) <= 0.10);
  CHECK(std::abs(b.l_zero_km - 340.0) <= 8.0);
  CHECK(std::abs(b.attenuation_db - 57.1) <= 1.5);

  // Decoy-rate monitoring reaches far beyond coincidence monitoring.
  CHECK(cowlab::crossing_coincidence(setup_a()).l_zero_km < a.l_zero_km);

  // Ratio equality at the crossing: the attack's best decoy-line fraction of
  // the gain meets the honest fraction.
  const cowlab::ChannelPoint cp = cowlab::channel_point(setup_a(), a.l_zero_km);
  const double honest_ratio =
      cowlab::expected_decoy_gain(setup_a(), cp.eta_sys) / a.g_zero;
  const cowlab::DecoyMaximizeResult att =
      cowlab::maximize_decoy_rate(setup_a(), a.g_zero);
  REQUIRE(att.feasible);
  CHECK(std::abs(att.g_zero_decoy / a.g_zero - honest_ratio) <=
        1e-3 * honest_ratio);
}

TEST_CASE("four-signal reach at the reference operating points") {
  const cowlab::CrossingResult a = cowlab::reach_four_state(setup_a4());
  CHECK(std::abs(std::log10(a.g_zero) - (-5.66)) <= 0.05);
  CHECK(std::abs(a.l_zero_km - 231.0) <= 5.0);
  CHECK(std::abs(a.attenuation_db - 37.5) <= 1.0);
  check_internal_consistency(setup_a4(), a, cowlab::expected_gain_four_state);

  const cowlab::CrossingResult b = cowlab::reach_four_state(setup_b4());
  CHECK(std::abs(std::log10(b.g_zero) - (-4.79)) <= 0.05);
  CHECK(std::abs(b.l_zero_km - 190.0) <= 5.0);
  CHECK(std::abs(b.attenuation_db - 31.9) <= 1.0);
}

TEST_CASE("largest secure intensity against decoy-rate monitoring") {
  const cowlab::ExperimentalParams p = setup_a();
  double prev = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double eta = std::pow(10.0, -5.0 + 2.0 * i / 7.0);
    const double m = cowlab::mu_max_decoy(p, eta);
    CHECK(m > 1e-6);
    CHECK(m < cowlab::kMuMaxCap);
    CHECK(m >= prev - 1e-9);  // nondecreasing with transmission
    prev = m;
  }
  // A lossless channel favors the honest parties at every scanned intensity.
  CHECK(cowlab::mu_max_decoy(p, 1.0) == cowlab::kMuMaxCap);

  // The margin genuinely flips at the reported intensity: an attack forced
  // to reproduce the honest gain (ideal detectors) first reaches the honest
  // decoy rate of the monitored channel exactly there.
  const double eta = 1e-4;
  const double mstar = cowlab::mu_max_decoy(p, eta);
  const auto margin = [&](double mu) {
    cowlab::ExperimentalParams q = p;
    q.mu = mu;
    const double g = cowlab::expected_gain(q, eta);
    double length = 0.0;
    try {
      length = cowlab::distance_for_gain(q, g, cowlab::expected_gain);
    } catch (const std::domain_error&) {
      return -1.0;
    }
    const cowlab::ChannelPoint cp = cowlab::channel_point(q, length);
    const cowlab::DecoyMaximizeResult r = cowlab::maximize_decoy_rate(q, g);
    if (!r.feasible) return -1.0;
    return r.g_zero_decoy - cowlab::expected_decoy_gain(q, cp.eta_sys);
  };
  CHECK(margin(mstar * (1.0 - 1e-3)) < 0.0);
  CHECK(margin(mstar * (1.0 + 1e-3)) >= 0.0);

  CHECK_THROWS_AS(cowlab::mu_max_decoy(p, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(cowlab::mu_max_decoy(p, 1.5), std::invalid_argument);
}

TEST_CASE("largest secure intensity against the four-signal protocol") {
  const cowlab::ExperimentalParams p = setup_a4();
  double prev = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double eta = std::pow(10.0, -4.0 + 2.0 * i / 3.0);
    const double m = cowlab::mu_max_four_state(p, eta);
    CHECK(m > 1e-6);
    CHECK(m < cowlab::kMuMaxCap);
    CHECK(m >= prev - 1e-9);
    prev = m;
  }
  CHECK(cowlab::mu_max_four_state(p, 1.0) == cowlab::kMuMaxCap);
  CHECK_THROWS_AS(cowlab::mu_max_four_state(setup_a(), 0.1),
                  std::invalid_argument);
}

TEST_CASE("upper-bound curve shape against decoy-rate monitoring") {
  const cowlab::RateCurve curve = cowlab::upper_bound_curve(
      setup_a(), cowlab::BoundVariant::decoy_monitoring, 1e-5, 1e-3, 13);
  REQUIRE(static_cast<int>(curve.points.size()) == 13);
  CHECK(curve.fitted_exponent > 1.0);
  CHECK(curve.fitted_exponent < 2.0);
  CHECK(std::abs(curve.fitted_exponent - 4.0 / 3.0) <= 0.12);
  // Rates grow with transmission; the curve bends between the linear and
  // quadratic references anchored at the top of the grid.
  const cowlab::RatePoint& top = curve.points.back();
  for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
    const cowlab::RatePoint& pt = curve.points[i];
    CHECK(pt.rate < curve.points[i + 1].rate);
    const double ratio = pt.eta / top.eta;
    CHECK(pt.rate < top.rate * ratio);           // below the linear reference
    CHECK(pt.rate > top.rate * ratio * ratio);   // above the quadratic one
  }
  CHECK_THROWS_AS(cowlab::upper_bound_curve(
                      setup_a(), cowlab::BoundVariant::decoy_monitoring, 1e-5,
                      1e-3, 4),
                  std::invalid_argument);
  CHECK_THROWS_AS(cowlab::upper_bound_curve(
                      setup_a(), cowlab::BoundVariant::decoy_monitoring, 0.5,
                      0.1, 13),
                  std::invalid_argument);
}

TEST_CASE("upper-bound curve shape against the four-signal protocol") {
  const cowlab::RateCurve curve = cowlab::upper_bound_curve(
      setup_a4(), cowlab::BoundVariant::four_state, 1e-5, 3e-3, 7);
  REQUIRE(static_cast<int>(curve.points.size()) == 7);
  CHECK(curve.fitted_exponent > 1.0);
  CHECK(curve.fitted_exponent < 2.0);
  for (std::size_t i = 0; i + 1 < curve.points.size(); ++i)
    CHECK(curve.points[i].rate < curve.points[i + 1].rate);
}
