#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cowlab/params.hpp"
#include "doctest.h"

namespace {

cowlab::ExperimentalParams reference_a() {
  cowlab::ExperimentalParams p;
  p.mu = 0.06;
  p.f = 0.155;
  p.t_B = 0.9;
  p.eta_det = 0.22;
  p.alpha_channel_db_per_km = 0.1625;
  return p;
}

// Independent coincidence-rate oracle: enumerate the nine ordered pairs of
// consecutive signals. Each non-empty data pulse contributes one coincidence
// opportunity whose monitor window spans that pulse and the following one;
// the window holds either one or two non-empty pulses, giving monitor click
// probabilities 1-exp(-eta(1-t_B)mu/2) and 1-exp(-eta(1-t_B)mu).
double coincidence_oracle(const cowlab::ExperimentalParams& p, double eta_sys) {
  const double x = eta_sys * p.t_B * p.mu;
  const double half = eta_sys * (1.0 - p.t_B) * p.mu / 2.0;
  const double data = 1.0 - std::exp(-x);
  const double mono = 1.0 - std::exp(-half);
  const double duo = 1.0 - std::exp(-2.0 * half);
  // Signal shapes (first pulse, second pulse): key 0 = (1,0), key 1 = (0,1),
  // decoy = (1,1), with priors (1-f)/2, (1-f)/2, f.
  const std::array<std::array<int, 2>, 3> shape = {{{1, 0}, {0, 1}, {1, 1}}};
  const std::array<double, 3> prior = {(1.0 - p.f) / 2.0, (1.0 - p.f) / 2.0,
                                       p.f};
  double total = 0.0;
  for (int m = 0; m < 3; ++m) {
    for (int n = 0; n < 3; ++n) {
      const double w = prior[static_cast<std::size_t>(m)] *
                       prior[static_cast<std::size_t>(n)];
      double contribution = 0.0;
      if (shape[static_cast<std::size_t>(m)][0] == 1) {
        // Window spans the two pulses of signal m.
        const int occupied = 1 + shape[static_cast<std::size_t>(m)][1];
        contribution += data * (occupied == 2 ? duo : mono);
      }
      if (shape[static_cast<std::size_t>(m)][1] == 1) {
        // Window spans the second pulse of m and the first pulse of n.
        const int occupied = 1 + shape[static_cast<std::size_t>(n)][0];
        contribution += data * (occupied == 2 ? duo : mono);
      }
      total += w * contribution;
    }
  }
  return total;
}

}  // namespace

TEST_CASE("coincidence rate equals the signal-pair enumeration oracle") {
  cowlab::ExperimentalParams p = reference_a();
  for (const double eta_sys : {0.22, 0.1, 0.01, 1e-4}) {
    const double got = cowlab::expected_coincidence_rate(p, eta_sys);
    const double want = coincidence_oracle(p, eta_sys);
    CHECK(std::abs(got - want) <= 1e-15 + 1e-12 * want);
  }
  p.f = 0.5;
  p.t_B = 0.7;
  const double got = cowlab::expected_coincidence_rate(p, 0.3);
  CHECK(std::abs(got - coincidence_oracle(p, 0.3)) <= 1e-15);
}

TEST_CASE("gain family basic identities") {
  const cowlab::ExperimentalParams p = reference_a();
  for (const double eta : {1.0, 0.22, 0.01}) {
    const double g = cowlab::expected_gain(p, eta);
    const double d = cowlab::expected_decoy_gain(p, eta);
    CHECK(g > 0.0);
    CHECK(d > 0.0);
    CHECK(d < g);  // decoy clicks are a subset of all clicks
    const double x = eta * p.t_B * p.mu;
    CHECK(std::abs(g - ((1.0 - p.f) * (1.0 - std::exp(-x)) +
                        p.f * (1.0 - std::exp(-2.0 * x)))) <= 1e-15);
    CHECK(std::abs(d - p.f * (1.0 - std::exp(-2.0 * x))) <= 1e-15);
  }
  // Monotone in the transmission.
  double prev = 0.0;
  for (int i = 1; i <= 40; ++i) {
    const double eta = i / 40.0;
    const double g = cowlab::expected_gain(p, eta);
    CHECK(g > prev);
    prev = g;
  }
  // Four-signal gain with the decoy budget split.
  cowlab::ExperimentalParams q = reference_a();
  q.f_d = 0.1;
  q.f_v = 0.055;
  const double g4 = cowlab::expected_gain_four_state(q, 0.22);
  const double x = 0.22 * q.t_B * q.mu;
  CHECK(std::abs(g4 - ((1.0 - q.f) * (1.0 - std::exp(-x)) +
                       q.f_d * (1.0 - std::exp(-2.0 * x)))) <= 1e-15);
  CHECK(g4 < cowlab::expected_gain(q, 0.22));  // vacuum signals never click
}

TEST_CASE("channel point and distance inversion round trip") {
  const cowlab::ExperimentalParams p = reference_a();
  const cowlab::ChannelPoint c = cowlab::channel_point(p, 50.0);
  CHECK(std::abs(c.eta_channel - std::pow(10.0, -0.1625 * 50.0 / 10.0)) <=
        1e-15);
  CHECK(std::abs(c.eta_sys - c.eta_channel * p.eta_det) <= 1e-15);
  CHECK_THROWS_AS(cowlab::channel_point(p, -1.0), std::invalid_argument);

  for (const double length : {0.0, 3.0, 47.0, 97.0, 230.0, 380.0}) {
    const double g =
        cowlab::expected_gain(p, cowlab::channel_point(p, length).eta_sys);
    const double back = cowlab::distance_for_gain(p, g, cowlab::expected_gain);
    CHECK(std::abs(back - length) <= 1e-9 * (1.0 + length));
  }

  // Unreachable targets throw.
  const double g0 = cowlab::expected_gain(p, p.eta_det);
  CHECK_THROWS_AS(cowlab::distance_for_gain(p, 2.0 * g0, cowlab::expected_gain),
                  std::domain_error);
  CHECK_THROWS_AS(cowlab::distance_for_gain(p, 0.0, cowlab::expected_gain),
                  std::domain_error);
  cowlab::ExperimentalParams lossless = reference_a();
  lossless.alpha_channel_db_per_km = 0.0;
  CHECK_THROWS_AS(
      cowlab::distance_for_gain(lossless, g0 / 10.0, cowlab::expected_gain),
      std::domain_error);
}

TEST_CASE("parameter validation ranges") {
  cowlab::ExperimentalParams p = reference_a();
  CHECK_NOTHROW(cowlab::validate(p));
  p.mu = 0.0;
  CHECK_THROWS_AS(cowlab::validate(p), std::invalid_argument);
  p = reference_a();
  p.f = 1.0;
  CHECK_THROWS_AS(cowlab::validate(p), std::invalid_argument);
  p = reference_a();
  p.t_B = 0.0;
  CHECK_THROWS_AS(cowlab::validate(p), std::invalid_argument);
  p = reference_a();
  p.eta_det = 1.5;
  CHECK_THROWS_AS(cowlab::validate(p), std::invalid_argument);
  p = reference_a();
  p.m_max = 1;
  CHECK_THROWS_AS(cowlab::validate(p), std::invalid_argument);
  p = reference_a();
  p.f_d = 0.1;
  p.f_v = 0.1;  // does not sum to f
  CHECK_THROWS_AS(cowlab::validate(p), std::invalid_argument);
  p.f_v = 0.055;
  CHECK_NOTHROW(cowlab::validate(p));
}

TEST_CASE("strict JSON parsing of experiment descriptions") {
  const std::string good = R"({"mu":0.06,"f":0.155,"t_B":0.9,"eta_det":0.22,
    "alpha_channel_db_per_km":0.1625})";
  const cowlab::ExperimentalParams p = cowlab::params_from_json_object(good);
  CHECK(p.mu == doctest::Approx(0.06));
  CHECK(p.m_max == 10);

  const std::string with_split = R"({"mu":0.06,"f":0.155,"f_d":0.1,
    "f_v":0.055,"t_B":0.9,"eta_det":0.22,"alpha_channel_db_per_km":0.1625,
    "m_max":12})";
  const cowlab::ExperimentalParams q =
      cowlab::params_from_json_object(with_split);
  CHECK(q.f_d == doctest::Approx(0.1));
  CHECK(q.m_max == 12);

  CHECK_THROWS_AS(cowlab::params_from_json_object("not json"),
                  std::invalid_argument);
  CHECK_THROWS_AS(cowlab::params_from_json_object("[1,2]"),
                  std::invalid_argument);
  // Unknown key.
  CHECK_THROWS_AS(cowlab::params_from_json_object(
                      R"({"mu":0.06,"f":0.155,"t_B":0.9,"eta_det":0.22,
                          "alpha_channel_db_per_km":0.16,"bogus":1})"),
                  std::invalid_argument);
  // Missing required key.
  CHECK_THROWS_AS(cowlab::params_from_json_object(
                      R"({"mu":0.06,"f":0.155,"t_B":0.9,"eta_det":0.22})"),
                  std::invalid_argument);
  // Wrong type.
  CHECK_THROWS_AS(cowlab::params_from_json_object(
                      R"({"mu":"x","f":0.155,"t_B":0.9,"eta_det":0.22,
                          "alpha_channel_db_per_km":0.16})"),
                  std::invalid_argument);
  // f_d without f_v.
  CHECK_THROWS_AS(cowlab::params_from_json_object(
                      R"({"mu":0.06,"f":0.155,"f_d":0.1,"t_B":0.9,
                          "eta_det":0.22,"alpha_channel_db_per_km":0.16})"),
                  std::invalid_argument);
  // Fractional m_max.
  CHECK_THROWS_AS(cowlab::params_from_json_object(
                      R"({"mu":0.06,"f":0.155,"t_B":0.9,"eta_det":0.22,
                          "alpha_channel_db_per_km":0.16,"m_max":9.5})"),
                  std::invalid_argument);
}
