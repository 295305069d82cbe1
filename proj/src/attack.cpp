#include "cowlab/attack.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cowlab {

namespace {

double ipow(double base, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= base;
  return r;
}

void check_block_length(int k) {
  if (k < 2) throw std::invalid_argument("attack: block length k must be >= 2");
}

void check_posterior(const std::array<double, 4>& p) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= -1e-12))
      throw std::invalid_argument("attack: posterior entries must be >= 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("attack: posterior must sum to 1");
  if (std::abs(p[0] - p[1]) > 1e-9)
    throw std::invalid_argument("attack: key posteriors must be equal");
}

}  // namespace

BlockCounts block_counts(int k) {
  check_block_length(k);
  BlockCounts c;
  if (k == 2) {
    // Two conclusive key signals: the boundary type decides everything.
    c.n_individual[0][0] = 1.0;  // (phi0, phi0): the second survives
    c.n_individual[1][1] = 1.0;  // (phi1, phi1): the first survives
    c.n_double[0][1] = 1.0;      // (phi1, phi0): both survive as a pair
    return c;
  }
  const double kd = k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c.n_individual[i][j] = (kd - 1.0) / 2.0;
  c.n_double[0][0] = (kd - 1.0) / 4.0;
  c.n_double[0][1] = (kd + 1.0) / 4.0;
  c.n_double[1][0] = (kd - 3.0) / 4.0;
  c.n_double[1][1] = (kd - 1.0) / 4.0;
  return c;
}

double p_click_three_state(int k, double p0) {
  check_block_length(k);
  if (!(p0 > 0.0 && p0 <= 0.5))
    throw std::invalid_argument("p_click_three_state: p0 must lie in (0, 1/2]");
  return (-1.0 + (k + 1) * p0 +
          ipow(1.0 - 2.0 * p0, k) * (1.0 + (k - 1) * p0)) /
         p0;
}

double gain_zero(double p_c, int m_max,
                 const std::function<double(int)>& per_block) {
  if (!(p_c >= 0.0 && p_c < 1.0))
    throw std::invalid_argument("gain_zero: p_c must lie in [0, 1)");
  if (m_max < 2) throw std::invalid_argument("gain_zero: m_max must be >= 2");
  if (p_c == 0.0) return 0.0;
  // Runs of exactly k conclusive outcomes carry weight p_c^k (1 - p_c);
  // anything of length m_max or more is resent as an m_max block. The
  // prefactor normalizes per transmitted signal.
  double sum = 0.0;
  for (int k = 2; k <= m_max - 1; ++k)
    sum += ipow(p_c, k) * (1.0 - p_c) * per_block(k);
  sum += ipow(p_c, m_max) * per_block(m_max);
  return (1.0 - p_c) / (1.0 - ipow(p_c, m_max + 1)) * sum;
}

CoinAttackStats coin_attack_stats(int k, const PhotonDistribution& q,
                                  const PhotonDistribution& p, double t_B,
                                  double eta_det) {
  check_block_length(k);
  const PulseStats ind = closed_individual(q, t_B, eta_det);
  const PulseStats dbl = closed_double(p, t_B, eta_det);
  CoinAttackStats out;
  const double half = (k - 1) / 2.0;
  out.p_click = half * (ind.p_click + dbl.p_click / 2.0);
  out.p_coin = half * (ind.p_coin + dbl.p_coin / 2.0);
  return out;
}

CoinMinimizeResult minimize_coincidences(const ExperimentalParams& params,
                                         double g_target, int n_cut) {
  validate(params);
  if (!(g_target >= 0.0))
    throw std::invalid_argument("minimize_coincidences: negative target");
  if (n_cut < 1)
    throw std::invalid_argument("minimize_coincidences: n_cut must be >= 1");

  const UsdSolution usd = three_state_usd(params.mu, params.f);
  // Per-signal weight of one block click/coincidence unit: every block of k
  // contributes (k-1)/2 such units, folded over the block-length statistics.
  const double unit = gain_zero(usd.p_c, params.m_max,
                                [](int k) { return (k - 1) / 2.0; });

  const int nv = 2 * (n_cut + 1);
  LinearProgram lp;
  lp.objective.resize(nv);
  lp.eq_matrix.resize(3, nv);
  lp.eq_rhs.resize(3);
  lp.lower = Eigen::VectorXd::Zero(nv);
  lp.upper = Eigen::VectorXd::Ones(nv);
  const double gain_scale = (g_target > 0.0) ? 1.0 / g_target : 1.0;
  for (int n = 0; n <= n_cut; ++n) {
    const PulseStats ind = closed_individual_fock(n, params.t_B, params.eta_det);
    const PulseStats dbl = closed_double_fock(n, params.t_B, params.eta_det);
    lp.objective[n] = unit * ind.p_coin;
    lp.objective[n_cut + 1 + n] = unit * dbl.p_coin / 2.0;
    lp.eq_matrix(0, n) = unit * ind.p_click * gain_scale;
    lp.eq_matrix(0, n_cut + 1 + n) = unit * dbl.p_click / 2.0 * gain_scale;
    lp.eq_matrix(1, n) = 1.0;
    lp.eq_matrix(1, n_cut + 1 + n) = 0.0;
    lp.eq_matrix(2, n) = 0.0;
    lp.eq_matrix(2, n_cut + 1 + n) = 1.0;
  }
  lp.eq_rhs << (g_target > 0.0 ? 1.0 : 0.0), 1.0, 1.0;

  const LpSolution sol = solve_lp(lp);
  CoinMinimizeResult out;
  out.status = sol.status;
  if (sol.status != LpStatus::optimal) return out;

  std::vector<double> qv(n_cut + 1), pv(n_cut + 1);
  double qs = 0.0, ps = 0.0;
  for (int n = 0; n <= n_cut; ++n) {
    qv[n] = std::max(sol.x[n], 0.0);
    pv[n] = std::max(sol.x[n_cut + 1 + n], 0.0);
    qs += qv[n];
    ps += pv[n];
  }
  for (int n = 0; n <= n_cut; ++n) {
    qv[n] /= qs;
    pv[n] /= ps;
  }
  out.q = PhotonDistribution::validated(qv);
  out.p = PhotonDistribution::validated(pv);
  double gain = 0.0;
  for (int n = 0; n <= n_cut; ++n)
    gain += lp.eq_matrix(0, n) / gain_scale * out.q.probs[n] +
            lp.eq_matrix(0, n_cut + 1 + n) / gain_scale * out.p.probs[n];
  out.g_zero = gain;
  out.g_zero_coin = sol.objective;
  return out;
}

double p_click_decoy_recursive(int k, double p2) {
  if (k < 1) throw std::invalid_argument("p_click_decoy: k must be >= 1");
  if (!(p2 >= 0.0 && p2 <= 1.0))
    throw std::invalid_argument("p_click_decoy: p2 must lie in [0, 1]");
  double pd = 0.0;  // value at k = 1
  double p2j = p2;  // p2^j
  for (int j = 2; j <= k; ++j) {
    p2j *= p2;
    pd = ((1.0 - p2) * j + p2 - 2.0 + pd) * p2 + p2j;
  }
  return pd;
}

double p_click_decoy_closed(int k, double p2) {
  check_block_length(k);
  if (!(p2 >= 0.0 && p2 <= 1.0))
    throw std::invalid_argument("p_click_decoy: p2 must lie in [0, 1]");
  if (p2 == 0.0) return 0.0;
  if (p2 > 1.0 - 1e-9) return p_click_decoy_recursive(k, p2);  // stable limit
  return p2 / (1.0 - p2) *
         ((1.0 - p2) * k - 2.0 +
          ((1.0 - p2) * k + 2.0 * p2) * ipow(p2, k - 1));
}

double p_click_decoy(int k, double p2) {
  // The closed form loses ~3 leading digits per factor of 10 near p2 = 1;
  // hand off to the exact recursion well before that matters.
  return (p2 <= 0.95) ? p_click_decoy_closed(k, p2)
                      : p_click_decoy_recursive(k, p2);
}

double p_click_four_state_recursive(int k,
                                    const std::array<double, 4>& p) {
  check_block_length(k);
  check_posterior(p);
  const double p0 = p[0], p2 = p[2], pcc = 1.0 - p[3];
  double c = 2.0 * p0 * (1.0 - p2);  // k = 2
  double p2j = p2;                   // p2^(j-1)
  for (int j = 3; j <= k; ++j) {
    p2j *= p2;
    c = 2.0 * p0 * (1.0 - p2j) +
        (j - 2.0 + (1.0 - j) * p2 + p2j) * pcc + p2 * c;
  }
  return c;
}

double p_click_four_state_closed(int k, const std::array<double, 4>& p) {
  check_block_length(k);
  check_posterior(p);
  const double p0 = p[0], p2 = p[2], pcc = 1.0 - p[3];
  if (p2 < 1e-14) return 2.0 * p0 + (k - 2.0) * pcc;  // p2 -> 0 limit
  if (p2 > 1.0 - 1e-9) return p_click_four_state_recursive(k, p);
  return (-2.0 * p0 * p2 +
          ipow(p2, k) *
              (2.0 * p2 * (p0 - pcc) - k * (p2 - 1.0) * (2.0 * p0 - pcc)) +
          (2.0 + k * (p2 - 1.0)) * p2 * pcc) /
         (p2 * (p2 - 1.0));
}

double p_click_four_state(int k, const std::array<double, 4>& p) {
  return p_click_four_state_recursive(k, p);
}

double p_click_four_state_given_first(int k, int first,
                                      const std::array<double, 4>& p) {
  check_block_length(k);
  check_posterior(p);
  if (first < 0 || first > 3)
    throw std::invalid_argument("p_click_four_state_given_first: bad signal");
  const double p0 = p[0], p1 = p[1], p2 = p[2], p3 = p[3];
  const double pcc = 1.0 - p3;
  if (first == 2)
    // A leading double-pulse signal is stripped; the rest is a fresh block.
    return (k == 2) ? 0.0 : p_click_four_state(k - 1, p);
  if (first == 1) {
    double c = 2.0 * p0 + p1 + p3;  // k = 2 by direct enumeration
    for (int j = 3; j <= k; ++j)
      c = p0 * (2.0 + (j - 2.0) * pcc) + p1 * (1.0 + (j - 2.0) * pcc) +
          p2 * c + p3 * (1.0 + (j - 2.0) * pcc);
    return c;
  }
  // first == 0 and first == 3 share the recursion: a leading early-pulse key
  // signal is stripped by the front rule, a vacuum signal never clicks.
  double c = p0;  // k = 2 by direct enumeration
  for (int j = 3; j <= k; ++j)
    c = p0 * (1.0 + (j - 2.0) * pcc) + p1 * (j - 2.0) * pcc + p2 * c +
        p3 * (j - 2.0) * pcc;
  return c;
}

DecoyAttackGains decoy_attack_gains(const ExperimentalParams& params,
                                    double zeta,
                                    const std::vector<double>& gamma) {
  validate(params);
  if (static_cast<int>(gamma.size()) != params.m_max - 1)
    throw std::invalid_argument(
        "decoy_attack_gains: gamma must cover k = 2..m_max");
  for (double g : gamma)
    if (!(g >= 0.0 && g <= 1.0))
      throw std::invalid_argument("decoy_attack_gains: gamma outside [0,1]");

  const UsdSolution usd = tunable_usd(params.mu, params.f, zeta);
  const double p0 = usd.p_given_c[0];
  const double p2 = usd.p_given_c[2];
  const auto key_clicks = [&](int k) {
    return (p0 > 0.0) ? p_click_three_state(k, p0) : 0.0;
  };
  DecoyAttackGains out;
  out.g_zero = gain_zero(usd.p_c, params.m_max, [&](int k) {
    return gamma[k - 2] * key_clicks(k);
  });
  out.g_zero_decoy = gain_zero(usd.p_c, params.m_max, [&](int k) {
    return gamma[k - 2] * p_click_decoy(k, p2);
  });
  // The certainty-click block formula was derived without double-pulse
  // conclusives; verify it still matches the general recursion at p2 > 0.
  double disc = 0.0;
  if (p0 > 0.0) {
    const std::array<double, 4> post = {p0, p0, p2, 0.0};
    for (int k = 2; k <= params.m_max; ++k)
      disc = std::max(disc, std::abs(p_click_three_state(k, p0) -
                                     p_click_four_state_recursive(k, post)));
  }
  out.click_formula_discrepancy = disc;
  return out;
}

DecoyMaximizeResult maximize_decoy_rate(const ExperimentalParams& params,
                                        double g_target) {
  validate(params);
  if (!(g_target > 0.0))
    throw std::invalid_argument("maximize_decoy_rate: target must be > 0");

  const int nk = params.m_max - 1;
  // Inner problem at fixed zeta: per-block weights are fixed numbers, so the
  // best acceptance probabilities gamma solve a box-constrained LP with the
  // single equality "total gain = target".
  struct Inner {
    bool feasible = false;
    double value = 0.0;
    std::vector<double> gamma;
  };
  const auto inner = [&](double zeta) {
    const UsdSolution usd = tunable_usd(params.mu, params.f, zeta);
    const double p0 = usd.p_given_c[0];
    const double p2 = usd.p_given_c[2];
    const double pc = usd.p_c;
    Inner r;
    if (!(pc > 0.0)) return r;
    Eigen::VectorXd key_w(nk), decoy_w(nk);
    for (int k = 2; k <= params.m_max; ++k) {
      const double w =
          gain_zero(pc, params.m_max,
                    [&](int kk) { return (kk == k) ? 1.0 : 0.0; });
      key_w[k - 2] = w * ((p0 > 0.0) ? p_click_three_state(k, p0) : 0.0);
      decoy_w[k - 2] = w * p_click_decoy(k, p2);
    }
    LinearProgram lp;
    lp.objective = -decoy_w;  // maximize the decoy-line gain
    lp.eq_matrix.resize(1, nk);
    lp.eq_matrix.row(0) = key_w.transpose() / g_target;
    lp.eq_rhs.resize(1);
    lp.eq_rhs << 1.0;
    lp.lower = Eigen::VectorXd::Zero(nk);
    lp.upper = Eigen::VectorXd::Ones(nk);
    const LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal) return r;
    r.feasible = true;
    r.value = -sol.objective;
    r.gamma.assign(sol.x.data(), sol.x.data() + nk);
    return r;
  };

  const Max1dResult best = maximize_1d(
      [&](double zeta) {
        const Inner r = inner(zeta);
        return r.feasible ? r.value : -1.0;  // all feasible values are >= 0
      },
      params.f, 1.0, 41, 60);

  DecoyMaximizeResult out;
  const Inner r = inner(best.x);
  if (!r.feasible) return out;  // nowhere feasible
  out.feasible = true;
  out.zeta = best.x;
  out.g_zero_decoy = best.value;
  out.gamma = r.gamma;
  out.g_zero = g_target;
  return out;
}

FourStateGainResult four_state_gain_zero(const ExperimentalParams& params) {
  validate(params);
  if (!(params.f_d > 0.0 || params.f_v > 0.0))
    throw std::invalid_argument(
        "four_state_gain_zero: needs the f_d/f_v split");
  FourStateGainResult out;
  out.usd = four_state_usd(params.mu, params.f_d, params.f_v);
  out.g_zero = gain_zero(out.usd.p_c, params.m_max, [&](int k) {
    return p_click_four_state(k, out.usd.p_given_c);
  });
  return out;
}

AttackResult evaluate_attack(const ExperimentalParams& params,
                             const AttackConfig& config) {
  validate(params);
  const bool has_dists =
      config.resend_individual.has_value() || config.resend_double.has_value();
  if (config.high_intensity && has_dists)
    throw std::invalid_argument(
        "evaluate_attack: high_intensity excludes explicit distributions");
  if (!config.high_intensity &&
      (!config.resend_individual.has_value() ||
       !config.resend_double.has_value()) &&
      config.variant == AttackVariant::three_state)
    throw std::invalid_argument(
        "evaluate_attack: provide both resend distributions or high_intensity");
  std::vector<double> gamma = config.gamma;
  if (gamma.empty()) gamma.assign(params.m_max - 1, 1.0);
  if (static_cast<int>(gamma.size()) != params.m_max - 1)
    throw std::invalid_argument("evaluate_attack: gamma must cover k = 2..m_max");
  for (double g : gamma)
    if (!(g >= 0.0 && g <= 1.0))
      throw std::invalid_argument("evaluate_attack: gamma outside [0,1]");

  AttackResult out;
  std::ostringstream witness;
  switch (config.variant) {
    case AttackVariant::three_state: {
      const UsdSolution usd = three_state_usd(params.mu, params.f);
      const double p0 = usd.p_given_c[0];
      const double p2 = usd.p_given_c[2];
      out.g_zero = gain_zero(usd.p_c, params.m_max, [&](int k) {
        if (config.high_intensity)
          return gamma[k - 2] * ((p0 > 0.0) ? p_click_three_state(k, p0) : 0.0);
        return gamma[k - 2] *
               coin_attack_stats(k, *config.resend_individual,
                                 *config.resend_double, params.t_B,
                                 params.eta_det)
                   .p_click;
      });
      out.g_zero_coin =
          config.high_intensity
              ? 0.0
              : gain_zero(usd.p_c, params.m_max, [&](int k) {
                  return gamma[k - 2] *
                         coin_attack_stats(k, *config.resend_individual,
                                           *config.resend_double, params.t_B,
                                           params.eta_det)
                             .p_coin;
                });
      out.g_zero_decoy = gain_zero(usd.p_c, params.m_max, [&](int k) {
        return gamma[k - 2] * p_click_decoy(k, p2);
      });
      witness << "three-state attack, p_c=" << usd.p_c
              << (config.high_intensity ? ", high-intensity resend"
                                        : ", explicit resend statistics");
      break;
    }
    case AttackVariant::three_state_tunable: {
      const DecoyAttackGains g = decoy_attack_gains(params, config.zeta, gamma);
      out.g_zero = g.g_zero;
      out.g_zero_decoy = g.g_zero_decoy;
      out.g_zero_coin = 0.0;
      witness << "tunable three-state attack, zeta=" << config.zeta
              << ", click formula discrepancy=" << g.click_formula_discrepancy;
      break;
    }
    case AttackVariant::four_state: {
      const FourStateGainResult g = four_state_gain_zero(params);
      out.g_zero = gain_zero(g.usd.p_c, params.m_max, [&](int k) {
        return gamma[k - 2] * p_click_four_state(k, g.usd.p_given_c);
      });
      out.g_zero_coin = 0.0;
      out.g_zero_decoy = 0.0;
      witness << "four-state attack, p_c=" << g.usd.p_c;
      break;
    }
  }
  out.witness = witness.str();
  return out;
}

}  // namespace cowlab
