#include "cowlab/fock.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cowlab {

namespace {

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

// (1 - c*eta)^n with an exact small-integer power loop.
double ipow(double base, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= base;
  return r;
}

}  // namespace

PhotonDistribution PhotonDistribution::delta(int n, int n_cut) {
  if (n < 0 || n > n_cut)
    throw std::invalid_argument("PhotonDistribution: n outside [0, n_cut]");
  PhotonDistribution d;
  d.probs.assign(n_cut + 1, 0.0);
  d.probs[n] = 1.0;
  return d;
}

PhotonDistribution PhotonDistribution::validated(std::vector<double> probs) {
  if (probs.empty())
    throw std::invalid_argument("PhotonDistribution: empty");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= -1e-15))
      throw std::invalid_argument("PhotonDistribution: negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("PhotonDistribution: probabilities must sum to 1");
  PhotonDistribution d;
  d.probs = std::move(probs);
  return d;
}

int MultiModeFockState::mode_index(const std::string& name) const {
  for (size_t i = 0; i < modes.size(); ++i)
    if (modes[i] == name) return static_cast<int>(i);
  throw std::invalid_argument("MultiModeFockState: unknown mode '" + name +
                              "'");
}

MultiModeFockState vacuum_state(const std::vector<std::string>& modes) {
  MultiModeFockState s;
  s.modes = modes;
  s.amps[std::vector<int>(modes.size(), 0)] = 1.0;
  return s;
}

int add_mode(MultiModeFockState& state, const std::string& name) {
  for (const auto& m : state.modes)
    if (m == name)
      throw std::invalid_argument("add_mode: duplicate mode '" + name + "'");
  state.modes.push_back(name);
  std::map<std::vector<int>, std::complex<double>> widened;
  for (const auto& [occ, amp] : state.amps) {
    std::vector<int> key = occ;
    key.push_back(0);
    widened.emplace(std::move(key), amp);
  }
  state.amps = std::move(widened);
  return static_cast<int>(state.modes.size()) - 1;
}

void rename_mode(MultiModeFockState& state, const std::string& old_name,
                 const std::string& new_name) {
  const int idx = state.mode_index(old_name);
  for (const auto& m : state.modes)
    if (m == new_name)
      throw std::invalid_argument("rename_mode: name '" + new_name +
                                  "' already in use");
  state.modes[idx] = new_name;
}

double norm_sq(const MultiModeFockState& state) {
  double s = 0.0;
  for (const auto& [occ, amp] : state.amps) s += std::norm(amp);
  return s;
}

int max_total_photons(const MultiModeFockState& state) {
  int best = 0;
  for (const auto& [occ, amp] : state.amps) {
    if (std::norm(amp) == 0.0) continue;
    int tot = 0;
    for (int n : occ) tot += n;
    best = std::max(best, tot);
  }
  return best;
}

MultiModeFockState apply_beamsplitter(const MultiModeFockState& state,
                                      const std::string& mode_a,
                                      const std::string& mode_b,
                                      double transmittance, BsPhase phase) {
  if (!(transmittance >= 0.0 && transmittance <= 1.0))
    throw std::invalid_argument("apply_beamsplitter: transmittance range");
  const int ia = state.mode_index(mode_a);
  const int ib = state.mode_index(mode_b);
  if (ia == ib) throw std::invalid_argument("apply_beamsplitter: same mode");
  const double rt = std::sqrt(transmittance);
  const double rr = std::sqrt(1.0 - transmittance);

  MultiModeFockState out;
  out.modes = state.modes;
  for (const auto& [occ, amp] : state.amps) {
    const int na = occ[ia];
    const int nb = occ[ib];
    if (na + nb == 0) {
      out.amps[occ] += amp;
      continue;
    }
    // Expand (a+)^na (b+)^nb under
    //   a+ -> rt a+ + ph rr b+,   b+ -> s rr a+ + rt b+
    // where (ph, s) = (1, -1) for the real convention and (i, i) for the
    // symmetric-i convention. j photons of a+ transmit, k photons of b+
    // cross over; the pair (j, k) lands j+k photons in mode a.
    const double inv_norm = 1.0 / std::sqrt(factorial(na) * factorial(nb));
    for (int j = 0; j <= na; ++j) {
      for (int k = 0; k <= nb; ++k) {
        const int new_a = j + k;
        const int new_b = na + nb - new_a;
        double mag = binom(na, j) * binom(nb, k) * ipow(rt, j + nb - k) *
                     ipow(rr, na - j + k) * inv_norm *
                     std::sqrt(factorial(new_a) * factorial(new_b));
        std::complex<double> coef;
        if (phase == BsPhase::real_reflection) {
          coef = ((k % 2 == 0) ? 1.0 : -1.0) * mag;
        } else {
          // i^((na - j) + k)
          static const std::complex<double> powers[4] = {
              {1, 0}, {0, 1}, {-1, 0}, {0, -1}};
          coef = powers[((na - j) + k) % 4] * mag;
        }
        std::vector<int> key = occ;
        key[ia] = new_a;
        key[ib] = new_b;
        out.amps[key] += amp * coef;
      }
    }
  }
  // Drop exact zeros produced by interference so downstream classification
  // loops stay small.
  for (auto it = out.amps.begin(); it != out.amps.end();) {
    if (std::norm(it->second) == 0.0)
      it = out.amps.erase(it);
    else
      ++it;
  }
  return out;
}

namespace {

// Push one or two pulse slots through the receiver: loss, data tap, delay
// interferometer, output recombiners. Slot u's recombiner pairs the short
// path of slot u with the long path of slot u-1; the destructive port is c_u
// and the constructive port is d_u.
MultiModeFockState run_individual_circuit(MultiModeFockState state, double t_B,
                                          double eta_det) {
  add_mode(state, "e1");
  state = apply_beamsplitter(state, "a1", "e1", eta_det);
  add_mode(state, "m1");
  state = apply_beamsplitter(state, "a1", "m1", t_B);
  rename_mode(state, "a1", "b1");
  add_mode(state, "l1");
  state = apply_beamsplitter(state, "m1", "l1", 0.5);
  add_mode(state, "v1");  // vacuum long path of the preceding (empty) slot
  state = apply_beamsplitter(state, "m1", "v1", 0.5);
  rename_mode(state, "m1", "c1");
  rename_mode(state, "v1", "d1");
  add_mode(state, "v2");  // vacuum short path of the following (empty) slot
  state = apply_beamsplitter(state, "v2", "l1", 0.5);
  rename_mode(state, "v2", "c2");
  rename_mode(state, "l1", "d2");
  return state;
}

MultiModeFockState run_double_circuit(MultiModeFockState state, double t_B,
                                      double eta_det) {
  add_mode(state, "e1");
  add_mode(state, "e2");
  state = apply_beamsplitter(state, "a1", "e1", eta_det);
  state = apply_beamsplitter(state, "a2", "e2", eta_det);
  add_mode(state, "m1");
  add_mode(state, "m2");
  state = apply_beamsplitter(state, "a1", "m1", t_B);
  state = apply_beamsplitter(state, "a2", "m2", t_B);
  rename_mode(state, "a1", "b1");
  rename_mode(state, "a2", "b2");
  add_mode(state, "l1");
  add_mode(state, "l2");
  state = apply_beamsplitter(state, "m1", "l1", 0.5);
  state = apply_beamsplitter(state, "m2", "l2", 0.5);
  add_mode(state, "v1");
  state = apply_beamsplitter(state, "m1", "v1", 0.5);
  rename_mode(state, "m1", "c1");
  rename_mode(state, "v1", "d1");
  state = apply_beamsplitter(state, "m2", "l1", 0.5);
  rename_mode(state, "m2", "c2");
  rename_mode(state, "l1", "d2");
  add_mode(state, "v3");
  state = apply_beamsplitter(state, "v3", "l2", 0.5);
  rename_mode(state, "v3", "c3");
  rename_mode(state, "l2", "d3");
  return state;
}

struct DoubleEventProbs {
  // Joint probabilities over (data click, monitor click) per slot.
  double p[2][2][2][2] = {};  // [b1][m1][b2][m2]
};

DoubleEventProbs classify_double(const MultiModeFockState& state) {
  const int b1 = state.mode_index("b1");
  const int b2 = state.mode_index("b2");
  const int c1 = state.mode_index("c1");
  const int d1 = state.mode_index("d1");
  const int c2 = state.mode_index("c2");
  const int d2 = state.mode_index("d2");
  DoubleEventProbs out;
  for (const auto& [occ, amp] : state.amps) {
    const int eb1 = occ[b1] > 0;
    const int eb2 = occ[b2] > 0;
    const int em1 = (occ[c1] > 0 || occ[d1] > 0);
    const int em2 = (occ[c2] > 0 || occ[d2] > 0);
    out.p[eb1][em1][eb2][em2] += std::norm(amp);
  }
  return out;
}

MultiModeFockState symmetric_double_input(int n) {
  // (a1+ + a2+)^n / sqrt(2^n n!) |0>: binomial amplitudes across the slots.
  MultiModeFockState s;
  s.modes = {"a1", "a2"};
  const double denom = std::pow(2.0, n);
  for (int j = 0; j <= n; ++j)
    s.amps[{j, n - j}] = std::sqrt(binom(n, j) / denom);
  return s;
}

}  // namespace

PulseStats simulate_individual_fock(int n, double t_B, double eta_det) {
  if (n < 0) throw std::invalid_argument("simulate_individual_fock: n < 0");
  MultiModeFockState s;
  s.modes = {"a1"};
  s.amps[{n}] = 1.0;
  s = run_individual_circuit(std::move(s), t_B, eta_det);
  const int b1 = s.mode_index("b1");
  const int c1 = s.mode_index("c1");
  const int d1 = s.mode_index("d1");
  double p_click = 0.0, p_coin = 0.0;
  for (const auto& [occ, amp] : s.amps) {
    const double w = std::norm(amp);
    const bool click = occ[b1] > 0;
    const bool mon = occ[c1] > 0 || occ[d1] > 0;
    if (click) p_click += w;
    if (click && mon) p_coin += w;
  }
  PulseStats st;
  st.p_click = p_click;
  st.p_coin = p_coin;
  st.p_single_click = p_click;
  st.p_double_click = 0.0;
  st.p_single_coin = p_coin;
  st.p_double_coin = 0.0;
  return st;
}

PulseStats simulate_double_fock(int n, double t_B, double eta_det) {
  if (n < 0) throw std::invalid_argument("simulate_double_fock: n < 0");
  const auto probs = classify_double(
      run_double_circuit(symmetric_double_input(n), t_B, eta_det));
  PulseStats st;
  for (int eb1 = 0; eb1 < 2; ++eb1)
    for (int em1 = 0; em1 < 2; ++em1)
      for (int eb2 = 0; eb2 < 2; ++eb2)
        for (int em2 = 0; em2 < 2; ++em2) {
          const double w = probs.p[eb1][em1][eb2][em2];
          const int clicks = eb1 + eb2;
          const int coins = (eb1 && em1) + (eb2 && em2);
          st.p_click += clicks * w;
          st.p_coin += coins * w;
          if (clicks == 1) st.p_single_click += w;
          if (clicks == 2) st.p_double_click += w;
          if (coins == 1) st.p_single_coin += w;
          if (coins == 2) st.p_double_coin += w;
        }
  return st;
}

CoinPatterns simulate_double_patterns_fock(int n, double t_B, double eta_det) {
  const auto probs = classify_double(
      run_double_circuit(symmetric_double_input(n), t_B, eta_det));
  CoinPatterns pats{};
  pats[0] = probs.p[1][1][0][0];
  pats[1] = probs.p[1][1][1][0];
  pats[2] = probs.p[1][1][0][1];
  pats[3] = probs.p[0][0][1][1];
  pats[4] = probs.p[1][0][1][1];
  pats[5] = probs.p[0][1][1][1];
  return pats;
}

PulseStats closed_individual_fock(int n, double t_B, double eta_det) {
  if (n < 0) throw std::invalid_argument("closed_individual_fock: n < 0");
  const double t = t_B, h = eta_det;
  const auto P = [&](double c) { return ipow(1.0 - c * h, n); };
  PulseStats st;
  st.p_click = 1.0 - P(t);
  st.p_coin = 1.0 - (P((1.0 - t) / 2.0) + P(t) - P((1.0 + t) / 2.0));
  st.p_single_click = st.p_click;
  st.p_double_click = 0.0;
  st.p_single_coin = st.p_coin;
  st.p_double_coin = 0.0;
  return st;
}

CoinPatterns closed_double_patterns_fock(int n, double t_B, double eta_det) {
  if (n < 0) throw std::invalid_argument("closed_double_patterns_fock: n < 0");
  const double t = t_B, h = eta_det;
  const auto P = [&](double c) { return ipow(1.0 - c * h, n); };
  CoinPatterns pats{};
  // Coincidence in slot 1 with slot 2 silent / data-only / monitor-only;
  // then the mirrored slot-2 cases.
  pats[0] = P(0.5) - P((3.0 - t) / 4.0) - P((1.0 + t) / 2.0) +
            P((3.0 + t) / 4.0);
  pats[1] = P((1.0 - t) / 2.0) - 2.0 * P(0.5) - P(3.0 * (1.0 - t) / 4.0) +
            2.0 * P((3.0 - t) / 4.0) + P((1.0 + t) / 2.0) -
            P((3.0 + t) / 4.0);
  pats[2] = P(t / 2.0) - P(0.5) - P((1.0 + t) / 4.0) + P((3.0 - t) / 4.0) -
            P(t) + P((1.0 + t) / 2.0) + P((1.0 + 3.0 * t) / 4.0) -
            P((3.0 + t) / 4.0);
  pats[3] = P((1.0 + t) / 4.0) - P((3.0 - t) / 4.0) -
            P((1.0 + 3.0 * t) / 4.0) + P((3.0 + t) / 4.0);
  pats[4] = P((1.0 - t) / 4.0) - P(3.0 * (1.0 - t) / 4.0) -
            2.0 * P((1.0 + t) / 4.0) + 2.0 * P((3.0 - t) / 4.0) +
            P((1.0 + 3.0 * t) / 4.0) - P((3.0 + t) / 4.0);
  // The lone-monitor-then-coincidence pattern shares its closed form with
  // pattern 2 by the time symmetry of the interferometer.
  pats[5] = pats[2];
  return pats;
}

PulseStats closed_double_fock(int n, double t_B, double eta_det) {
  if (n < 0) throw std::invalid_argument("closed_double_fock: n < 0");
  const double t = t_B, h = eta_det;
  const auto P = [&](double c) { return ipow(1.0 - c * h, n); };
  PulseStats st;
  st.p_click = 2.0 * (1.0 - P(t / 2.0));
  st.p_single_click = 2.0 * (P(t / 2.0) - P(t));
  st.p_double_click = 1.0 - (2.0 * P(t / 2.0) - P(t));
  st.p_coin = 2.0 + (P(0.5) - 2.0 * P(t / 2.0) + P((1.0 + t) / 4.0) -
                     P((1.0 - t) / 2.0) - P((1.0 - t) / 4.0));
  const auto pats = closed_double_patterns_fock(n, t_B, eta_det);
  st.p_single_coin = pats[0] + pats[1] + pats[2] + pats[3] + pats[4] + pats[5];
  st.p_double_coin =
      1.0 + (2.0 * P(0.5) - 2.0 * P((3.0 - t) / 4.0) - P((1.0 + t) / 2.0) +
             P((3.0 + t) / 4.0) + 2.0 * P((1.0 + t) / 4.0) -
             P((1.0 + 3.0 * t) / 4.0) - P((1.0 - t) / 2.0) +
             P(3.0 * (1.0 - t) / 4.0) - 2.0 * P(t / 2.0) + P(t) -
             P((1.0 - t) / 4.0));
  return st;
}

namespace {

PulseStats mix(const PhotonDistribution& dist,
               PulseStats (*per_n)(int, double, double), double t_B,
               double eta_det) {
  PulseStats acc;
  for (int n = 0; n <= dist.n_cut(); ++n) {
    const double w = dist.probs[n];
    if (w == 0.0) continue;
    const PulseStats s = per_n(n, t_B, eta_det);
    acc.p_click += w * s.p_click;
    acc.p_coin += w * s.p_coin;
    acc.p_single_click += w * s.p_single_click;
    acc.p_double_click += w * s.p_double_click;
    acc.p_single_coin += w * s.p_single_coin;
    acc.p_double_coin += w * s.p_double_coin;
  }
  return acc;
}

}  // namespace

PulseStats simulate_individual(const PhotonDistribution& q, double t_B,
                               double eta_det) {
  return mix(q, &simulate_individual_fock, t_B, eta_det);
}
PulseStats simulate_double(const PhotonDistribution& p, double t_B,
                           double eta_det) {
  return mix(p, &simulate_double_fock, t_B, eta_det);
}
PulseStats closed_individual(const PhotonDistribution& q, double t_B,
                             double eta_det) {
  return mix(q, &closed_individual_fock, t_B, eta_det);
}
PulseStats closed_double(const PhotonDistribution& p, double t_B,
                         double eta_det) {
  return mix(p, &closed_double_fock, t_B, eta_det);
}

}  // namespace cowlab
