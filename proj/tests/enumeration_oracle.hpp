// Exhaustive reference model of what an intercepting measurement resends to
// the receiver from one inter-click block, used as an independent oracle for
// the closed-form per-block click counts in the attack module.
//
// A block of length k holds the k conclusively identified signals between two
// consecutive inconclusive outcomes. Signal identities per position:
//   0 = key signal with an occupied first pulse and empty second pulse,
//   1 = key signal with an empty first pulse and occupied second pulse,
//   2 = double-pulse (decoy) signal, both pulses occupied,
//   3 = vacuum signal, both pulses empty.
//
// Edge trimming: the attacker only resends a sub-block whose outer boundary
// is guaranteed empty, so that no coincidence can form across the
// inconclusive neighbours. Scanning from the front, a leading signal whose
// first pulse is occupied (identity 0) is replaced by vacuum and scanning
// stops; identity 1 or 3 is kept and scanning stops; a decoy is replaced by
// vacuum and scanning continues inward. The back scan mirrors this over the
// not-yet-stripped positions: identity 1 (occupied second pulse) is stripped,
// 0 or 3 is kept, decoys are stripped and the scan continues inward. Every
// position the scans never decided is resent unchanged.
//
// Tallies over the resent positions:
//   clicks        - resent signals that produce a detector click (0, 1, 2),
//   decoy_clicks  - resent double-pulse signals,
//   n_double      - adjacent resent pairs (1 at i, 0 at i+1): these form an
//                   unmodified double pulse straddling the bit boundary,
//   n_individual  - resent key signals not absorbed into such a pair.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace block_oracle {

inline std::vector<bool> surviving(const std::vector<int>& s) {
  const int k = static_cast<int>(s.size());
  constexpr int undecided = 0, kept = 1, stripped = 2;
  std::vector<int> state(k, undecided);
  for (int i = 0; i < k; ++i) {  // front scan
    if (s[i] == 2) {
      state[i] = stripped;
      continue;
    }
    state[i] = (s[i] == 0) ? stripped : kept;
    break;
  }
  for (int i = k - 1; i >= 0; --i) {  // back scan
    if (state[i] == stripped) continue;
    if (s[i] == 2) {
      state[i] = stripped;
      continue;
    }
    state[i] = (s[i] == 1) ? stripped : kept;
    break;
  }
  std::vector<bool> out(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) out[static_cast<std::size_t>(i)] = state[i] != stripped;
  return out;
}

struct Tally {
  double clicks = 0.0;
  double decoy_clicks = 0.0;
  double n_individual = 0.0;
  double n_double = 0.0;
};

inline Tally tally_sequence(const std::vector<int>& s) {
  const std::vector<bool> keep = surviving(s);
  const int k = static_cast<int>(s.size());
  Tally t;
  double key_kept = 0.0;
  for (int i = 0; i < k; ++i) {
    if (!keep[static_cast<std::size_t>(i)]) continue;
    if (s[i] != 3) t.clicks += 1.0;
    if (s[i] == 2) t.decoy_clicks += 1.0;
    if (s[i] == 0 || s[i] == 1) key_kept += 1.0;
  }
  for (int i = 0; i + 1 < k; ++i) {
    if (keep[static_cast<std::size_t>(i)] && keep[static_cast<std::size_t>(i + 1)] &&
        s[i] == 1 && s[i + 1] == 0) {
      t.n_double += 1.0;
    }
  }
  t.n_individual = key_kept - 2.0 * t.n_double;
  return t;
}

// Expected tallies over all identity sequences of length k, each free
// position drawn independently with probabilities p[0..3]. Position 0 and/or
// position k-1 can be pinned to a fixed identity (pass -1 to leave free);
// pinned positions carry weight 1. The free weights sum to 1, so the result
// needs no normalization.
inline Tally average(int k, const std::array<double, 4>& p, int first = -1,
                     int last = -1) {
  std::vector<int> s(static_cast<std::size_t>(k), 0);
  Tally acc;
  for (;;) {
    bool admissible = true;
    double w = 1.0;
    for (int i = 0; i < k; ++i) {
      const int id = s[static_cast<std::size_t>(i)];
      if (i == 0 && first >= 0) {
        if (id != first) {
          admissible = false;
          break;
        }
      } else if (i == k - 1 && last >= 0) {
        if (id != last) {
          admissible = false;
          break;
        }
      } else {
        w *= p[static_cast<std::size_t>(id)];
      }
    }
    if (admissible && w > 0.0) {
      const Tally t = tally_sequence(s);
      acc.clicks += w * t.clicks;
      acc.decoy_clicks += w * t.decoy_clicks;
      acc.n_individual += w * t.n_individual;
      acc.n_double += w * t.n_double;
    }
    int i = 0;  // odometer increment over base-4 digits
    while (i < k) {
      if (++s[static_cast<std::size_t>(i)] < 4) break;
      s[static_cast<std::size_t>(i)] = 0;
      ++i;
    }
    if (i == k) break;
  }
  return acc;
}

}  // namespace block_oracle
