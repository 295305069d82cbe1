// Unambiguous state discrimination (USD) of the signal ensembles an
// eavesdropper faces on the line: the measurement either identifies the
// signal with certainty or returns an inconclusive flag, and the attack
// calculus consumes the conclusive probabilities and posteriors.
//
// Three analytic solvers cover the three-signal ensemble (closed forms,
// including a tunable family that trades key-state for decoy-state
// conclusiveness), and a semidefinite program covers the four-signal
// ensemble, whose zero-error constraints admit no closed form.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <vector>

namespace cowlab {

struct UsdSolution {
  double q_s = 0.0;    // conclusive probability on either key signal
  double q_s_d = 0.0;  // conclusive probability on the double-pulse signal
  double q_s_v = 0.0;  // conclusive probability on the vacuum signal
  double p_c = 0.0;    // prior-weighted conclusive probability
  // Posterior over the signal identity given a conclusive outcome, indexed
  // (key 0, key 1, double pulse, vacuum); the two key entries are equal.
  std::array<double, 4> p_given_c = {0.0, 0.0, 0.0, 0.0};
};

// Real coordinates of the four signal states in the orthonormal basis spanned
// by them: column j holds |phi_j> for j = key 0, key 1, double pulse, vacuum.
// Unit columns whose pairwise inner products reproduce the coherent-state
// overlaps (exp(-mu/2) between any two signals sharing one empty pulse slot,
// exp(-mu) otherwise).
struct StateVectors4 {
  Eigen::Matrix4d columns;
};

StateVectors4 build_four_state_vectors(double mu);

// Optimal USD of the three-signal ensemble with decoy fraction f. In the
// regime sqrt(f / (2(1-f))) <= exp(-mu/2) the decoy never yields conclusive
// outcomes: q_s = 1 - exp(-mu), p_c = (1-f) q_s, and the posterior splits
// evenly between the two key signals. Outside it, the measurement is the
// tunable optimum at zeta = f.
UsdSolution three_state_usd(double mu, double f);

// Tunable three-signal USD: maximize (1-zeta) q_s + zeta q_d over zero-error
// measurements, for zeta in [f, 1]. Larger zeta sacrifices key-state
// conclusiveness for decoy-state conclusiveness; the solution is piecewise
// analytic in xi = zeta / (2(1-zeta)) with three branches, continuous at both
// branch boundaries. Reported p_c and posteriors use the protocol priors
// ((1-f)/2, (1-f)/2, f) regardless of zeta.
UsdSolution tunable_usd(double mu, double f, double zeta);

// Orthogonal Hermitian basis of n x n matrices: identity first, then the
// symmetric pair matrices (p<q lexicographic), the antisymmetric pair
// matrices (same order), and the diagonal matrices d = 1..n-1. Normalized so
// Tr(s_k s_l) = n * delta_kl and Tr(s_k) = n * delta_k0.
std::vector<Eigen::MatrixXcd> gell_mann_basis(int n);

// Numerical certificates accompanying the four-signal USD solution.
struct FourStateUsdReport {
  double povm_min_eigenvalue = 0.0;   // smallest eigenvalue over all elements
  double completeness_residual = 0.0; // Frobenius norm of sum(E_j) - I
  double max_cross_probability = 0.0; // largest |<phi_i|E_j|phi_i>|, i != j
  double sdp_relative_gap = 0.0;
  double objective = 0.0;             // value of the semidefinite program
  // Coefficients of each POVM element in the orthogonal basis above:
  // e(j, k) = Tr(E_j s_k) / 4 for the five elements (four conclusive plus
  // the inconclusive one). Antisymmetric coefficients vanish because the
  // optimum can be taken real symmetric.
  Eigen::Matrix<double, 5, 16> e_coefficients;
};

// Zero-error USD of the four-signal ensemble by semidefinite programming:
// maximize (1-f_d-f_v) p(0|0) + f_d p(2|2) + f_v p(3|3) over POVMs
// (E_0..E_3, E_inc) with sum E = I, E_j >= 0, zero cross probabilities, and
// p(0|0) = p(1|1). Note the zero-error constraints are prior independent, so
// the conclusive probabilities do NOT approach the three-signal values as
// f_v -> 0: every conclusive element must also annihilate the vacuum signal,
// which caps q_s near (1 - exp(-mu))^2 instead of 1 - exp(-mu).
UsdSolution four_state_usd(double mu, double f_d, double f_v,
                           FourStateUsdReport* report = nullptr);

}  // namespace cowlab
