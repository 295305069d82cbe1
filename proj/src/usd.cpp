#include "cowlab/usd.hpp"

#include <cmath>
#include <stdexcept>

#include "cowlab/optim.hpp"

namespace cowlab {

namespace {

double one_minus_exp(double x) { return -std::expm1(-x); }

void check_mu(double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("usd: mu must be > 0");
}

UsdSolution with_posteriors(double q_s, double q_d, double q_v, double f,
                            double f_d, double f_v) {
  UsdSolution u;
  u.q_s = q_s;
  u.q_s_d = q_d;
  u.q_s_v = q_v;
  u.p_c = (1.0 - f) * q_s + f_d * q_d + f_v * q_v;
  if (u.p_c > 0.0) {
    const double key = (1.0 - f) * q_s / (2.0 * u.p_c);
    u.p_given_c = {key, key, f_d * q_d / u.p_c, f_v * q_v / u.p_c};
  }
  return u;
}

}  // namespace

StateVectors4 build_four_state_vectors(double mu) {
  check_mu(mu);
  const double em = std::exp(-mu);
  const double emh = std::exp(-mu / 2.0);
  const double s = one_minus_exp(mu);              // 1 - e^-mu
  const double r = std::sqrt(one_minus_exp(2.0 * mu));  // sqrt(1 - e^-2mu)
  StateVectors4 v;
  v.columns.setZero();
  // Gram-Schmidt coordinates: |phi_0> spans the first axis, each later state
  // adds one dimension. s/r = sqrt((1-e^-mu)/(1+e^-mu)) keeps columns unit.
  v.columns.col(0) << 1.0, 0.0, 0.0, 0.0;
  v.columns.col(1) << em, r, 0.0, 0.0;
  v.columns.col(2) << emh, emh * s / r, s / r, 0.0;
  v.columns.col(3) << emh, emh * s / r, -em * s / r, s;
  return v;
}

UsdSolution three_state_usd(double mu, double f) {
  check_mu(mu);
  if (!(f > 0.0 && f < 1.0))
    throw std::invalid_argument("three_state_usd: f must lie in (0,1)");
  const double threshold = std::sqrt(f / (2.0 * (1.0 - f)));
  if (threshold <= std::exp(-mu / 2.0)) {
    const double q_s = one_minus_exp(mu);
    UsdSolution u = with_posteriors(q_s, 0.0, 0.0, f, f, 0.0);
    u.p_given_c = {0.5, 0.5, 0.0, 0.0};  // exact in this regime
    return u;
  }
  return tunable_usd(mu, f, f);
}

UsdSolution tunable_usd(double mu, double f, double zeta) {
  check_mu(mu);
  if (!(f > 0.0 && f < 1.0))
    throw std::invalid_argument("tunable_usd: f must lie in (0,1)");
  if (!(zeta >= f && zeta <= 1.0))
    throw std::invalid_argument("tunable_usd: zeta must lie in [f, 1]");

  const double emh = std::exp(-mu / 2.0);
  double q_s = 0.0, q_d = 0.0;
  if (zeta == 1.0) {
    // xi diverges: only the decoy-conclusive branch survives.
    q_s = 0.0;
    q_d = std::tanh(mu / 2.0);
  } else {
    const double xi = zeta / (2.0 * (1.0 - zeta));
    const double rxi = std::sqrt(xi);
    if (rxi <= emh) {
      q_s = one_minus_exp(mu);
      q_d = 0.0;
    } else if (std::cosh(mu / 2.0) >= rxi) {
      q_s = 1.0 + std::exp(-mu) - 2.0 * rxi * emh;
      q_d = 1.0 - emh / rxi;
    } else {
      q_s = 0.0;
      q_d = std::tanh(mu / 2.0);
    }
  }
  return with_posteriors(q_s, q_d, 0.0, f, f, 0.0);
}

std::vector<Eigen::MatrixXcd> gell_mann_basis(int n) {
  if (n < 2) throw std::invalid_argument("gell_mann_basis: n must be >= 2");
  using Mc = Eigen::MatrixXcd;
  std::vector<Mc> basis;
  basis.reserve(static_cast<size_t>(n) * n);
  basis.push_back(Mc::Identity(n, n));
  const double w = std::sqrt(n / 2.0);
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) {
      Mc m = Mc::Zero(n, n);
      m(p, q) = m(q, p) = w;
      basis.push_back(m);
    }
  const std::complex<double> iw(0.0, std::sqrt(n / 2.0));
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) {
      Mc m = Mc::Zero(n, n);
      m(p, q) = -iw;
      m(q, p) = iw;
      basis.push_back(m);
    }
  for (int d = 1; d < n; ++d) {
    // diag(1,...,1,-d,0,...,0) scaled so the trace of the square is n;
    // the combinatorial factor is C(d+1, 2) = d(d+1)/2.
    const double scale = std::sqrt(n / (2.0 * (d * (d + 1) / 2.0)));
    Mc m = Mc::Zero(n, n);
    for (int i = 0; i < d; ++i) m(i, i) = scale;
    m(d, d) = -scale * d;
    basis.push_back(m);
  }
  return basis;
}

UsdSolution four_state_usd(double mu, double f_d, double f_v,
                           FourStateUsdReport* report) {
  check_mu(mu);
  if (!(f_d >= 0.0) || !(f_v >= 0.0))
    throw std::invalid_argument("four_state_usd: fractions must be >= 0");
  const double f = f_d + f_v;
  if (!(f > 0.0 && f < 1.0))
    throw std::invalid_argument("four_state_usd: f_d + f_v must lie in (0,1)");

  const Eigen::Matrix4d phi = build_four_state_vectors(mu).columns;
  std::array<Eigen::Matrix4d, 4> rho;
  for (int i = 0; i < 4; ++i)
    rho[i] = phi.col(i) * phi.col(i).transpose();

  // Five PSD blocks: E_0, E_1 (key), E_2 (double pulse), E_3 (vacuum),
  // E_4 (inconclusive). The optimum can be taken real symmetric because the
  // states are real: conjugating any feasible POVM preserves feasibility and
  // the objective, and averaging the two is feasible by convexity.
  SdpProblem sdp;
  sdp.block_sizes = {4, 4, 4, 4, 4};
  const Eigen::Matrix4d zero = Eigen::Matrix4d::Zero();
  sdp.objective = {((1.0 - f) / 2.0) * rho[0], ((1.0 - f) / 2.0) * rho[1],
                   f_d * rho[2], f_v * rho[3], zero};

  std::vector<double> rhs;
  // Completeness sum_j E_j = I, upper triangle.
  for (int p = 0; p < 4; ++p)
    for (int q = p; q < 4; ++q) {
      Eigen::Matrix4d u = zero;
      if (p == q) {
        u(p, p) = 1.0;
      } else {
        u(p, q) = u(q, p) = 0.5;
      }
      sdp.constraints.push_back({u, u, u, u, u});
      rhs.push_back(p == q ? 1.0 : 0.0);
    }
  // Zero-error: <phi_i| E_j |phi_i> = 0 for all i != j among the four
  // conclusive elements.
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i == j) continue;
      std::vector<Eigen::MatrixXd> row(5, zero);
      row[j] = rho[i];
      sdp.constraints.push_back(std::move(row));
      rhs.push_back(0.0);
    }
  // Key-state symmetry p(0|0) = p(1|1).
  {
    std::vector<Eigen::MatrixXd> row(5, zero);
    row[0] = rho[0];
    row[1] = -rho[1];
    sdp.constraints.push_back(std::move(row));
    rhs.push_back(0.0);
  }
  sdp.rhs = Eigen::Map<Eigen::VectorXd>(rhs.data(), rhs.size());

  const SdpSolution sol = solve_sdp(sdp);
  if (!sol.converged)
    throw std::runtime_error("four_state_usd: interior-point solve stalled");

  const double q0 = (rho[0].array() * sol.x_blocks[0].array()).sum();
  const double q1 = (rho[1].array() * sol.x_blocks[1].array()).sum();
  const double q_s = 0.5 * (q0 + q1);
  const double q_d = (rho[2].array() * sol.x_blocks[2].array()).sum();
  const double q_v = (rho[3].array() * sol.x_blocks[3].array()).sum();
  UsdSolution u = with_posteriors(q_s, q_d, q_v, f, f_d, f_v);

  if (report != nullptr) {
    report->sdp_relative_gap = sol.relative_gap;
    report->objective = sol.primal_objective;
    double min_eig = 0.0;
    Eigen::Matrix4d total = zero;
    double max_cross = 0.0;
    for (int j = 0; j < 5; ++j) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sol.x_blocks[j]);
      min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
      total += sol.x_blocks[j];
      if (j < 4)
        for (int i = 0; i < 4; ++i)
          if (i != j)
            max_cross = std::max(
                max_cross,
                std::abs((rho[i].array() * sol.x_blocks[j].array()).sum()));
    }
    report->povm_min_eigenvalue = min_eig;
    report->completeness_residual =
        (total - Eigen::Matrix4d::Identity()).norm();
    report->max_cross_probability = max_cross;
    const auto basis = gell_mann_basis(4);
    for (int j = 0; j < 5; ++j)
      for (int k = 0; k < 16; ++k) {
        const std::complex<double> tr =
            (basis[k].adjoint().array() *
             sol.x_blocks[j].cast<std::complex<double>>().array())
                .sum();
        report->e_coefficients(j, k) = tr.real() / 4.0;
      }
  }
  return u;
}

}  // namespace cowlab
