#include "cowlab/optim.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

// Primal-dual interior-point method for block-diagonal SDPs in the
// Nesterov-Todd family with a Mehrotra predictor-corrector. The solver works
// on the internal standard form
//     (P) min <C,X>  s.t. <A_i,X> = b_i, X >= 0
//     (D) max b.y    s.t. S = C - sum_i y_i A_i >= 0
// and flips signs so the public interface maximizes. The NT direction obeys
//     dX + W dS W = K,   A(dX) = b - A(X),   dS = Rd - sum_i dy_i A_i,
// where W S W = X defines the scaling point W; eliminating dX and dS gives a
// symmetric positive definite m x m Schur system in dy. Constraint rows are
// orthonormalized (QR) up front, which keeps that Schur complement well
// conditioned without changing the reported duals.
namespace cowlab {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Blocks = std::vector<Mat>;

double block_inner(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k)
    s += (a[k].array() * b[k].array()).sum();
  return s;
}

double block_norm(const Blocks& a) { return std::sqrt(block_inner(a, a)); }

Blocks block_like(const Blocks& a) {
  Blocks r;
  r.reserve(a.size());
  for (const auto& m : a) r.push_back(Mat::Zero(m.rows(), m.cols()));
  return r;
}

// Symmetric square root and inverse square root via eigendecomposition.
Mat sym_pow(const Mat& m, double exponent) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  Vec d = es.eigenvalues();
  for (int i = 0; i < d.size(); ++i)
    d[i] = std::pow(std::max(d[i], 1e-300), exponent);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

// Largest step a in [0, 1] keeping P + a*D positive semidefinite (with a
// small margin handled by the caller). P is positive definite up to rounding;
// a numerically semidefinite P is clamped to a tiny definite floor so a
// boundary iterate cannot freeze the step length at zero for good.
double max_step(const Mat& p, const Mat& d) {
  Eigen::LLT<Mat> llt(p);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Mat> es(p);
    const double top = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    const Vec clamped = es.eigenvalues().cwiseMax(1e-14 * top);
    llt.compute(es.eigenvectors() * clamped.asDiagonal() *
                es.eigenvectors().transpose());
    if (llt.info() != Eigen::Success) return 0.0;
  }
  const Mat l = llt.matrixL();
  const Mat inner = l.triangularView<Eigen::Lower>().solve(
      l.triangularView<Eigen::Lower>().solve(d).transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (inner + inner.transpose()));
  const double lambda_min = es.eigenvalues().minCoeff();
  if (lambda_min >= 0.0) return 1.0;
  return std::min(1.0, -1.0 / lambda_min);
}

struct Metrics {
  double mu = 0.0, gap_rel = 0.0, res_p = 0.0, res_d = 0.0;
  double score() const { return std::max({gap_rel, res_p, res_d}); }
};

}  // namespace

SdpSolution solve_sdp(const SdpProblem& problem) {
  const int nblocks = static_cast<int>(problem.block_sizes.size());
  const int m = static_cast<int>(problem.rhs.size());
  if (nblocks == 0) throw std::invalid_argument("solve_sdp: no blocks");
  if (m == 0) throw std::invalid_argument("solve_sdp: no constraints");
  if (static_cast<int>(problem.objective.size()) != nblocks ||
      static_cast<int>(problem.constraints.size()) != m)
    throw std::invalid_argument("solve_sdp: coefficient counts disagree");

  int total_dim = 0;
  int svec_dim = 0;
  for (int s : problem.block_sizes) {
    if (s <= 0) throw std::invalid_argument("solve_sdp: bad block size");
    total_dim += s;
    svec_dim += s * (s + 1) / 2;
  }

  // ---- Facial-reduction presolve ------------------------------------------
  // An equality row <A, X> = 0 whose coefficient blocks are all positive
  // semidefinite forces every feasible X onto the common kernel of those
  // coefficients: each per-block term of the inner product is nonnegative, so
  // all of them must vanish.  Problems built from zero-error discrimination
  // constraints consist almost entirely of such rows, and the face they cut
  // out has no relative interior in the original coordinates — the central
  // path does not exist there and the dual optimum need not be attained, so
  // no amount of iterating can certify a tight gap.  Restricting each block
  // to the face (X_k = B_k X~_k B_k^T with B_k an orthonormal kernel basis)
  // yields an equivalent problem that does have strictly feasible points on
  // both sides.  The forcing rows hold identically on the face and are
  // dropped; their reported multipliers are zero, which leaves the dual
  // objective unchanged because their right-hand sides are zero.
  {
    auto sym_part = [](const Mat& a) { return Mat(0.5 * (a + a.transpose())); };
    std::vector<char> forcing(static_cast<size_t>(m), 0);
    // Per block, the stacked square-root factors of every forcing row's
    // coefficient.  The face is the common kernel of the coefficients, i.e.
    // the null space of the stacked factors; working with factors instead of
    // the summed coefficients keeps the rank decision well conditioned (the
    // relevant singular values scale with the state amplitudes rather than
    // their squares).
    std::vector<std::vector<Vec>> factors(static_cast<size_t>(nblocks));
    bool any_forcing = false;
    for (int i = 0; i < m; ++i) {
      if (problem.rhs[i] != 0.0) continue;
      if (static_cast<int>(problem.constraints[i].size()) != nblocks) continue;
      bool all_psd = true;
      bool nonzero = false;
      std::vector<std::vector<Vec>> row_factors(static_cast<size_t>(nblocks));
      for (int k = 0; k < nblocks && all_psd; ++k) {
        const Mat a = sym_part(problem.constraints[i][k]);
        if (a.rows() != problem.block_sizes[k] || a.cols() != problem.block_sizes[k]) {
          all_psd = false;
          break;
        }
        const double scale = a.cwiseAbs().maxCoeff();
        if (scale == 0.0) continue;
        nonzero = true;
        Eigen::SelfAdjointEigenSolver<Mat> es(a);
        if (es.info() != Eigen::Success ||
            es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, scale)) {
          all_psd = false;
          break;
        }
        const double lam_top = es.eigenvalues().maxCoeff();
        for (int j = 0; j < a.rows(); ++j) {
          const double lam = es.eigenvalues()(j);
          if (lam > 1e-12 * lam_top)
            row_factors[k].push_back(Vec(std::sqrt(lam) * es.eigenvectors().col(j)));
        }
      }
      if (all_psd && nonzero) {
        forcing[i] = 1;
        any_forcing = true;
        for (int k = 0; k < nblocks; ++k)
          for (Vec& f : row_factors[k]) factors[k].push_back(std::move(f));
      }
    }
    if (any_forcing) {
      std::vector<Mat> face_basis(static_cast<size_t>(nblocks));
      bool reduces = false;
      for (int k = 0; k < nblocks; ++k) {
        const int s = problem.block_sizes[k];
        const int nf = static_cast<int>(factors[k].size());
        if (nf == 0) {
          face_basis[k] = Mat::Identity(s, s);
          continue;
        }
        Mat f(s, nf);
        for (int j = 0; j < nf; ++j) f.col(j) = factors[k][j];
        Eigen::JacobiSVD<Mat> svd(f, Eigen::ComputeFullU);
        const double sv_top = svd.singularValues()(0);
        int rank = 0;
        while (rank < std::min(s, nf) &&
               svd.singularValues()(rank) > 1e-10 * std::max(1.0, sv_top))
          ++rank;
        if (rank == s)
          throw std::runtime_error(
              "solve_sdp: zero rows force an entire block to vanish");
        face_basis[k] = svd.matrixU().rightCols(s - rank);
        if (rank > 0) reduces = true;
      }
      if (reduces) {
        SdpProblem red;
        red.block_sizes.resize(static_cast<size_t>(nblocks));
        red.objective.resize(static_cast<size_t>(nblocks));
        for (int k = 0; k < nblocks; ++k) {
          const Mat& B = face_basis[k];
          red.block_sizes[k] = static_cast<int>(B.cols());
          red.objective[k] = Mat(B.transpose() * sym_part(problem.objective[k]) * B);
        }
        std::vector<double> red_rhs;
        for (int i = 0; i < m; ++i) {
          if (forcing[i]) continue;
          std::vector<Mat> row(static_cast<size_t>(nblocks));
          for (int k = 0; k < nblocks; ++k) {
            const Mat& B = face_basis[k];
            row[k] = Mat(B.transpose() * sym_part(problem.constraints[i][k]) * B);
          }
          red.constraints.push_back(std::move(row));
          red_rhs.push_back(problem.rhs(i));
        }
        red.rhs = Eigen::Map<const Vec>(red_rhs.data(),
                                        static_cast<Eigen::Index>(red_rhs.size()));
        SdpSolution inner = solve_sdp(red);
        SdpSolution out;
        out.converged = inner.converged;
        out.iterations = inner.iterations;
        out.primal_objective = inner.primal_objective;
        out.dual_objective = inner.dual_objective;
        out.relative_gap = inner.relative_gap;
        out.primal_residual = inner.primal_residual;
        out.dual_residual = inner.dual_residual;
        out.x_blocks.resize(static_cast<size_t>(nblocks));
        out.s_blocks.resize(static_cast<size_t>(nblocks));
        for (int k = 0; k < nblocks; ++k) {
          const Mat& B = face_basis[k];
          out.x_blocks[k] = Mat(B * inner.x_blocks[k] * B.transpose());
          out.s_blocks[k] = Mat(B * inner.s_blocks[k] * B.transpose());
        }
        out.y = Vec::Zero(m);
        int kept = 0;
        for (int i = 0; i < m; ++i)
          if (!forcing[i]) out.y(i) = inner.y(kept++);
        return out;
      }
    }
  }

  // Validate symmetry to the contracted tolerance, then symmetrize exactly.
  // The internal objective is negated so the loop below can minimize.
  auto take_symmetric = [&](const Mat& a, int blk) {
    const int s = problem.block_sizes[blk];
    if (a.rows() != s || a.cols() != s)
      throw std::invalid_argument("solve_sdp: block dimension mismatch");
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if (((a - a.transpose()).cwiseAbs().maxCoeff()) > 1e-14 * scale)
      throw std::invalid_argument("solve_sdp: coefficient matrix not symmetric");
    return Mat(0.5 * (a + a.transpose()));
  };
  Blocks c;
  for (int k = 0; k < nblocks; ++k)
    c.push_back(-take_symmetric(problem.objective[k], k));
  std::vector<Blocks> a(m);
  for (int i = 0; i < m; ++i) {
    if (static_cast<int>(problem.constraints[i].size()) != nblocks)
      throw std::invalid_argument("solve_sdp: constraint block count");
    for (int k = 0; k < nblocks; ++k)
      a[i].push_back(take_symmetric(problem.constraints[i][k], k));
  }
  Vec b = problem.rhs;

  // Orthonormalize the constraint rows in svec coordinates: stack the rows'
  // isometric vectorizations, thin-QR the transpose, and replace the system
  // by (Q1^T, T^-T b). Duals transform back as y_orig = T^-1 y_new.
  Mat rows(m, svec_dim);
  auto svec_into = [&](const Blocks& blocks, auto&& out) {
    const double rt2 = std::sqrt(2.0);
    int col = 0;
    for (int k = 0; k < nblocks; ++k) {
      const int s = problem.block_sizes[k];
      for (int p = 0; p < s; ++p)
        for (int q = p; q < s; ++q)
          out[col++] = (p == q) ? blocks[k](p, q) : rt2 * blocks[k](p, q);
    }
  };
  for (int i = 0; i < m; ++i) svec_into(a[i], rows.row(i));
  Eigen::HouseholderQR<Mat> qr(rows.transpose());
  const Mat t_factor =
      qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  for (int i = 0; i < m; ++i)
    if (std::abs(t_factor(i, i)) < 1e-12 * (1.0 + rows.cwiseAbs().maxCoeff()))
      throw std::invalid_argument("solve_sdp: dependent constraint rows");
  const Mat q_thin = Mat(qr.householderQ()).leftCols(m);
  {
    // Rebuild each constraint from the orthonormal columns of Q.
    const Vec new_b =
        t_factor.transpose().triangularView<Eigen::Lower>().solve(b);
    for (int i = 0; i < m; ++i) {
      int col = 0;
      const double inv_rt2 = 1.0 / std::sqrt(2.0);
      for (int k = 0; k < nblocks; ++k) {
        const int s = problem.block_sizes[k];
        for (int p = 0; p < s; ++p)
          for (int q = p; q < s; ++q) {
            const double v = q_thin(col++, i);
            a[i][k](p, q) = a[i][k](q, p) = (p == q) ? v : v * inv_rt2;
          }
      }
    }
    b = new_b;
  }
  // After orthonormalization the constraint rows in svec coordinates are
  // exactly the thin-Q columns.
  const Mat asvec = q_thin.transpose();
  auto unsvec_all = [&](const Vec& v) {
    Blocks out = block_like(c);
    const double inv_rt2 = 1.0 / std::sqrt(2.0);
    int col = 0;
    for (int k = 0; k < nblocks; ++k) {
      const int sdim = problem.block_sizes[k];
      for (int p = 0; p < sdim; ++p)
        for (int q = p; q < sdim; ++q) {
          const double val = v[col++];
          if (p == q)
            out[k](p, p) = val;
          else
            out[k](p, q) = out[k](q, p) = val * inv_rt2;
        }
    }
    return out;
  };

  // Homogeneous self-dual embedding: seek (X, y, S, tau, kappa) with
  //     A x                 = b tau
  //     A^T y + s           = c tau
  //     b.y - <c,x> - kappa = 0
  //     X, S >= 0, tau, kappa >= 0, and X S -> 0, tau kappa -> 0.
  // A solution with tau > 0 recovers the optimal pair (X, y, S)/tau. The
  // embedded system always has a strictly interior starting point, which is
  // what makes it dependable here: zero-probability equality rows force every
  // feasible conclusive block to be singular, so the plain primal problem has
  // an empty interior and no central path of its own.
  Blocks x, s;
  for (int k = 0; k < nblocks; ++k) {
    x.push_back(Mat::Identity(problem.block_sizes[k], problem.block_sizes[k]));
    s.push_back(Mat::Identity(problem.block_sizes[k], problem.block_sizes[k]));
  }
  Vec y = Vec::Zero(m);
  double tau = 1.0;
  double kappa = 1.0;

  const double b_scale = 1.0 + b.cwiseAbs().maxCoeff();
  const double c_scale = 1.0 + block_norm(c);
  Vec c_svec(svec_dim);
  svec_into(c, c_svec);

  // Convergence is judged on the de-homogenized iterate (divide by tau).
  auto measure = [&](const Blocks& xx, const Blocks& ss, const Vec& yy,
                     double tt) {
    Metrics mm;
    mm.mu = block_inner(xx, ss) / (tt * tt) / total_dim;
    const double pobj = block_inner(c, xx) / tt;
    const double dobj = b.dot(yy) / tt;
    mm.gap_rel = std::abs(block_inner(xx, ss)) / (tt * tt) /
                 (1.0 + std::abs(pobj) + std::abs(dobj));
    Vec rp = b;
    for (int i = 0; i < m; ++i) rp[i] -= block_inner(a[i], xx) / tt;
    mm.res_p = rp.cwiseAbs().maxCoeff() / b_scale;
    Blocks rd = block_like(c);
    for (int k = 0; k < nblocks; ++k) {
      rd[k] = c[k] - ss[k] / tt;
      for (int i = 0; i < m; ++i) rd[k] -= (yy[i] / tt) * a[i][k];
    }
    mm.res_d = block_norm(rd) / c_scale;
    return mm;
  };

  SdpSolution out;
  Blocks best_x = x, best_s = s;
  Vec best_y = y;
  double best_tau = tau;
  double best_score = measure(x, s, y, tau).score();

  const double tol = 1e-11;
  const int max_iter = 100;
  const bool trace = std::getenv("COWLAB_SDP_TRACE") != nullptr;
  int iter = 0;
  int since_improvement = 0;
  for (; iter < max_iter; ++iter) {
    const Metrics mm = measure(x, s, y, tau);
    if (trace)
      std::fprintf(stderr,
                   "it %3d  mu %.3e  gap %.3e  rp %.3e  rd %.3e  tau %.3e\n",
                   iter, mm.mu, mm.gap_rel, mm.res_p, mm.res_d, tau);
    if (mm.score() < 0.9 * best_score) {
      since_improvement = 0;
    } else if (++since_improvement > 12) {
      break;  // stalled: return the best iterate seen
    }
    if (mm.score() < best_score) {
      best_score = mm.score();
      best_x = x;
      best_s = s;
      best_y = y;
      best_tau = tau;
    }
    if (mm.gap_rel <= tol && mm.res_p <= tol && mm.res_d <= tol) break;
    if (!(tau > 1e-12 * kappa)) {
      if (trace) std::fprintf(stderr, "  exit: tau collapsed\n");
      break;
    }

    // Residuals of the homogeneous system and its complementarity measure.
    Vec rp_h = b * tau;
    for (int i = 0; i < m; ++i) rp_h[i] -= block_inner(a[i], x);
    Blocks rd_h = block_like(c);
    for (int k = 0; k < nblocks; ++k) {
      rd_h[k] = c[k] * tau - s[k];
      for (int i = 0; i < m; ++i) rd_h[k] -= y[i] * a[i][k];
    }
    const double rg_h = kappa + block_inner(c, x) - b.dot(y);
    const double mu_h =
        (block_inner(x, s) + tau * kappa) / (total_dim + 1);

    // Nesterov-Todd scaling point per block, its square roots, and the
    // scaled iterate V whose eigenbasis diagonalizes the corrector's
    // Lyapunov system.
    Blocks w = block_like(x);
    Blocks w_half = block_like(x), w_ihalf = block_like(x);
    std::vector<Mat> v_basis(static_cast<std::size_t>(nblocks));
    std::vector<Vec> v_eigs(static_cast<std::size_t>(nblocks));
    bool scaling_ok = true;
    for (int k = 0; k < nblocks; ++k) {
      const Mat xh = sym_pow(x[k], 0.5);
      const Mat mid = sym_pow(xh * s[k] * xh, -0.5);
      w[k] = xh * mid * xh;
      w[k] = 0.5 * (w[k] + w[k].transpose());
      Eigen::SelfAdjointEigenSolver<Mat> ew(w[k]);
      if (ew.info() != Eigen::Success) {
        scaling_ok = false;
        break;
      }
      const double wtop =
          std::max(ew.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
      const Vec lam = ew.eigenvalues().cwiseMax(1e-150 * wtop);
      w_half[k] = ew.eigenvectors() * lam.cwiseSqrt().asDiagonal() *
                  ew.eigenvectors().transpose();
      w_ihalf[k] = ew.eigenvectors() *
                   lam.cwiseSqrt().cwiseInverse().asDiagonal() *
                   ew.eigenvectors().transpose();
      Mat v = w_ihalf[k] * x[k] * w_ihalf[k];
      v = 0.5 * (v + v.transpose());
      Eigen::SelfAdjointEigenSolver<Mat> ev(v);
      if (ev.info() != Eigen::Success) {
        scaling_ok = false;
        break;
      }
      const double vtop =
          std::max(ev.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
      v_basis[static_cast<std::size_t>(k)] = ev.eigenvectors();
      v_eigs[static_cast<std::size_t>(k)] =
          ev.eigenvalues().cwiseMax(1e-150 * vtop);
    }
    if (!scaling_ok) {
      if (trace) std::fprintf(stderr, "  exit: scaling failed\n");
      break;
    }

    // One dense factorization of the embedded KKT system per iteration,
    // unknowns ordered (svec dX, dy, svec dS, dtau, dkappa):
    //     A dx                    - b dtau            = theta * rp_h
    //     A^T dy + ds             - c dtau            = theta * rd_h
    //     -c.dx + b.dy                     - dkappa   = theta * rg_h
    //     dx + G ds                                   = svec(K)
    //     kappa dtau + tau dkappa                     = k_t
    // with G the svec form of Z -> W Z W. At these block sizes a pivoted
    // dense solve with refinement is far more accurate near the boundary
    // than Schur elimination.
    Mat g = Mat::Zero(svec_dim, svec_dim);
    {
      const double rt2 = std::sqrt(2.0);
      int base = 0;
      for (int k = 0; k < nblocks; ++k) {
        const int sdim = problem.block_sizes[k];
        int j = base;
        for (int p = 0; p < sdim; ++p)
          for (int q = p; q < sdim; ++q, ++j) {
            const Mat col =
                (p == q)
                    ? Mat(w[k].col(p) * w[k].col(p).transpose())
                    : Mat((w[k].col(p) * w[k].col(q).transpose() +
                           w[k].col(q) * w[k].col(p).transpose()) /
                          rt2);
            int row = base;
            for (int pp = 0; pp < sdim; ++pp)
              for (int qq = pp; qq < sdim; ++qq, ++row)
                g(row, j) = (pp == qq) ? col(pp, pp) : rt2 * col(pp, qq);
          }
        base += sdim * (sdim + 1) / 2;
      }
    }
    const int idx_dx = 0;
    const int idx_dy = svec_dim;
    const int idx_ds = svec_dim + m;
    const int idx_dt = 2 * svec_dim + m;
    const int idx_dk = 2 * svec_dim + m + 1;
    const int nsys = 2 * svec_dim + m + 2;
    Mat kkt = Mat::Zero(nsys, nsys);
    kkt.block(0, idx_dx, m, svec_dim) = asvec;
    kkt.block(0, idx_dt, m, 1) = -b;
    kkt.block(m, idx_dy, svec_dim, m) = asvec.transpose();
    kkt.block(m, idx_ds, svec_dim, svec_dim).setIdentity();
    kkt.block(m, idx_dt, svec_dim, 1) = -c_svec;
    kkt.block(m + svec_dim, idx_dx, 1, svec_dim) = -c_svec.transpose();
    kkt.block(m + svec_dim, idx_dy, 1, m) = b.transpose();
    kkt(m + svec_dim, idx_dk) = -1.0;
    kkt.block(m + svec_dim + 1, idx_dx, svec_dim, svec_dim).setIdentity();
    kkt.block(m + svec_dim + 1, idx_ds, svec_dim, svec_dim) = g;
    kkt(nsys - 1, idx_dt) = kappa;
    kkt(nsys - 1, idx_dk) = tau;
    // Row equilibration: the complementarity rows carry ||W||^2 and would
    // otherwise dwarf the O(1) feasibility rows in the pivot comparison.
    Vec rscale(nsys);
    for (int i = 0; i < nsys; ++i)
      rscale[i] = 1.0 / std::max(kkt.row(i).cwiseAbs().maxCoeff(), 1e-300);
    const Mat kkt_eq = rscale.asDiagonal() * kkt;
    // Keep every numerically nonzero pivot: with a rank threshold the solver
    // would silently truncate the solve to the estimated rank, and the wide
    // dynamic range of G makes that estimate meaningless here. Direction
    // quality is judged by the residual after refinement instead.
    Eigen::FullPivLU<Mat> kkt_f;
    kkt_f.setThreshold(1e-300);
    kkt_f.compute(kkt_eq);

    Vec rd_svec(svec_dim);
    svec_into(rd_h, rd_svec);
    struct Direction {
      Blocks dx, ds;
      Vec dy;
      double dt = 0.0, dk = 0.0;
    };
    auto solve_direction = [&](double theta, const Blocks& kmat, double k_t,
                               Direction& d) -> bool {
      Vec rhs(nsys);
      rhs.head(m) = theta * rp_h;
      rhs.segment(m, svec_dim) = theta * rd_svec;
      rhs[m + svec_dim] = theta * rg_h;
      Vec k_svec(svec_dim);
      svec_into(kmat, k_svec);
      rhs.segment(m + svec_dim + 1, svec_dim) = k_svec;
      rhs[nsys - 1] = k_t;
      const Vec srhs = rscale.asDiagonal() * rhs;
      Vec sol = kkt_f.solve(srhs);
      for (int pass = 0; pass < 2; ++pass)
        sol += kkt_f.solve(srhs - kkt_eq * sol);
      const double res = (srhs - kkt_eq * sol).cwiseAbs().maxCoeff() /
                         (1.0 + srhs.cwiseAbs().maxCoeff());
      d.dx = unsvec_all(sol.segment(idx_dx, svec_dim));
      d.dy = sol.segment(idx_dy, m);
      d.ds = unsvec_all(sol.segment(idx_ds, svec_dim));
      d.dt = sol[idx_dt];
      d.dk = sol[idx_dk];
      return std::isfinite(res) && res <= 1e-6 && sol.allFinite();
    };

    // The embedding couples primal and dual through tau, so one common step
    // length applies to every variable.
    auto common_step = [&](const Direction& d) {
      double alpha = 1.0;
      for (int k = 0; k < nblocks; ++k) {
        alpha = std::min(alpha, max_step(x[k], d.dx[k]));
        alpha = std::min(alpha, max_step(s[k], d.ds[k]));
      }
      if (d.dt < 0.0) alpha = std::min(alpha, -tau / d.dt);
      if (d.dk < 0.0) alpha = std::min(alpha, -kappa / d.dk);
      return alpha;
    };

    // Predictor: pure affine direction (K = -X, k_t = -tau*kappa).
    Blocks k_aff = block_like(x);
    for (int k = 0; k < nblocks; ++k) k_aff[k] = -x[k];
    Direction aff;
    if (!solve_direction(1.0, k_aff, -tau * kappa, aff)) {
      if (trace) std::fprintf(stderr, "  exit: predictor solve inaccurate\n");
      break;
    }
    const double a_aff = common_step(aff);
    double mu_aff = (tau + a_aff * aff.dt) * (kappa + a_aff * aff.dk);
    for (int k = 0; k < nblocks; ++k)
      mu_aff += ((x[k] + a_aff * aff.dx[k]).array() *
                 (s[k] + a_aff * aff.ds[k]).array())
                    .sum();
    mu_aff = std::max(mu_aff / (total_dim + 1), 0.0);
    const double sigma =
        std::min(1.0, std::max(1e-10, std::pow(mu_aff / mu_h, 3)));

    // Corrector: recenters toward sigma*mu and absorbs the second-order
    // cross term of the affine step, in the scaled space where the
    // complementarity linearization is the Lyapunov system
    //     V A + A V = 2 sigma mu I - 2 V^2 - (Dx Ds + Ds Dx),
    // solved exactly in V's eigenbasis; K = W^1/2 A W^1/2. The residual
    // rows are scaled by (1 - sigma) as usual for the combined step.
    Blocks k_cor = block_like(x);
    for (int k = 0; k < nblocks; ++k) {
      const std::size_t ku = static_cast<std::size_t>(k);
      const int sdim = problem.block_sizes[k];
      Mat dxa = w_ihalf[k] * aff.dx[k] * w_ihalf[k];
      Mat dsa = w_half[k] * aff.ds[k] * w_half[k];
      dxa = 0.5 * (dxa + dxa.transpose());
      dsa = 0.5 * (dsa + dsa.transpose());
      const Mat cross = dxa * dsa + dsa * dxa;
      Mat rt = v_basis[ku].transpose() *
               (2.0 * sigma * mu_h * Mat::Identity(sdim, sdim) - cross) *
               v_basis[ku];
      for (int i = 0; i < sdim; ++i)
        rt(i, i) -= 2.0 * v_eigs[ku][i] * v_eigs[ku][i];
      for (int i = 0; i < sdim; ++i)
        for (int j = 0; j < sdim; ++j)
          rt(i, j) /= v_eigs[ku][i] + v_eigs[ku][j];
      const Mat a_v = v_basis[ku] * rt * v_basis[ku].transpose();
      k_cor[k] = w_half[k] * a_v * w_half[k];
      k_cor[k] = 0.5 * (k_cor[k] + k_cor[k].transpose());
    }
    const double kt_cor = sigma * mu_h - tau * kappa - aff.dt * aff.dk;
    Direction dir;
    if (!solve_direction(1.0 - sigma, k_cor, kt_cor, dir)) {
      if (trace) std::fprintf(stderr, "  exit: corrector solve inaccurate\n");
      break;
    }

    const double alpha = std::min(1.0, 0.98 * common_step(dir));
    if (!std::isfinite(alpha)) {
      if (trace) std::fprintf(stderr, "  exit: non-finite step\n");
      break;
    }
    if (trace)
      std::fprintf(stderr, "  alpha %.3e  sigma %.3e\n", alpha, sigma);

    for (int k = 0; k < nblocks; ++k) {
      x[k] += alpha * dir.dx[k];
      s[k] += alpha * dir.ds[k];
      x[k] = 0.5 * (x[k] + x[k].transpose());
      s[k] = 0.5 * (s[k] + s[k].transpose());
    }
    y += alpha * dir.dy;
    tau += alpha * dir.dt;
    kappa += alpha * dir.dk;
  }

  const Metrics final_mm = measure(x, s, y, tau);
  if (final_mm.score() <= best_score) {
    best_x = x;
    best_s = s;
    best_y = y;
    best_tau = tau;
    best_score = final_mm.score();
  }

  const Metrics bm = measure(best_x, best_s, best_y, best_tau);
  out.iterations = iter;
  out.x_blocks = best_x;
  out.s_blocks = best_s;
  for (auto& blk : out.x_blocks) blk /= best_tau;
  for (auto& blk : out.s_blocks) blk /= best_tau;
  // Undo the row orthonormalization for the reported duals and flip the
  // internal minimization back to the public maximization convention.
  const Vec y_scaled = best_y / best_tau;
  const Vec y_orig = t_factor.triangularView<Eigen::Upper>().solve(y_scaled);
  out.y = -y_orig;
  out.primal_objective = -block_inner(c, out.x_blocks);
  out.dual_objective = -b.dot(y_scaled);
  out.relative_gap = bm.gap_rel;
  out.primal_residual = bm.res_p;
  out.dual_residual = bm.res_d;
  out.converged = bm.score() <= 1e-8;
  return out;
}

}  // namespace cowlab
