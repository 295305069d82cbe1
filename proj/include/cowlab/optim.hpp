// Deterministic optimization kernels used throughout the library:
//  - bounded-variable revised simplex for small dense linear programs,
//  - a primal-dual interior-point solver for block-diagonal semidefinite
//    programs (Nesterov-Todd scaling, Mehrotra predictor-corrector),
//  - bisection root finding and grid+golden-section 1-D maximization.
//
// Everything here is double precision, allocation-light, and bit-reproducible:
// identical inputs produce identical iterates on every run.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace cowlab {

// ---------------------------------------------------------------------------
// Linear programming
// ---------------------------------------------------------------------------

// minimize objective . x   subject to   eq_matrix * x = eq_rhs,
//                                        lower <= x <= upper  (elementwise).
// Lower bounds must be finite; upper bounds may be +infinity.
struct LinearProgram {
  Eigen::VectorXd objective;
  Eigen::MatrixXd eq_matrix;
  Eigen::VectorXd eq_rhs;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  Eigen::VectorXd x;            // optimal basic feasible point when optimal
  double objective = 0.0;       // objective . x
  double dual_objective = 0.0;  // equals objective at an optimum (strong duality)
  Eigen::VectorXd eq_duals;     // multipliers of the equality rows
  int iterations = 0;
};

// Two-phase bounded-variable revised simplex with Dantzig pricing and a
// Bland's-rule fallback that engages after an iteration threshold so cycling
// on degenerate vertices cannot occur. The returned point is an exact basic
// feasible solution of the stated program.
LpSolution solve_lp(const LinearProgram& lp);

// ---------------------------------------------------------------------------
// Semidefinite programming
// ---------------------------------------------------------------------------

// maximize  sum_blk <objective[blk], X_blk>
// subject to  sum_blk <constraints[i][blk], X_blk> = rhs[i]  for each i,
//             X_blk symmetric positive semidefinite.
// All coefficient matrices must be symmetric (validated to 1e-14 and then
// symmetrized exactly).
struct SdpProblem {
  std::vector<int> block_sizes;
  std::vector<Eigen::MatrixXd> objective;                  // one per block
  std::vector<std::vector<Eigen::MatrixXd>> constraints;   // [row][block]
  Eigen::VectorXd rhs;
};

struct SdpSolution {
  bool converged = false;
  std::vector<Eigen::MatrixXd> x_blocks;  // primal solution
  std::vector<Eigen::MatrixXd> s_blocks;  // dual slack matrices
  Eigen::VectorXd y;                      // duals for the equality rows
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double relative_gap = 0.0;   // |p - d| / (1 + |p| + |d|)
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
};

// Interior-point solve. Assumes strict feasibility of both primal and dual
// (Slater's condition); the library's discrimination problems satisfy it.
// Converges to relative gap and scaled residuals around 1e-10; callers that
// need certified accuracy check SdpSolution::relative_gap themselves.
SdpSolution solve_sdp(const SdpProblem& problem);

// ---------------------------------------------------------------------------
// Scalar search
// ---------------------------------------------------------------------------

// Bisection on [lo, hi]; requires f(lo) and f(hi) to bracket a sign change
// (f(lo)*f(hi) <= 0), otherwise throws std::invalid_argument. Stops once the
// bracket width is at most tol (at most ~60 halvings for tol 1e-14 on unit
// intervals) and returns the bracket midpoint.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double tol);

struct Max1dResult {
  double x = 0.0;
  double value = 0.0;
};

// Maximize f over [lo, hi]: evaluate an inclusive uniform grid of grid_n
// points, then refine around the best grid point with refine_iters iterations
// of golden-section search on the bracket formed by its neighbours. The
// result is the best point ever evaluated; exact ties keep the smaller
// argument, so a constant function yields x == lo.
Max1dResult maximize_1d(const std::function<double(double)>& f, double lo,
                        double hi, int grid_n, int refine_iters);

}  // namespace cowlab
