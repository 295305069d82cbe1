#include "cowlab/optim.hpp"

#include <Eigen/LU>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace cowlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarState { basic, at_lower, at_upper };

// Internal workspace for the two-phase bounded-variable revised simplex.
// Artificial variables occupy indices [n, n+m); their bounds are [0, inf)
// during phase one and are pinned to [0, 0] afterwards, which lets phase two
// run on the same machinery without removing columns.
struct Tableau {
  int n = 0;          // structural variables
  int m = 0;          // equality rows
  Eigen::MatrixXd a;  // m x (n + m), structural columns then artificials
  Eigen::VectorXd b;
  Eigen::VectorXd cost;  // current phase objective over all n + m columns
  Eigen::VectorXd lower, upper;
  Eigen::VectorXd x;
  std::vector<VarState> state;
  std::vector<int> basis;  // m column indices
};

// Assemble and factor the current basis, then refresh the basic components of
// x from scratch: x_B = B^{-1} (b - N x_N). Refactoring every iteration keeps
// the iterates bit-deterministic and immune to update drift; the bases here
// are tiny.
Eigen::PartialPivLU<Eigen::MatrixXd> refresh(Tableau& t) {
  Eigen::MatrixXd basis_matrix(t.m, t.m);
  for (int k = 0; k < t.m; ++k) basis_matrix.col(k) = t.a.col(t.basis[k]);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
  Eigen::VectorXd rhs = t.b;
  for (int j = 0; j < t.n + t.m; ++j)
    if (t.state[j] != VarState::basic && t.x[j] != 0.0)
      rhs -= t.a.col(j) * t.x[j];
  const Eigen::VectorXd xb = lu.solve(rhs);
  for (int k = 0; k < t.m; ++k) t.x[t.basis[k]] = xb[k];
  return lu;
}

Eigen::VectorXd basis_duals(const Tableau& t,
                            const Eigen::PartialPivLU<Eigen::MatrixXd>&) {
  // Solve B^T y = c_B. A separate factorization of B^T sidesteps any reliance
  // on transposed-solve support and costs nothing at these sizes.
  Eigen::MatrixXd bt(t.m, t.m);
  for (int k = 0; k < t.m; ++k) bt.row(k) = t.a.col(t.basis[k]).transpose();
  Eigen::VectorXd cb(t.m);
  for (int k = 0; k < t.m; ++k) cb[k] = t.cost[t.basis[k]];
  if (t.m == 0) return Eigen::VectorXd(0);
  return Eigen::PartialPivLU<Eigen::MatrixXd>(bt).solve(cb);
}

enum class StepOutcome { moved, optimal, unbounded };

// One simplex iteration. Dantzig pricing by default; once `use_bland` is set
// the entering and leaving choices follow Bland's smallest-index rule, which
// guarantees termination on degenerate problems.
StepOutcome simplex_step(Tableau& t, bool use_bland, double cost_scale) {
  const double tol_d = 1e-11 * cost_scale;
  const double tol_piv = 1e-12;

  const auto lu = refresh(t);
  const Eigen::VectorXd y = basis_duals(t, lu);

  int enter = -1;
  double best_violation = tol_d;
  for (int j = 0; j < t.n + t.m; ++j) {
    if (t.state[j] == VarState::basic) continue;
    if (t.lower[j] == t.upper[j]) continue;  // fixed column can never improve
    const double d = t.cost[j] - t.a.col(j).dot(y);
    double violation = 0.0;
    if (t.state[j] == VarState::at_lower && d < -tol_d) violation = -d;
    if (t.state[j] == VarState::at_upper && d > tol_d) violation = d;
    if (violation <= 0.0) continue;
    if (use_bland) {
      enter = j;
      break;
    }
    if (violation > best_violation) {
      best_violation = violation;
      enter = j;
    }
  }
  if (enter < 0) return StepOutcome::optimal;

  const bool from_lower = t.state[enter] == VarState::at_lower;
  const Eigen::VectorXd w = lu.solve(t.a.col(enter));

  // Ratio test. Entering from its lower bound the variable increases by
  // step s and the basics move as x_B - s*w; from the upper bound the signs
  // flip. `limit` is how far s can go before some basic variable hits a
  // bound; the entering variable's own opposite bound competes as well.
  double best_step = (t.upper[enter] < kInf)
                         ? t.upper[enter] - t.lower[enter]
                         : kInf;
  int leave_pos = -1;  // -1 means the entering variable flips to its bound
  for (int k = 0; k < t.m; ++k) {
    const int j = t.basis[k];
    const double wk = from_lower ? w[k] : -w[k];
    double limit = kInf;
    if (wk > tol_piv) {
      limit = (t.x[j] - t.lower[j]) / wk;  // basic j falls to its lower bound
    } else if (wk < -tol_piv && t.upper[j] < kInf) {
      limit = (t.x[j] - t.upper[j]) / wk;  // basic j rises to its upper bound
    }
    if (limit < 0.0) limit = 0.0;  // shield degenerate roundoff
    const bool better =
        limit < best_step ||
        (limit == best_step && leave_pos >= 0 && j < t.basis[leave_pos]);
    if (better && limit < kInf) {
      best_step = limit;
      leave_pos = k;
    }
  }
  if (best_step == kInf) return StepOutcome::unbounded;

  const double step = best_step;
  for (int k = 0; k < t.m; ++k) {
    const int j = t.basis[k];
    t.x[j] -= (from_lower ? step : -step) * w[k];
  }
  if (leave_pos < 0) {
    // Bound flip: the entering variable traverses its whole range.
    t.x[enter] = from_lower ? t.upper[enter] : t.lower[enter];
    t.state[enter] = from_lower ? VarState::at_upper : VarState::at_lower;
    return StepOutcome::moved;
  }

  const int leave = t.basis[leave_pos];
  const double wk = from_lower ? w[leave_pos] : -w[leave_pos];
  t.state[leave] = (wk > 0.0) ? VarState::at_lower : VarState::at_upper;
  t.x[leave] = (wk > 0.0) ? t.lower[leave] : t.upper[leave];
  t.basis[leave_pos] = enter;
  t.state[enter] = VarState::basic;
  t.x[enter] = from_lower ? t.lower[enter] + step : t.upper[enter] - step;
  return StepOutcome::moved;
}

// Run simplex iterations until optimality for the current phase objective.
// Returns false when the problem is unbounded in the current phase.
bool run_phase(Tableau& t, int* iterations) {
  const double cost_scale = 1.0 + t.cost.cwiseAbs().maxCoeff();
  const int bland_threshold = 50 * (t.n + 2 * t.m) + 200;
  const int hard_cap = 200000;
  for (int iter = 0;; ++iter) {
    if (iter > hard_cap)
      throw std::runtime_error("solve_lp: iteration limit exceeded");
    ++*iterations;
    switch (simplex_step(t, iter > bland_threshold, cost_scale)) {
      case StepOutcome::optimal:
        return true;
      case StepOutcome::unbounded:
        return false;
      case StepOutcome::moved:
        break;
    }
  }
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  const int n = static_cast<int>(lp.objective.size());
  const int m = static_cast<int>(lp.eq_rhs.size());
  if (lp.eq_matrix.rows() != m || (m > 0 && lp.eq_matrix.cols() != n))
    throw std::invalid_argument("solve_lp: constraint dimensions disagree");
  if (lp.lower.size() != n || lp.upper.size() != n)
    throw std::invalid_argument("solve_lp: bound dimensions disagree");
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(lp.lower[j]))
      throw std::invalid_argument("solve_lp: lower bounds must be finite");
    if (std::isnan(lp.upper[j]) || lp.upper[j] < lp.lower[j])
      throw std::invalid_argument("solve_lp: empty variable range");
  }

  Tableau t;
  t.n = n;
  t.m = m;
  t.a.resize(m, n + m);
  if (m > 0) t.a.leftCols(n) = lp.eq_matrix;
  t.b = lp.eq_rhs;
  t.lower.resize(n + m);
  t.upper.resize(n + m);
  t.lower.head(n) = lp.lower;
  t.upper.head(n) = lp.upper;
  t.x = Eigen::VectorXd::Zero(n + m);
  t.state.assign(n + m, VarState::at_lower);
  t.basis.resize(m);

  // Phase one: start all structural variables at their lower bounds and cover
  // the residual with signed artificial columns, so the artificial values are
  // nonnegative and the initial basis is the identity (up to signs).
  Eigen::VectorXd residual = t.b;
  for (int j = 0; j < n; ++j) {
    t.x[j] = t.lower[j];
    if (m > 0 && t.x[j] != 0.0) residual -= t.a.col(j) * t.x[j];
  }
  for (int i = 0; i < m; ++i) {
    const int j = n + i;
    t.a.col(j).setZero();
    t.a(i, j) = (residual[i] >= 0.0) ? 1.0 : -1.0;
    t.lower[j] = 0.0;
    t.upper[j] = kInf;
    t.x[j] = std::abs(residual[i]);
    t.state[j] = VarState::basic;
    t.basis[i] = j;
  }
  t.cost = Eigen::VectorXd::Zero(n + m);
  t.cost.tail(m).setOnes();

  LpSolution out;
  if (!run_phase(t, &out.iterations))
    throw std::runtime_error("solve_lp: phase one lost boundedness");
  double infeasibility = 0.0;
  for (int i = 0; i < m; ++i) infeasibility += t.x[n + i];
  const double feas_tol =
      1e-9 * (1.0 + (m > 0 ? t.b.cwiseAbs().maxCoeff() : 0.0));
  if (infeasibility > feas_tol) {
    out.status = LpStatus::infeasible;
    return out;
  }

  // Phase two: pin the artificials at zero and minimize the real objective.
  for (int i = 0; i < m; ++i) {
    t.lower[n + i] = 0.0;
    t.upper[n + i] = 0.0;
    t.x[n + i] = std::max(t.x[n + i], 0.0);
  }
  t.cost.setZero();
  t.cost.head(n) = lp.objective;
  if (!run_phase(t, &out.iterations)) {
    out.status = LpStatus::unbounded;
    return out;
  }

  const auto lu = refresh(t);
  const Eigen::VectorXd y = basis_duals(t, lu);
  out.status = LpStatus::optimal;
  out.x = t.x.head(n);
  out.objective = lp.objective.dot(out.x);
  out.eq_duals = y;
  // Strong-duality value for box-constrained LPs: b.y plus the reduced costs
  // of the nonbasic variables applied at the bound each one rests on.
  double dual = (m > 0) ? t.b.dot(y) : 0.0;
  for (int j = 0; j < n; ++j) {
    if (t.state[j] == VarState::basic) continue;
    const double d = lp.objective[j] - (m > 0 ? t.a.col(j).dot(y) : 0.0);
    dual += d * t.x[j];
  }
  out.dual_objective = dual;
  return out;
}

}  // namespace cowlab
