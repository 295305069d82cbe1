#include "cowlab/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace cowlab {

double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double tol) {
  if (!(lo <= hi)) throw std::invalid_argument("find_root: empty interval");
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0)
    throw std::invalid_argument("find_root: endpoints do not bracket a root");
  // Classic bisection: the sign change is preserved in one half each step.
  for (int iter = 0; iter < 200 && (hi - lo) > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval at floating-point resolution
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if (flo * fmid < 0.0) {
      hi = mid;
      fhi = fmid;
    } else {
      lo = mid;
      flo = fmid;
    }
  }
  (void)fhi;
  return 0.5 * (lo + hi);
}

namespace {

// Track the best point seen, preferring strictly larger values and, on exact
// ties, the smaller argument. This is what makes constant functions resolve
// to the interval's left edge.
struct Best {
  double x;
  double value;
  void offer(double xx, double vv) {
    if (vv > value || (vv == value && xx < x)) {
      x = xx;
      value = vv;
    }
  }
};

}  // namespace

Max1dResult maximize_1d(const std::function<double(double)>& f, double lo,
                        double hi, int grid_n, int refine_iters) {
  if (!(lo <= hi)) throw std::invalid_argument("maximize_1d: empty interval");
  if (grid_n < 1) throw std::invalid_argument("maximize_1d: grid_n < 1");
  if (lo == hi || grid_n == 1) return {lo, f(lo)};

  Best best{lo, f(lo)};
  int best_index = 0;
  for (int i = 1; i < grid_n; ++i) {
    const double x =
        (i == grid_n - 1) ? hi : lo + (hi - lo) * static_cast<double>(i) /
                                          static_cast<double>(grid_n - 1);
    const double v = f(x);
    if (v > best.value) best_index = i;
    best.offer(x, v);
  }

  // Golden-section refinement on the bracket spanned by the best grid point's
  // neighbours (clamped to the original interval at the edges).
  const double step = (hi - lo) / static_cast<double>(grid_n - 1);
  double a = std::max(lo, lo + step * (best_index - 1));
  double b = std::min(hi, lo + step * (best_index + 1));
  const double inv_phi = 0.6180339887498948482;  // (sqrt(5)-1)/2
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  best.offer(x1, f1);
  best.offer(x2, f2);
  for (int i = 0; i < refine_iters; ++i) {
    if (f1 >= f2) {  // maximum lies in [a, x2]
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
      best.offer(x1, f1);
    } else {  // maximum lies in [x1, b]
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
      best.offer(x2, f2);
    }
  }
  return {best.x, best.value};
}

}  // namespace cowlab
