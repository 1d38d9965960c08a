#include "boundplan/solvers/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace boundplan {
namespace {

constexpr double kPivotEps = 1e-9;
constexpr double kCostEps = 1e-9;

struct Tableau {
  MatX T;                  // m x (num_cols + 1), last column is rhs
  std::vector<int> basis;  // basic variable per row
  int cols = 0;

  double& rhs(int i) { return T(i, cols); }

  void pivot(int row, int col) {
    T.row(row) /= T(row, col);
    for (int i = 0; i < T.rows(); ++i) {
      if (i == row) continue;
      double f = T(i, col);
      if (f != 0.0) T.row(i) -= f * T.row(row);
    }
    basis[static_cast<size_t>(row)] = col;
  }
};

// Maximizes cost^T z over the tableau. Returns false when unbounded.
bool run_simplex(Tableau& tab, const VecX& cost,
                 const std::vector<bool>& banned) {
  const int m = static_cast<int>(tab.T.rows());
  // Reduced-cost row: zrow_j = c_B^T B^-1 A_j - c_j.
  VecX zrow = -cost;
  for (int i = 0; i < m; ++i) {
    double cb = cost[tab.basis[static_cast<size_t>(i)]];
    if (cb != 0.0) zrow += cb * tab.T.row(i).head(tab.cols).transpose();
  }
  const int dantzig_limit = 500;
  for (int iter = 0; iter < 20000; ++iter) {
    int enter = -1;
    if (iter < dantzig_limit) {
      double best = -kCostEps;
      for (int j = 0; j < tab.cols; ++j) {
        if (banned[static_cast<size_t>(j)]) continue;
        if (zrow[j] < best) {
          best = zrow[j];
          enter = j;
        }
      }
    } else {  // Bland's rule
      for (int j = 0; j < tab.cols; ++j) {
        if (banned[static_cast<size_t>(j)]) continue;
        if (zrow[j] < -kCostEps) {
          enter = j;
          break;
        }
      }
    }
    if (enter < 0) return true;  // optimal

    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      double a = tab.T(i, enter);
      if (a > kPivotEps) {
        double ratio = tab.rhs(i) / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && leave >= 0 &&
             tab.basis[static_cast<size_t>(i)] <
                 tab.basis[static_cast<size_t>(leave)])) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) return false;  // unbounded

    double f = zrow[enter];
    tab.pivot(leave, enter);
    zrow -= f * tab.T.row(leave).head(tab.cols).transpose();
    zrow[enter] = 0.0;
  }
  return true;  // iteration cap; treat the current vertex as optimal
}

}  // namespace

LpResult solve_lp(const VecX& c, const MatX& G, const VecX& h) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(G.rows());

  LpResult res;
  if (m == 0) {
    // No constraints: optimal iff c == 0, otherwise unbounded.
    res.x = VecX::Zero(n);
    res.status = c.isZero(0.0) ? LpStatus::Optimal : LpStatus::Unbounded;
    return res;
  }

  // z = [x+ (n), x- (n), slack (m), artificial (<= m)]
  std::vector<int> art_rows;
  for (int i = 0; i < m; ++i)
    if (h[i] < 0.0) art_rows.push_back(i);
  const int n_art = static_cast<int>(art_rows.size());
  const int cols = 2 * n + m + n_art;

  Tableau tab;
  tab.cols = cols;
  tab.T = MatX::Zero(m, cols + 1);
  tab.basis.resize(static_cast<size_t>(m));

  for (int i = 0; i < m; ++i) {
    double sign = (h[i] < 0.0) ? -1.0 : 1.0;
    tab.T.block(i, 0, 1, n) = sign * G.row(i);
    tab.T.block(i, n, 1, n) = -sign * G.row(i);
    tab.T(i, 2 * n + i) = sign;  // slack
    tab.rhs(i) = sign * h[i];
    tab.basis[static_cast<size_t>(i)] = 2 * n + i;
  }
  for (int k = 0; k < n_art; ++k) {
    int i = art_rows[static_cast<size_t>(k)];
    tab.T(i, 2 * n + m + k) = 1.0;
    tab.basis[static_cast<size_t>(i)] = 2 * n + m + k;
  }

  std::vector<bool> banned(static_cast<size_t>(cols), false);

  if (n_art > 0) {
    VecX cost1 = VecX::Zero(cols);
    for (int k = 0; k < n_art; ++k) cost1[2 * n + m + k] = -1.0;
    run_simplex(tab, cost1, banned);  // phase 1 is always bounded
    double phase1 = 0.0;
    for (int i = 0; i < m; ++i)
      if (tab.basis[static_cast<size_t>(i)] >= 2 * n + m)
        phase1 += tab.rhs(i);
    if (phase1 > 1e-7) {
      res.status = LpStatus::Infeasible;
      return res;
    }
    // Drive remaining zero-level artificials out of the basis.
    for (int i = 0; i < m; ++i) {
      if (tab.basis[static_cast<size_t>(i)] < 2 * n + m) continue;
      int piv = -1;
      for (int j = 0; j < 2 * n + m; ++j) {
        if (std::abs(tab.T(i, j)) > kPivotEps) {
          piv = j;
          break;
        }
      }
      if (piv >= 0) tab.pivot(i, piv);
    }
    for (int k = 0; k < n_art; ++k) banned[2 * n + m + k] = true;
  }

  VecX cost2 = VecX::Zero(cols);
  cost2.head(n) = c;
  cost2.segment(n, n) = -c;
  bool bounded = run_simplex(tab, cost2, banned);
  if (!bounded) {
    res.status = LpStatus::Unbounded;
    // Still return the current feasible vertex as a witness.
  } else {
    res.status = LpStatus::Optimal;
  }

  res.x = VecX::Zero(n);
  for (int i = 0; i < m; ++i) {
    int bv = tab.basis[static_cast<size_t>(i)];
    if (bv < n)
      res.x[bv] += tab.rhs(i);
    else if (bv < 2 * n)
      res.x[bv - n] -= tab.rhs(i);
  }
  res.objective = c.dot(res.x);
  return res;
}

}  // namespace boundplan
