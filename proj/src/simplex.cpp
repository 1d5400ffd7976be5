#include "otgeo/simplex.hpp"

#include <cmath>
#include <limits>

namespace otgeo {

namespace {

class Tableau {
 public:
  Tableau(int m, int ncols) : m_(m), ncols_(ncols), a_(static_cast<size_t>(m) * ncols, 0.0),
                              b_(static_cast<size_t>(m), 0.0), basis_(static_cast<size_t>(m), -1) {}

  double& at(int r, int c) { return a_[static_cast<size_t>(r) * ncols_ + c]; }
  double at(int r, int c) const { return a_[static_cast<size_t>(r) * ncols_ + c]; }
  double& rhs(int r) { return b_[static_cast<size_t>(r)]; }
  int& basis(int r) { return basis_[static_cast<size_t>(r)]; }

  void pivot(int pr, int pc) {
    const double piv = at(pr, pc);
    for (int c = 0; c < ncols_; ++c) at(pr, c) /= piv;
    rhs(pr) /= piv;
    for (int r = 0; r < m_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (int c = 0; c < ncols_; ++c) at(r, c) -= f * at(pr, c);
      rhs(r) -= f * rhs(pr);
      if (std::abs(rhs(r)) < 1e-14) rhs(r) = 0.0;
    }
    basis(pr) = pc;
  }

  int m_;
  int ncols_;
  std::vector<double> a_;
  std::vector<double> b_;
  std::vector<int> basis_;
};

// Runs simplex on the tableau minimizing `cost`; entering columns are
// restricted to indices < limit_cols. Bland's rule for anti-cycling.
LpResult::Status run(Tableau& t, const std::vector<double>& cost, int limit_cols,
                     double tol, int& iter_budget) {
  const int m = t.m_;
  std::vector<double> red(static_cast<size_t>(limit_cols), 0.0);
  while (iter_budget-- > 0) {
    // reduced costs r_j = c_j - c_B . T_j
    int entering = -1;
    for (int j = 0; j < limit_cols && entering < 0; ++j) {
      double r = cost[static_cast<size_t>(j)];
      for (int i = 0; i < m; ++i) {
        const int bi = t.basis(i);
        if (bi >= 0 && cost[static_cast<size_t>(bi)] != 0.0)
          r -= cost[static_cast<size_t>(bi)] * t.at(i, j);
      }
      if (r < -tol) entering = j;
    }
    if (entering < 0) return LpResult::OPTIMAL;

    int leaving = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      const double a = t.at(i, entering);
      if (a > tol) {
        const double ratio = t.rhs(i) / a;
        if (ratio < best - 1e-15 ||
            (ratio < best + 1e-15 && (leaving < 0 || t.basis(i) < t.basis(leaving))))
          if (ratio < best - 1e-15 || leaving < 0 || t.basis(i) < t.basis(leaving)) {
            best = ratio;
            leaving = i;
          }
      }
    }
    if (leaving < 0) return LpResult::UNBOUNDED;
    t.pivot(leaving, entering);
  }
  return LpResult::ITERATION_LIMIT;
}

}  // namespace

LpResult lp_solve(const LinearProgram& lp, double tol, int max_iter) {
  const int n = lp.num_vars;
  const int m = static_cast<int>(lp.rows.size());
  int num_slack = 0;
  for (const auto& row : lp.rows)
    if (row.rel == LinearProgram::LE) ++num_slack;

  const int slack0 = n;
  const int art0 = n + num_slack;
  const int ncols = n + num_slack + m;  // one artificial per row

  Tableau t(m, ncols);
  int slack_idx = slack0;
  for (int r = 0; r < m; ++r) {
    const auto& row = lp.rows[static_cast<size_t>(r)];
    double sign = row.rhs < 0.0 ? -1.0 : 1.0;
    for (const auto& [c, v] : row.coeffs) t.at(r, c) += sign * v;
    t.rhs(r) = sign * row.rhs;
    if (row.rel == LinearProgram::LE) {
      t.at(r, slack_idx) = sign * 1.0;
      ++slack_idx;
    }
    t.at(r, art0 + r) = 1.0;
    t.basis(r) = art0 + r;
  }

  // Phase 1: minimize the sum of artificials.
  std::vector<double> cost1(static_cast<size_t>(ncols), 0.0);
  for (int r = 0; r < m; ++r) cost1[static_cast<size_t>(art0 + r)] = 1.0;
  int budget = max_iter;
  LpResult::Status st = run(t, cost1, ncols, tol, budget);
  if (st != LpResult::OPTIMAL) return LpResult{LpResult::ITERATION_LIMIT, {}, 0.0};
  double phase1 = 0.0;
  for (int r = 0; r < m; ++r)
    if (t.basis(r) >= art0) phase1 += t.rhs(r);
  if (phase1 > 1e-7) return LpResult{LpResult::INFEASIBLE, {}, 0.0};

  // Drive any zero-level artificial out of the basis when possible.
  for (int r = 0; r < m; ++r) {
    if (t.basis(r) >= art0) {
      int pc = -1;
      for (int c = 0; c < art0 && pc < 0; ++c)
        if (std::abs(t.at(r, c)) > tol) pc = c;
      if (pc >= 0) t.pivot(r, pc);
    }
  }

  // Phase 2 restricted to structural + slack columns.
  std::vector<double> cost2(static_cast<size_t>(ncols), 0.0);
  for (int j = 0; j < n; ++j) cost2[static_cast<size_t>(j)] = lp.objective[static_cast<size_t>(j)];
  st = run(t, cost2, art0, tol, budget);
  if (st == LpResult::UNBOUNDED) return LpResult{LpResult::UNBOUNDED, {}, 0.0};
  if (st == LpResult::ITERATION_LIMIT) return LpResult{LpResult::ITERATION_LIMIT, {}, 0.0};

  LpResult res;
  res.status = LpResult::OPTIMAL;
  res.x.assign(static_cast<size_t>(n), 0.0);
  for (int r = 0; r < m; ++r) {
    const int b = t.basis(r);
    if (b >= 0 && b < n) res.x[static_cast<size_t>(b)] = std::max(0.0, t.rhs(r));
  }
  res.objective = 0.0;
  for (int j = 0; j < n; ++j) res.objective += lp.objective[static_cast<size_t>(j)] * res.x[static_cast<size_t>(j)];
  return res;
}

}  // namespace otgeo
