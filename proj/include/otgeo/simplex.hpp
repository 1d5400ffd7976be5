#pragma once

#include <utility>
#include <vector>

namespace otgeo {

// Small dense LP solver used for the polytope machinery (excess-mass
// minimization, entropy linearization oracles, face probing).
// Minimizes c.x subject to sparse rows A x <= / = b and x >= 0.
// Two-phase primal simplex with Bland's rule.
struct LinearProgram {
  enum Rel { LE, EQ };
  struct Row {
    std::vector<std::pair<int, double>> coeffs;
    Rel rel = EQ;
    double rhs = 0.0;
  };

  int num_vars = 0;
  std::vector<double> objective;  // length num_vars, minimized
  std::vector<Row> rows;

  Row& add_row(Rel rel, double rhs) {
    rows.push_back(Row{{}, rel, rhs});
    return rows.back();
  }
};

struct LpResult {
  enum Status { OPTIMAL, INFEASIBLE, UNBOUNDED, ITERATION_LIMIT } status = INFEASIBLE;
  std::vector<double> x;
  double objective = 0.0;
};

LpResult lp_solve(const LinearProgram& lp, double tol = 1e-9, int max_iter = 200000);

}  // namespace otgeo
