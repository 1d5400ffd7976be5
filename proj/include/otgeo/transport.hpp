#pragma once

#include <array>
#include <map>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "otgeo/space.hpp"

namespace otgeo {

// Coupling of two measures on the same space, stored densely over
// (source index, target index).
struct TransportPlan {
  int n = 0;
  std::vector<double> matrix;  // row-major n*n

  static TransportPlan zero(int n_) {
    return TransportPlan{n_, std::vector<double>(static_cast<size_t>(n_) * n_, 0.0)};
  }
  double& at(int i, int j) { return matrix[static_cast<size_t>(i) * n + j]; }
  double at(int i, int j) const { return matrix[static_cast<size_t>(i) * n + j]; }

  Measure row_marginal() const;
  Measure col_marginal() const;
  // entries with mass > threshold, as (i, j, mass)
  std::vector<std::array<double, 3>> triplets(double threshold = 0.0) const;
  std::vector<std::pair<int, int>> support(double threshold = 0.0) const;
};

// Optimal plan together with Kantorovich potentials. cost is the squared
// Wasserstein distance (sum of pi * d^2); phi and phi_c follow the half-cost
// convention phi(x) + phi_c(y) <= d(x,y)^2 / 2 so that the contact set can be
// read off directly.
struct TransportSolution {
  TransportPlan plan;
  double cost = 0.0;
  std::vector<double> phi;
  std::vector<double> phi_c;
  double tol_dual = 1e-7;

  double dual_value(const Measure& mu0, const Measure& mu1) const;
};

// Pairs saturating phi(x) + phi_c(y) = d^2/2 within tol, grouped per source.
struct ContactSet {
  std::vector<std::pair<int, int>> pairs;
  std::map<int, std::vector<int>> fibers;

  // sources whose fiber has more than one element (the set S)
  std::vector<int> ambiguous_sources() const;
};

struct MonotonicityReport {
  bool monotone = true;
  int max_cycle_len = 0;
  // on violation: pair indices forming the improving cycle, and the gain
  std::vector<int> cycle;
  double gain = 0.0;
};

TransportSolution solve_w2(const FiniteMetricMeasureSpace& space, const Measure& mu0,
                           const Measure& mu1, double tol_dual = 1e-7);

ContactSet contact_set(const FiniteMetricMeasureSpace& space, const TransportSolution& sol,
                       double tol_dual);

// Exhaustive d^2-cyclical-monotonicity check for cycles up to max_cycle_len,
// via bounded-length negative-cycle detection on the pair exchange graph.
MonotonicityReport check_cyclical_monotonicity(const FiniteMetricMeasureSpace& space,
                                               const std::vector<std::pair<int, int>>& pairs,
                                               int max_cycle_len = 5, double tol = 1e-9);

// map[i] = target index for every i in supp(mu0); -1 means undefined.
TransportPlan plan_from_map(const Measure& mu0, const std::vector<int>& map);

nlohmann::json solution_to_json(const TransportSolution& sol,
                                const FiniteMetricMeasureSpace& space);
TransportSolution solution_from_json(const nlohmann::json& j,
                                     const FiniteMetricMeasureSpace& space);

}  // namespace otgeo
