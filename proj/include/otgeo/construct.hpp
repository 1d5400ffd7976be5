#pragma once

#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "otgeo/geodesics.hpp"
#include "otgeo/space.hpp"
#include "otgeo/uniqueness.hpp"

namespace otgeo {

// Linear description of the lambda-intermediate set: weights over candidate
// chains between supp(mu0) and supp(mu1), constrained to the marginals and
// to total cost equal to the optimal one. Its e_lambda image realizes the
// intermediate points.
struct IntermediatePolytope {
  struct ChainVar {
    DiscreteGeodesic geo;
    int start = 0;
    int end = 0;
  };
  std::vector<ChainVar> chains;
  int T = 1;
  int k_lambda = 0;  // grid index of the query time
  Measure mu0;
  Measure mu1;
  double w2sq = 0.0;
  double epsilon = 0.0;
  double tol = 1e-9;
};

IntermediatePolytope build_intermediate_polytope(const FiniteMetricMeasureSpace& space,
                                                 const GeodesicSet& geodesics, const Measure& mu0,
                                                 const Measure& mu1, int lambda_num,
                                                 int lambda_den);

// e_lambda image of a weight vector over the polytope chains.
Measure eval_lambda(const IntermediatePolytope& poly, const std::vector<double>& weights,
                    const FiniteMetricMeasureSpace& space);

DynamicalPlan plan_from_weights(const IntermediatePolytope& poly,
                                const std::vector<double>& weights, double threshold = 1e-14);

// |W2(mu0,eta) - lambda W2| + |W2(eta,mu1) - (1-lambda) W2|
double lambda_split_defect(const FiniteMetricMeasureSpace& space, const IntermediatePolytope& poly,
                           const Measure& eta);

struct ExcessResult {
  Measure eta;
  double value = 0.0;
  std::vector<double> weights;
};

ExcessResult minimize_excess(const IntermediatePolytope& poly,
                             const FiniteMetricMeasureSpace& space, double C);

struct EntropyResult {
  Measure eta;
  double value = 0.0;
  std::vector<double> weights;
  int iterations = 0;
  double gap = 0.0;
  bool maybe_nonunique = false;
};

// Maximizes E_N over the e_lambda image: linearization with an LP oracle for
// N > 1, a support-spreading LP surrogate for N = 1. C_cap < 0 disables the
// density-cap constraint.
EntropyResult maximize_entropy(const IntermediatePolytope& poly,
                               const FiniteMetricMeasureSpace& space, double N,
                               double C_cap = -1.0, double tol_entropy = 1e-5,
                               int max_iter = 10000);

struct GoodGeodesicReport {
  double K = 0.0, N = 1.0, D = 0.0, lambda = 0.5;
  int depth = 1;
  int T_global = 1;
  double epsilon = 0.0;
  double linf0 = 0.0;
  double entropy0 = 0.0;
  std::vector<double> times;       // 0 and the recursion times
  std::vector<int> time_indices;   // matching global grid indices
  std::vector<Measure> measures;
  std::vector<double> linf;            // density sup per time
  std::vector<double> linf_margin;     // 1 - linf / bound
  std::vector<double> entropy_margin;  // E_N ratio minus its lower bound
  std::vector<double> fc_check;        // excess mass at the per-level cap
  double approx_error_w2 = 0.0;
};

struct GoodGeodesicResult {
  DynamicalPlan plan;
  GoodGeodesicReport report;
};

// Recursive lambda-step construction toward a Dirac target; the returned
// plan is the parcel composition of all levels on a common global grid.
GoodGeodesicResult good_geodesic_to_dirac(const FiniteMetricMeasureSpace& space,
                                          const GeodesicSet& geodesics, const Measure& mu0,
                                          int o, double K, double N, int lambda_num,
                                          int lambda_den, int depth);

struct FiniteDiracsResult {
  DynamicalPlan plan;
  GoodGeodesicReport report;
  std::vector<double> disjointness;    // worst pairwise support overlap per time
  std::vector<double> additivity_gap;  // entropy additivity defect per time
  MapExtraction extraction;
  std::vector<GoodGeodesicReport> fiber_reports;
};

FiniteDiracsResult good_geodesic_to_finite_diracs(const FiniteMetricMeasureSpace& space,
                                                  const GeodesicSet& geodesics,
                                                  const Measure& mu0,
                                                  const std::vector<std::pair<int, double>>& atoms,
                                                  double K, double N, int lambda_num,
                                                  int lambda_den, int depth);

FiniteDiracsResult good_geodesic_general(const FiniteMetricMeasureSpace& space,
                                         const GeodesicSet& geodesics, const Measure& mu0,
                                         const Measure& mu1, int n_atoms, double K, double N,
                                         int lambda_num, int lambda_den, int depth);

nlohmann::json report_to_json(const GoodGeodesicReport& rep);

}  // namespace otgeo
