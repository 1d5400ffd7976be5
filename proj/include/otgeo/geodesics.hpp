#pragma once

#include <map>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "otgeo/space.hpp"

namespace otgeo {

// Constant-speed chain at times k/T with additive metric-speed slack:
// |d(chain[a], chain[b]) - |a-b|/T * length| <= slack for all a <= b,
// where length = d(chain[0], chain[T]).
struct DiscreteGeodesic {
  std::vector<int> chain;
  double length = 0.0;
  double slack = 0.0;

  int T() const { return static_cast<int>(chain.size()) - 1; }
  int at_time(int k) const { return chain[static_cast<size_t>(k)]; }
};

// Largest deviation from constant speed over all index pairs.
double chain_slack(const FiniteMetricMeasureSpace& space, const std::vector<int>& chain);

DiscreteGeodesic make_geodesic(const FiniteMetricMeasureSpace& space, std::vector<int> chain);

bool satisfies_speed_bound(const FiniteMetricMeasureSpace& space, const std::vector<int>& chain,
                           double eps);

struct PlanAtom {
  DiscreteGeodesic geodesic;
  double weight = 0.0;
};

// Finitely supported probability over discrete geodesics sharing one grid.
struct DynamicalPlan {
  std::vector<PlanAtom> atoms;
  int time_resolution = 1;
  double epsilon = 0.0;

  double total_weight() const;
};

struct GeodesicSet {
  std::vector<DiscreteGeodesic> geodesics;
  int T = 1;
  double epsilon = 0.0;
  bool truncated = false;

  // indices into geodesics keyed by (start, end)
  std::map<std::pair<int, int>, std::vector<int>> by_pair;

  void rebuild_index();
};

struct BranchWitness {
  bool nonbranching = true;
  int first = -1;   // indices of the witness chains
  int second = -1;
  int split_index = -1;  // last grid index of agreement
};

Measure evaluate(const DynamicalPlan& nu, int k, const FiniteMetricMeasureSpace& space);
Measure evaluate_at(const DynamicalPlan& nu, double t, const FiniteMetricMeasureSpace& space);

// Reparametrizes every chain to the window [ks/T, kt/T]; the result has
// time resolution kt - ks.
DynamicalPlan restrict_plan(const DynamicalPlan& nu, int ks, int kt,
                            const FiniteMetricMeasureSpace& space);

struct Disintegration {
  Measure base;
  std::map<int, DynamicalPlan> conditionals;  // keyed by position at the time
};

Disintegration disintegrate(const DynamicalPlan& nu, int k, const FiniteMetricMeasureSpace& space);

// Concatenates left (on [0,1/2]) with right (on [1/2,1]) through the product
// coupling of the junction disintegrations. Output chains are resampled to a
// common grid by nearest-index arithmetic and need not satisfy the geodesic
// speed bound; their recomputed slack is stored.
DynamicalPlan glue_plans(const DynamicalPlan& left, const DynamicalPlan& right,
                         const FiniteMetricMeasureSpace& space);

BranchWitness is_nonbranching(const std::vector<DiscreteGeodesic>& chains);
BranchWitness is_nonbranching(const GeodesicSet& set);
BranchWitness is_nonbranching(const DynamicalPlan& nu);

double plan_cost(const DynamicalPlan& nu);

// All chains satisfying the speed bound between every ordered pair, by
// layered search; soft-truncates at cap.
GeodesicSet enumerate_geodesics(const FiniteMetricMeasureSpace& space, int T, double eps,
                                int cap = 1000000);

DynamicalPlan reverse_plan(const DynamicalPlan& nu, const FiniteMetricMeasureSpace& space);

// Nearest-index chain resample (round half up); exact on common grid times.
std::vector<int> resample_chain(const std::vector<int>& chain, int T_new);

nlohmann::json plan_to_json(const DynamicalPlan& nu, const FiniteMetricMeasureSpace& space);
DynamicalPlan plan_from_json(const nlohmann::json& j, const FiniteMetricMeasureSpace& space);

nlohmann::json geoset_to_json(const GeodesicSet& set, const FiniteMetricMeasureSpace& space);
GeodesicSet geoset_from_json(const nlohmann::json& j, const FiniteMetricMeasureSpace& space);

}  // namespace otgeo
