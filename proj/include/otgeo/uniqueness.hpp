#pragma once

#include <map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "otgeo/geodesics.hpp"
#include "otgeo/space.hpp"
#include "otgeo/transport.hpp"

namespace otgeo {

// Partial transport map read off the contact set: singleton fibers define
// the map, non-singleton fibers form the ambiguous set S.
struct MapExtraction {
  std::vector<int> map;  // target index per point; -1 where undefined
  std::vector<int> ambiguous;
  double ambiguous_mass = 0.0;
  double tol_dual = 1e-7;
  std::map<int, std::vector<int>> fibers;  // per source in supp(mu0), sorted
  TransportSolution solution;

  // deterministic selection: lowest-index fiber element everywhere
  std::vector<int> resolved_map() const;
};

MapExtraction extract_optimal_map(const FiniteMetricMeasureSpace& space, const Measure& mu0,
                                  const Measure& mu1, double tol_dual = 1e-7);

struct UniquenessCertificate {
  enum Verdict { UNIQUE, MULTIPLE, INCONCLUSIVE } verdict = INCONCLUSIVE;
  TransportPlan witness_a;  // on MULTIPLE: two cost-equal optimal plans
  TransportPlan witness_b;
  // dynamical multiplicity: a support pair carrying >= 2 distinct chains
  bool dynamical_multiplicity = false;
  std::pair<int, int> multi_pair{-1, -1};
  int probes_used = 0;
};

// Probes the optimal face of the transport polytope (tight cells of the
// terminating duals) for alternative optima; with a geodesic set, also
// requires a single chain per support pair for a UNIQUE verdict.
UniquenessCertificate certify_unique_plan(const FiniteMetricMeasureSpace& space,
                                          const Measure& mu0, const Measure& mu1,
                                          double tol = 1e-7,
                                          const GeodesicSet* geodesics = nullptr,
                                          int probe_cap = 1000);

struct BranchingWitness {
  DynamicalPlan mix;
  int tau_index = 0;  // junction grid index of the input plans
  BranchWitness witness;
  double cost_mix = 0.0;
  double cost_avg = 0.0;
};

// Restriction-average mixing at junction time tau: glue the averaged first
// halves to the averaged second halves and search for branching.
BranchingWitness build_mixing_plan(const DynamicalPlan& nu1, const DynamicalPlan& nu2,
                                   int tau_index, const FiniteMetricMeasureSpace& space);

struct StepwiseExtraction {
  std::vector<int> map;
  std::vector<double> hop_ambiguous_mass;
  int hops = 0;
};

// Composes within-patch extractions along an optimal dynamical plan in time
// hops bounded by step / (5 * D).
StepwiseExtraction stepwise_map_extraction(const FiniteMetricMeasureSpace& space,
                                           const std::vector<std::vector<int>>& patches,
                                           const Measure& mu0, const Measure& mu1, double step,
                                           const GeodesicSet& geodesics,
                                           double tol_dual = 1e-7);

nlohmann::json map_to_json(const MapExtraction& ext, const FiniteMetricMeasureSpace& space);

}  // namespace otgeo
