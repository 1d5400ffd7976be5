#pragma once

#include <string>

#include "otgeo/geodesics.hpp"
#include "otgeo/space.hpp"

namespace otgeo {

// Deterministic model-space generator request. Identical specs produce
// bit-identical spaces and geodesic sets.
struct InstanceSpec {
  std::string kind;      // interval | grid2d | tripod | weighted_interval
  int n = 2;             // points per side / branch
  double length = 1.0;   // total length L (interval, tripod branch length)
  std::string weight_id = "uniform";  // uniform | expneg | linear
  int T = 8;             // time resolution of the analytic geodesic set
  unsigned seed = 0;     // reserved; generators are deterministic
};

struct Instance {
  FiniteMetricMeasureSpace space;
  GeodesicSet geodesics;
  std::string notes;  // ground-truth summary
};

Instance generate(const InstanceSpec& spec);

// Default chain slack for a generated instance: twice the mesh width.
double default_epsilon(const InstanceSpec& spec);

}  // namespace otgeo
