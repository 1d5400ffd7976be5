#include <doctest.h>

#include <nlohmann/json.hpp>

#include "otgeo/errors.hpp"
#include "otgeo/instances.hpp"
#include "otgeo/uniqueness.hpp"

using namespace otgeo;
using nlohmann::json;

namespace {

Instance interval(int n) {
  return generate({.kind = "interval", .n = n, .length = 1.0, .weight_id = "uniform", .T = 8});
}

Measure uniform_on(const FiniteMetricMeasureSpace& sp) {
  Measure mu = Measure::zero(sp.size());
  const double tot = sp.total_mass();
  for (int i = 0; i < sp.size(); ++i) mu.weights[static_cast<size_t>(i)] = sp.m(i) / tot;
  return mu;
}

}  // namespace

TEST_CASE("monotone interval transport is a map") {
  const Instance inst = interval(8);
  Measure mu0 = Measure::zero(8), mu1 = Measure::zero(8);
  for (int i = 0; i < 4; ++i) {
    mu0.weights[static_cast<size_t>(i)] = 0.25;
    mu1.weights[static_cast<size_t>(i + 4)] = 0.25;
  }
  const MapExtraction ext = extract_optimal_map(inst.space, mu0, mu1);
  CHECK(ext.ambiguous.empty());
  CHECK(ext.ambiguous_mass == 0.0);
  for (int i = 0; i < 4; ++i) CHECK(ext.map[static_cast<size_t>(i)] == i + 4);
  CHECK(ext.resolved_map()[0] == 4);
}

TEST_CASE("symmetric split leaves an ambiguous source") {
  const Instance inst = interval(9);
  const Measure mu0 = Measure::dirac(9, 4);
  Measure mu1 = Measure::zero(9);
  mu1.weights[0] = 0.5;
  mu1.weights[8] = 0.5;
  const MapExtraction ext = extract_optimal_map(inst.space, mu0, mu1);
  CHECK(ext.ambiguous == std::vector<int>{4});
  CHECK(ext.ambiguous_mass == doctest::Approx(1.0));
  CHECK(ext.fibers.at(4).size() == 2);
  CHECK(ext.map[4] == -1);
  CHECK(ext.resolved_map()[4] == 0);  // deterministic lowest-index choice
  const json j = map_to_json(ext, inst.space);
  CHECK(j.at("ambiguous_mass") == doctest::Approx(1.0));
}

TEST_CASE("uniqueness verdicts on interval versus symmetric square") {
  const Instance inst = interval(8);
  Measure mu0 = Measure::zero(8), mu1 = Measure::zero(8);
  for (int i = 0; i < 4; ++i) {
    mu0.weights[static_cast<size_t>(i)] = 0.25;
    mu1.weights[static_cast<size_t>(i + 4)] = 0.25;
  }
  CHECK(certify_unique_plan(inst.space, mu0, mu1).verdict == UniquenessCertificate::UNIQUE);

  // unit square with uniform pair marginals on opposite diagonals: both
  // perfect matchings cost the same, so the plan cannot be unique
  const auto sq = validate_space(json{
      {"points", {"p", "q", "r", "s"}},
      {"metric", {{"type", "euclidean"}, {"coords", {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}}}}},
      {"measure", {1.0, 1.0, 1.0, 1.0}}});
  Measure a = Measure::zero(4), b = Measure::zero(4);
  a.weights[0] = a.weights[3] = 0.5;
  b.weights[1] = b.weights[2] = 0.5;
  const UniquenessCertificate cert = certify_unique_plan(sq, a, b);
  REQUIRE(cert.verdict == UniquenessCertificate::MULTIPLE);
  // the two witnesses are distinct optimal plans of equal cost
  double ca = 0.0, cb = 0.0;
  bool differ = false;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      ca += cert.witness_a.at(i, j) * sq.d2(i, j);
      cb += cert.witness_b.at(i, j) * sq.d2(i, j);
      differ = differ || std::abs(cert.witness_a.at(i, j) - cert.witness_b.at(i, j)) > 1e-9;
    }
  CHECK(differ);
  CHECK(ca == doctest::Approx(cb).epsilon(1e-9));
}

TEST_CASE("chain multiplicity flags dynamical non-uniqueness") {
  const Instance tri = generate({.kind = "tripod", .n = 4, .length = 1.0,
                                 .weight_id = "uniform", .T = 8});
  const int b4 = tri.space.index_of("b4");
  const int c4 = tri.space.index_of("c4");
  // b-tip to c-tip: a single static pair, but the geodesic set may carry
  // several chains; with one chain per pair the verdict stays UNIQUE
  const UniquenessCertificate cert = certify_unique_plan(
      tri.space, Measure::dirac(tri.space.size(), b4), Measure::dirac(tri.space.size(), c4),
      1e-7, &tri.geodesics);
  if (cert.verdict == UniquenessCertificate::MULTIPLE) CHECK(cert.dynamical_multiplicity);
}

TEST_CASE("mixing plan input validation") {
  const Instance inst = interval(8);
  DynamicalPlan nu1, nu2;
  nu1.time_resolution = 8;
  nu2.time_resolution = 8;
  const auto& gs = inst.geodesics;
  nu1.atoms.push_back({gs.geodesics[static_cast<size_t>(gs.by_pair.at({0, 7}).front())], 1.0});
  nu2.atoms.push_back({gs.geodesics[static_cast<size_t>(gs.by_pair.at({1, 6}).front())], 1.0});
  // different starting marginals
  CHECK_THROWS_AS(build_mixing_plan(nu1, nu2, 2, inst.space), MarginalMismatch);
  // tau must be interior
  CHECK_THROWS_AS(build_mixing_plan(nu1, nu1, 0, inst.space), OffGridTime);
  DynamicalPlan other = nu1;
  other.time_resolution = 4;
  other.atoms[0].geodesic = make_geodesic(inst.space, {0, 2, 4, 5, 7});
  CHECK_THROWS_AS(build_mixing_plan(nu1, other, 2, inst.space), ResamplingRequired);
}

TEST_CASE("self mixing reproduces the plan cost") {
  const Instance inst = interval(8);
  DynamicalPlan nu;
  nu.time_resolution = 8;
  const auto& gs = inst.geodesics;
  nu.atoms.push_back({gs.geodesics[static_cast<size_t>(gs.by_pair.at({0, 7}).front())], 0.5});
  nu.atoms.push_back({gs.geodesics[static_cast<size_t>(gs.by_pair.at({1, 7}).front())], 0.5});
  const BranchingWitness bw = build_mixing_plan(nu, nu, 4, inst.space);
  CHECK(bw.cost_avg == doctest::Approx(plan_cost(nu)));
  CHECK(std::abs(bw.cost_mix - bw.cost_avg) <= 1e-9 + 4 * nu.epsilon + 4 * gs.epsilon);
}

TEST_CASE("stepwise extraction composes within patches") {
  const Instance inst = interval(10);
  Measure mu0 = Measure::zero(10), mu1 = Measure::zero(10);
  for (int i = 0; i < 5; ++i) {
    mu0.weights[static_cast<size_t>(i)] = 0.2;
    mu1.weights[static_cast<size_t>(i + 5)] = 0.2;
  }
  // two generously overlapping patches cover the interval
  std::vector<std::vector<int>> patches{{0, 1, 2, 3, 4, 5, 6, 7}, {2, 3, 4, 5, 6, 7, 8, 9}};
  const StepwiseExtraction sw =
      stepwise_map_extraction(inst.space, patches, mu0, mu1, 0.3, inst.geodesics);
  const MapExtraction direct = extract_optimal_map(inst.space, mu0, mu1);
  const std::vector<int> want = direct.resolved_map();
  for (int i = 0; i < 5; ++i) CHECK(sw.map[static_cast<size_t>(i)] == want[static_cast<size_t>(i)]);
  CHECK(sw.hops >= 1);
  // patches that miss a ball around a support point are rejected
  std::vector<std::vector<int>> sparse{{0, 1}, {8, 9}};
  CHECK_THROWS_AS(stepwise_map_extraction(inst.space, sparse, mu0, mu1, 0.3, inst.geodesics),
                  CoveringGap);
}
