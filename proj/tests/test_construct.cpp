#include <doctest.h>

#include <cmath>
#include <set>
#include <utility>

#include "otgeo/construct.hpp"
#include "otgeo/errors.hpp"
#include "otgeo/functionals.hpp"
#include "otgeo/instances.hpp"
#include "otgeo/transport.hpp"

using namespace otgeo;

namespace {

Instance interval(int n, int T = 8) {
  return generate({.kind = "interval", .n = n, .length = 1.0, .weight_id = "uniform", .T = T});
}

Measure uniform_on(const FiniteMetricMeasureSpace& sp) {
  Measure mu = Measure::zero(sp.size());
  const double tot = sp.total_mass();
  for (int i = 0; i < sp.size(); ++i) mu.weights[static_cast<size_t>(i)] = sp.m(i) / tot;
  return mu;
}

}  // namespace

TEST_CASE("midpoint polytope of a translation") {
  const Instance inst = interval(9, 8);
  // mu0 uniform on the left third, mu1 its translate: the midpoint is the
  // half-way translate, and the polytope realizes it exactly
  Measure mu0 = Measure::zero(9), mu1 = Measure::zero(9);
  for (int i = 0; i < 3; ++i) {
    mu0.weights[static_cast<size_t>(i)] = 1.0 / 3;
    mu1.weights[static_cast<size_t>(i + 4)] = 1.0 / 3;
  }
  const IntermediatePolytope poly =
      build_intermediate_polytope(inst.space, inst.geodesics, mu0, mu1, 1, 2);
  CHECK(poly.k_lambda == 4);
  CHECK(poly.w2sq == doctest::Approx(0.25));

  // the translating map gives feasible weights
  std::vector<double> w(poly.chains.size(), 0.0);
  for (size_t c = 0; c < poly.chains.size(); ++c)
    if (poly.chains[c].end == poly.chains[c].start + 4) w[c] = 1.0 / 3;
  const Measure eta = eval_lambda(poly, w, inst.space);
  for (int i = 0; i < 9; ++i)
    CHECK(eta.weights[static_cast<size_t>(i)] ==
          doctest::Approx(i >= 2 && i <= 4 ? 1.0 / 3 : 0.0).scale(1.0));
  CHECK(lambda_split_defect(inst.space, poly, eta) <= 1e-9);

  const DynamicalPlan nu = plan_from_weights(poly, w);
  CHECK(nu.total_weight() == doctest::Approx(1.0));
  CHECK(plan_cost(nu) == doctest::Approx(0.25));
}

TEST_CASE("off grid lambda is rejected") {
  const Instance inst = interval(5, 8);
  const Measure d0 = Measure::dirac(5, 0), d1 = Measure::dirac(5, 4);
  CHECK_THROWS_AS(build_intermediate_polytope(inst.space, inst.geodesics, d0, d1, 1, 3),
                  OffGridTime);
}

TEST_CASE("excess minimization is nonincreasing in the cap") {
  const Instance inst = interval(9, 8);
  Measure mu0 = Measure::zero(9), mu1 = Measure::zero(9);
  for (int i = 0; i < 4; ++i) mu0.weights[static_cast<size_t>(i)] = 0.25;
  mu1.weights[4] = 1.0;  // contraction concentrates density
  const IntermediatePolytope poly =
      build_intermediate_polytope(inst.space, inst.geodesics, mu0, mu1, 1, 2);
  double prev = 1e9;
  for (double C : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const ExcessResult r = minimize_excess(poly, inst.space, C);
    CHECK(r.value <= prev + 1e-12);
    CHECK(r.value == doctest::Approx(excess_mass(r.eta, inst.space, C)).scale(1.0));
    prev = r.value;
  }
}

TEST_CASE("entropy maximization beats arbitrary feasible points") {
  const Instance inst = interval(9, 8);
  Measure mu0 = Measure::zero(9), mu1 = Measure::zero(9);
  for (int i = 0; i < 4; ++i) mu0.weights[static_cast<size_t>(i)] = 0.25;
  mu1.weights[5] = 1.0;
  const IntermediatePolytope poly =
      build_intermediate_polytope(inst.space, inst.geodesics, mu0, mu1, 1, 2);
  for (double N : {1.0, 2.0}) {
    const EntropyResult best = maximize_entropy(poly, inst.space, N);
    CHECK(best.value == doctest::Approx(renyi_entropy(best.eta, inst.space, N)).epsilon(1e-6));
    // compare against the map-induced vertex
    const TransportSolution sol = solve_w2(inst.space, mu0, mu1);
    std::vector<double> w(poly.chains.size(), 0.0);
    std::set<std::pair<int, int>> assigned;
    for (size_t c = 0; c < poly.chains.size(); ++c) {
      const double mass = sol.plan.at(poly.chains[c].start, poly.chains[c].end);
      // one chain per pair carries the pair's plan mass
      if (mass > 0 && assigned.insert({poly.chains[c].start, poly.chains[c].end}).second)
        w[c] = mass;
    }
    const Measure vertex = eval_lambda(poly, w, inst.space);
    CHECK(best.value >= renyi_entropy(vertex, inst.space, N) - 1e-7);
  }
}

TEST_CASE("contraction of the uniform interval is tight") {
  const Instance inst = interval(16, 8);
  const Measure mu0 = uniform_on(inst.space);
  const GoodGeodesicResult res =
      good_geodesic_to_dirac(inst.space, inst.geodesics, mu0, 0, 0.0, 1.0, 1, 2, 4);
  const auto& rep = res.report;
  REQUIRE(rep.times.size() == 5);  // t = 0 plus 4 levels
  CHECK(rep.times[0] == 0.0);
  CHECK(rep.times[1] == doctest::Approx(0.5));
  CHECK(rep.times[4] == doctest::Approx(1.0 - 1.0 / 16));
  for (size_t k = 0; k < rep.times.size(); ++k) {
    // flat case: density bound (1-t)^{-1} linf0, entropy at least (1-t) E_1
    CHECK(rep.linf[k] <= (1.0 + 10.0 / 16) / (1.0 - rep.times[k]) * rep.linf0);
    CHECK(rep.measures[k].total() == doctest::Approx(1.0));
    CHECK(rep.fc_check[k] <= 1e-9);
    CHECK(std::abs(rep.linf_margin[k]) <= 10.0 / 16);
    CHECK(std::abs(rep.entropy_margin[k]) <= 10.0 / 16);
  }
  // the composed plan evaluates to the recorded measures
  for (size_t k = 0; k < rep.time_indices.size(); ++k) {
    const Measure direct = evaluate(res.plan, rep.time_indices[k], inst.space);
    for (int i = 0; i < inst.space.size(); ++i)
      CHECK(direct.weights[static_cast<size_t>(i)] ==
            doctest::Approx(rep.measures[k].weights[static_cast<size_t>(i)]).scale(1.0));
  }
}

TEST_CASE("finite dirac targets stay disjoint on the interval") {
  const Instance inst = interval(12, 8);
  // left half flows to the left tip, right half to the right tip
  Measure mu0 = uniform_on(inst.space);
  const FiniteDiracsResult res = good_geodesic_to_finite_diracs(
      inst.space, inst.geodesics, mu0, {{0, 0.5}, {11, 0.5}}, 0.0, 1.0, 1, 2, 3);
  REQUIRE(res.fiber_reports.size() == 2);
  for (double d : res.disjointness) CHECK(d <= 1e-12);
  for (double g : res.additivity_gap) CHECK(g <= 1e-9);
  CHECK(res.extraction.ambiguous_mass <= 2.0 / 12);
}

TEST_CASE("general targets are quantized with a reported defect") {
  const Instance inst = interval(12, 8);
  const Measure mu0 = uniform_on(inst.space);
  Measure mu1 = Measure::zero(12);
  mu1.weights[2] = 0.4;
  mu1.weights[9] = 0.6;
  const FiniteDiracsResult res =
      good_geodesic_general(inst.space, inst.geodesics, mu0, mu1, 4, 0.0, 1.0, 1, 2, 3);
  CHECK(res.report.approx_error_w2 <= 1e-9);  // two atoms fit the budget exactly
  Measure coarse = Measure::zero(12);
  for (int i = 0; i < 12; ++i) coarse.weights[static_cast<size_t>(i)] = 1.0 / 12;
  const FiniteDiracsResult rough =
      good_geodesic_general(inst.space, inst.geodesics, mu0, coarse, 3, 0.0, 1.0, 1, 2, 3);
  CHECK(rough.report.approx_error_w2 > 0.0);  // 12 atoms cannot fit in 3
}

TEST_CASE("bad marginals are rejected") {
  const Instance inst = interval(6, 8);
  Measure not_prob = Measure::zero(6);
  not_prob.weights[0] = 0.5;
  CHECK_THROWS_AS(
      good_geodesic_to_dirac(inst.space, inst.geodesics, not_prob, 5, 0.0, 1.0, 1, 2, 2),
      BadMarginal);
}
