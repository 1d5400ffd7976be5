#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "otgeo/construct.hpp"
#include "otgeo/curvature.hpp"
#include "otgeo/errors.hpp"
#include "otgeo/instances.hpp"

using namespace otgeo;

namespace {

Instance interval(int n, double L = 1.0) {
  return generate({.kind = "interval", .n = n, .length = L, .weight_id = "uniform", .T = 8});
}

Measure uniform_on(const FiniteMetricMeasureSpace& sp) {
  Measure mu = Measure::zero(sp.size());
  const double tot = sp.total_mass();
  for (int i = 0; i < sp.size(); ++i) mu.weights[static_cast<size_t>(i)] = sp.m(i) / tot;
  return mu;
}

GoodGeodesicResult contraction(const Instance& inst, int o, int depth = 4) {
  return good_geodesic_to_dirac(inst.space, inst.geodesics, uniform_on(inst.space), o, 0.0, 1.0,
                                1, 2, depth);
}

}  // namespace

TEST_CASE("flat interval satisfies the integrated contraction inequality") {
  const Instance inst = interval(16);
  const GoodGeodesicResult res = contraction(inst, 0);
  const VerificationReport rep =
      check_mcp_integrated(inst.space, res.plan, 0, 0.0, 1.0, res.report.time_indices);
  CHECK(rep.passed());
  CHECK(rep.worst_margin() >= -1e-9);
  // and fails for an absurd dimension demand: K > 0 on a long interval
  const Instance wide = interval(16, 3.2);
  const GoodGeodesicResult res2 = contraction(wide, 0);
  const VerificationReport rep2 =
      check_mcp_integrated(wide.space, res2.plan, 0, 1.0, 2.0, res2.report.time_indices);
  CHECK(rep2.verdict == "INFINITE-COEFFICIENT");
  CHECK(rep2.witness.infinite_rhs);
}

TEST_CASE("pointwise form implies the integrated form") {
  const Instance inst = interval(16);
  const GoodGeodesicResult res = contraction(inst, 0);
  const VerificationReport ohta =
      check_mcp_ohta(inst.space, res.plan, 0.0, 1.0, res.report.time_indices);
  CHECK(ohta.passed());
  const VerificationReport impl =
      check_mcp_implication(inst.space, res.plan, 0, 0.0, 1.0, res.report.time_indices);
  CHECK(impl.passed());
}

TEST_CASE("implication is not applicable when the pointwise form fails") {
  const Instance inst = interval(16);
  const GoodGeodesicResult res = contraction(inst, 0);
  // demand positive curvature from a flat model: pointwise fails somewhere
  const VerificationReport impl =
      check_mcp_implication(inst.space, res.plan, 0, 5.0, 2.0, res.report.time_indices);
  CHECK((impl.verdict == "NOT-APPLICABLE" || impl.verdict == "INFINITE-COEFFICIENT"));
}

TEST_CASE("reduced condition holds along a translation") {
  // uniform block translated along the interval: densities are constant in
  // t, so the two-sided coefficient inequality holds with margin ~0
  const Instance inst = interval(16);
  Measure mu0 = Measure::zero(16), mu1 = Measure::zero(16);
  for (int i = 0; i < 6; ++i) {
    mu0.weights[static_cast<size_t>(i)] = 1.0 / 6;
    mu1.weights[static_cast<size_t>(i + 8)] = 1.0 / 6;
  }
  const IntermediatePolytope poly =
      build_intermediate_polytope(inst.space, inst.geodesics, mu0, mu1, 1, 2);
  std::vector<double> w(poly.chains.size(), 0.0);
  for (size_t c = 0; c < poly.chains.size(); ++c)
    if (poly.chains[c].end == poly.chains[c].start + 8) w[c] = 1.0 / 6;
  const DynamicalPlan nu = plan_from_weights(poly, w);
  const VerificationReport rep = check_cdstar(inst.space, nu, 0.0, 1.0, {}, {0, 2, 4, 6, 8});
  CHECK(rep.passed());
  CHECK(rep.nprime_grid.size() >= 2);
  CHECK_THROWS_AS(check_cdstar(inst.space, nu, 0.0, 2.0, {1.0}, {0, 4, 8}), InvalidParameter);

  // a contraction toward a point also satisfies the two-sided form on the
  // flat line: the capped construction keeps the density ladder exactly at
  // the coefficient bound, so the margin sits at zero
  const GoodGeodesicResult res = contraction(inst, 0, 3);
  const VerificationReport contr =
      check_cdstar(inst.space, res.plan, 0.0, 1.0, {}, res.report.time_indices);
  CHECK(contr.verdict == "PASS");
  CHECK(contr.worst_margin() >= -1e-9);
}

TEST_CASE("final bounds hold on a map-induced contraction") {
  const Instance inst = interval(16);
  const GoodGeodesicResult res = contraction(inst, 0);
  const VerificationReport rep =
      check_final_bounds(inst.space, res.plan, 0.0, 1.0, res.report.time_indices);
  CHECK(rep.passed());
  CHECK(rep.worst_margin() >= -(10.0 / 16));
}

TEST_CASE("reference density factors") {
  const LinfReferenceBounds flat = linf_reference_bounds(0.0, 2.0, 1.0, 2.0, 3.0);
  CHECK(flat.cd_factor == doctest::Approx(3.0));
  CHECK(flat.cdstar_factor == doctest::Approx(3.0));
  const LinfReferenceBounds neg = linf_reference_bounds(-4.0, 2.0, 1.5, 2.0, 3.0);
  CHECK(neg.cd_factor == doctest::Approx(3.0 * std::exp(1.5 * std::sqrt(4.0))));
  CHECK(neg.cdstar_factor == doctest::Approx(3.0 * std::exp(1.5 * std::sqrt(8.0))));
}

TEST_CASE("sampled space verification distinguishes signs") {
  const Instance inst = interval(24);
  const VerificationReport pass = verify_space_mcp(inst.space, inst.geodesics, 0.0, 1.0, 3, 42);
  CHECK(pass.passed());
  CHECK(pass.worst_margin() >= -4.0 / 24);
  const Instance wide = generate({.kind = "interval", .n = 24, .length = 3.2,
                                  .weight_id = "uniform", .T = 8});
  const VerificationReport fail =
      verify_space_mcp(wide.space, wide.geodesics, 1.0, 2.0, 3, 42);
  CHECK(fail.verdict == "INFINITE-COEFFICIENT");
}

TEST_CASE("reports serialize with their witnesses") {
  const Instance inst = interval(12);
  const GoodGeodesicResult res = contraction(inst, 0, 3);
  const VerificationReport rep =
      check_mcp_integrated(inst.space, res.plan, 0, 0.0, 1.0, res.report.time_indices);
  const auto j = verification_to_json(rep);
  CHECK(j.at("verdict") == "PASS");
  CHECK(j.at("items").size() == rep.items.size());
  CHECK(j.at("condition") == rep.condition);
}
