#include <doctest.h>

#include <nlohmann/json.hpp>
#include <random>

#include "otgeo/errors.hpp"
#include "otgeo/geodesics.hpp"
#include "otgeo/instances.hpp"

using namespace otgeo;
using nlohmann::json;

namespace {

Instance interval(int n, int T = 8) {
  return generate({.kind = "interval", .n = n, .length = 1.0, .weight_id = "uniform", .T = T});
}

// plan carrying the first generator chain for every sampled (start, end) pair
DynamicalPlan random_plan(const Instance& inst, std::mt19937& rng, int natoms = 6) {
  const auto& gs = inst.geodesics;
  DynamicalPlan nu;
  nu.time_resolution = gs.T;
  nu.epsilon = gs.epsilon;
  std::uniform_int_distribution<size_t> pick(0, gs.geodesics.size() - 1);
  std::vector<double> w;
  for (int a = 0; a < natoms; ++a) {
    nu.atoms.push_back({gs.geodesics[pick(rng)], 0.0});
    w.push_back(std::uniform_real_distribution<>(0.1, 1.0)(rng));
  }
  double tot = 0.0;
  for (double v : w) tot += v;
  for (int a = 0; a < natoms; ++a) nu.atoms[static_cast<size_t>(a)].weight = w[static_cast<size_t>(a)] / tot;
  return nu;
}

}  // namespace

TEST_CASE("chain slack vanishes on evenly spaced chains") {
  const Instance inst = interval(9, 8);
  // x0..x8, chain through every point is constant speed
  std::vector<int> chain{0, 1, 2, 3, 4, 5, 6, 7, 8};
  CHECK(chain_slack(inst.space, chain) == doctest::Approx(0.0).scale(1e-12));
  const DiscreteGeodesic g = make_geodesic(inst.space, chain);
  CHECK(g.length == doctest::Approx(1.0));
  CHECK(g.T() == 8);

  // a chain that lingers accumulates slack
  std::vector<int> lazy{0, 0, 2, 3, 4, 5, 6, 7, 8};
  CHECK(chain_slack(inst.space, lazy) > 0.1);
  CHECK(satisfies_speed_bound(inst.space, chain, 1e-9));
  CHECK(!satisfies_speed_bound(inst.space, lazy, 1e-3));
}

TEST_CASE("evaluate pushes the plan to its time marginals") {
  const Instance inst = interval(9, 8);
  DynamicalPlan nu;
  nu.time_resolution = 8;
  nu.atoms.push_back({make_geodesic(inst.space, {0, 1, 2, 3, 4, 5, 6, 7, 8}), 0.5});
  nu.atoms.push_back({make_geodesic(inst.space, {8, 7, 6, 5, 4, 3, 2, 1, 0}), 0.5});
  const Measure mid = evaluate(nu, 4, inst.space);
  CHECK(mid.weights[4] == doctest::Approx(1.0));
  const Measure start = evaluate_at(nu, 0.0, inst.space);
  CHECK(start.weights[0] == doctest::Approx(0.5));
  CHECK(start.weights[8] == doctest::Approx(0.5));
  CHECK_THROWS_AS(evaluate_at(nu, 0.3, inst.space), OffGridTime);
  CHECK(nu.total_weight() == doctest::Approx(1.0));
}

TEST_CASE("restriction reindexes time exactly") {
  std::mt19937 rng(7);
  const Instance inst = interval(12, 8);
  for (int rep = 0; rep < 20; ++rep) {
    const DynamicalPlan nu = random_plan(inst, rng);
    const int ks = std::uniform_int_distribution<>(0, 6)(rng);
    const int kt = std::uniform_int_distribution<>(ks + 1, 8)(rng);
    const DynamicalPlan sub = restrict_plan(nu, ks, kt, inst.space);
    CHECK(sub.time_resolution == kt - ks);
    for (int k = 0; k <= kt - ks; ++k) {
      const Measure a = evaluate(sub, k, inst.space);
      const Measure b = evaluate(nu, ks + k, inst.space);
      for (size_t i = 0; i < a.weights.size(); ++i)
        CHECK(a.weights[i] == doctest::Approx(b.weights[i]).scale(1.0));
    }
  }
}

TEST_CASE("disintegration recombines to the plan marginal") {
  std::mt19937 rng(11);
  const Instance inst = interval(10, 8);
  for (int rep = 0; rep < 20; ++rep) {
    const DynamicalPlan nu = random_plan(inst, rng);
    const int k = std::uniform_int_distribution<>(0, 8)(rng);
    const Disintegration dis = disintegrate(nu, k, inst.space);
    const Measure direct = evaluate(nu, k, inst.space);
    for (size_t i = 0; i < direct.weights.size(); ++i)
      CHECK(dis.base.weights[i] == doctest::Approx(direct.weights[i]).scale(1.0));
    // every conditional is a probability concentrated on position i at time k
    for (const auto& [pos, cond] : dis.conditionals) {
      CHECK(cond.total_weight() == doctest::Approx(1.0));
      for (const auto& atom : cond.atoms) CHECK(atom.geodesic.at_time(k) == pos);
    }
  }
}

TEST_CASE("gluing matches the outer marginals") {
  std::mt19937 rng(13);
  const Instance inst = interval(10, 8);
  for (int rep = 0; rep < 10; ++rep) {
    const DynamicalPlan nu = random_plan(inst, rng);
    const int k = std::uniform_int_distribution<>(1, 7)(rng);
    const DynamicalPlan left = restrict_plan(nu, 0, k, inst.space);
    const DynamicalPlan right = restrict_plan(nu, k, 8, inst.space);
    const DynamicalPlan glued = glue_plans(left, right, inst.space);
    // e_0, e_1/2 and e_1 of the glued plan match the pieces
    const Measure g0 = evaluate(glued, 0, inst.space);
    const Measure gh = evaluate(glued, glued.time_resolution / 2, inst.space);
    const Measure g1 = evaluate(glued, glued.time_resolution, inst.space);
    const Measure e0 = evaluate(nu, 0, inst.space);
    const Measure ek = evaluate(nu, k, inst.space);
    const Measure e8 = evaluate(nu, 8, inst.space);
    for (size_t i = 0; i < e0.weights.size(); ++i) {
      CHECK(g0.weights[i] == doctest::Approx(e0.weights[i]).scale(1.0));
      CHECK(gh.weights[i] == doctest::Approx(ek.weights[i]).scale(1.0));
      CHECK(g1.weights[i] == doctest::Approx(e8.weights[i]).scale(1.0));
    }
    CHECK(glued.total_weight() == doctest::Approx(1.0));
  }
  // mismatched junction marginals are rejected
  const DynamicalPlan a = random_plan(inst, rng);
  DynamicalPlan b = random_plan(inst, rng);
  bool same = true;
  const Measure ea = evaluate(a, 8, inst.space), eb = evaluate(b, 0, inst.space);
  for (size_t i = 0; i < ea.weights.size(); ++i)
    same = same && std::abs(ea.weights[i] - eb.weights[i]) < 1e-12;
  if (!same) CHECK_THROWS_AS(glue_plans(a, b, inst.space), JunctionMismatch);
}

TEST_CASE("reversal is a cost-preserving involution") {
  std::mt19937 rng(17);
  const Instance inst = interval(10, 8);
  const DynamicalPlan nu = random_plan(inst, rng);
  const DynamicalPlan rev = reverse_plan(nu, inst.space);
  CHECK(plan_cost(rev) == doctest::Approx(plan_cost(nu)));
  const DynamicalPlan back = reverse_plan(rev, inst.space);
  for (size_t a = 0; a < nu.atoms.size(); ++a)
    CHECK(back.atoms[a].geodesic.chain == nu.atoms[a].geodesic.chain);
}

TEST_CASE("resampling is exact on shared grid points") {
  const std::vector<int> chain{0, 2, 4, 6, 8};  // T = 4
  const std::vector<int> up = resample_chain(chain, 8);
  CHECK(up.size() == 9);
  for (int k = 0; k <= 4; ++k) CHECK(up[static_cast<size_t>(2 * k)] == chain[static_cast<size_t>(k)]);
  const std::vector<int> down = resample_chain(up, 4);
  CHECK(down == chain);
}

TEST_CASE("enumeration at unit resolution lists all pairs") {
  const Instance inst = interval(2, 1);
  const GeodesicSet all = enumerate_geodesics(inst.space, 1, 1e-9);
  CHECK(all.geodesics.size() == 4);  // both loops and both crossings
  CHECK(!all.truncated);
}

TEST_CASE("generator chains agree with enumeration at T = 1") {
  const Instance inst = interval(4, 1);
  const GeodesicSet enumd = enumerate_geodesics(inst.space, 1, 1e-9);
  CHECK(enumd.geodesics.size() == inst.geodesics.geodesics.size());
  for (const auto& g : inst.geodesics.geodesics) {
    bool found = false;
    for (const auto& h : enumd.geodesics) found = found || h.chain == g.chain;
    CHECK(found);
  }
}

TEST_CASE("generator chains satisfy the advertised speed bound") {
  for (const char* kind : {"interval", "tripod", "grid2d"}) {
    const Instance inst = generate({.kind = kind, .n = 5, .length = 1.0, .weight_id = "uniform", .T = 8});
    for (const auto& g : inst.geodesics.geodesics)
      CHECK(satisfies_speed_bound(inst.space, g.chain, inst.geodesics.epsilon + 1e-12));
  }
}

TEST_CASE("tripod chains through the junction branch") {
  const Instance inst = generate({.kind = "tripod", .n = 4, .length = 1.0, .weight_id = "uniform", .T = 8});
  // two chains leaving the same tip toward different branches split after
  // the junction: the nonbranching check must find a witness
  const int a4 = inst.space.index_of("a4");
  const int b4 = inst.space.index_of("b4");
  const int c4 = inst.space.index_of("c4");
  std::vector<DiscreteGeodesic> pair;
  pair.push_back(inst.geodesics.geodesics[static_cast<size_t>(
      inst.geodesics.by_pair.at({a4, b4}).front())]);
  pair.push_back(inst.geodesics.geodesics[static_cast<size_t>(
      inst.geodesics.by_pair.at({a4, c4}).front())]);
  const BranchWitness w = is_nonbranching(pair);
  CHECK(!w.nonbranching);
  CHECK(w.split_index >= 1);
  // same chains restricted to the shared half are fine
  CHECK(is_nonbranching(std::vector<DiscreteGeodesic>{pair[0]}).nonbranching);
}

TEST_CASE("plan and geodesic-set json round trips") {
  std::mt19937 rng(23);
  const Instance inst = interval(6, 8);
  const DynamicalPlan nu = random_plan(inst, rng);
  const json j = plan_to_json(nu, inst.space);
  const DynamicalPlan back = plan_from_json(j, inst.space);
  REQUIRE(back.atoms.size() == nu.atoms.size());
  for (size_t a = 0; a < nu.atoms.size(); ++a) {
    CHECK(back.atoms[a].geodesic.chain == nu.atoms[a].geodesic.chain);
    CHECK(back.atoms[a].weight == nu.atoms[a].weight);
  }
  const json gj = geoset_to_json(inst.geodesics, inst.space);
  const GeodesicSet gs = geoset_from_json(gj, inst.space);
  CHECK(gs.geodesics.size() == inst.geodesics.geodesics.size());
  CHECK(gs.T == inst.geodesics.T);
  CHECK(gs.by_pair.size() == inst.geodesics.by_pair.size());
}
