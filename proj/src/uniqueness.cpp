#include "otgeo/uniqueness.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "otgeo/errors.hpp"
#include "otgeo/simplex.hpp"

namespace otgeo {

std::vector<int> MapExtraction::resolved_map() const {
  std::vector<int> out = map;
  for (const auto& [x, fiber] : fibers)
    if (out[static_cast<size_t>(x)] < 0 && !fiber.empty()) out[static_cast<size_t>(x)] = fiber.front();
  return out;
}

MapExtraction extract_optimal_map(const FiniteMetricMeasureSpace& space, const Measure& mu0,
                                  const Measure& mu1, double tol_dual) {
  MapExtraction ext;
  ext.tol_dual = tol_dual;
  ext.solution = solve_w2(space, mu0, mu1, tol_dual);
  const ContactSet cs = contact_set(space, ext.solution, tol_dual);

  // The tight set of any one optimal dual over-approximates the union of
  // optimal supports: a zero-mass tight cell (x,y) belongs to some optimal
  // plan only if mass can be rerouted to it, i.e. y reaches x in the
  // residual graph (target -> source along positive plan entries, source ->
  // target along tight cells). Prune fibers to these usable cells so the
  // ambiguous set does not depend on which optimal dual the solver returned.
  const std::vector<int> srcs = mu0.support();
  const std::vector<int> dsts = mu1.support();
  constexpr double kFlowEps = 1e-12;
  std::map<int, std::vector<int>> tight;  // source -> tight targets
  for (int x : srcs) {
    auto it = cs.fibers.find(x);
    if (it == cs.fibers.end()) continue;
    for (int y : it->second)
      if (mu1.weights[static_cast<size_t>(y)] > kFlowEps) tight[x].push_back(y);
  }
  std::map<int, std::vector<int>> usable;  // source -> optimal-face targets
  for (int y0 : dsts) {
    std::vector<int> stack{y0};
    std::map<int, bool> seen_t{{y0, true}};
    std::map<int, bool> seen_s;
    while (!stack.empty()) {
      const int y = stack.back();
      stack.pop_back();
      for (int x : srcs) {
        if (ext.solution.plan.at(x, y) <= kFlowEps || seen_s.count(x)) continue;
        seen_s[x] = true;
        for (int y2 : tight[x])
          if (!seen_t.count(y2)) {
            seen_t[y2] = true;
            stack.push_back(y2);
          }
      }
    }
    for (const auto& [x, ok] : seen_s)
      if (ok) usable[x].push_back(y0);
  }

  ext.map.assign(static_cast<size_t>(space.size()), -1);
  for (int x : srcs) {
    std::vector<int> fiber;
    for (int y : tight[x]) {
      const bool carries = ext.solution.plan.at(x, y) > kFlowEps;
      const auto& ys = usable[x];
      if (carries || std::find(ys.begin(), ys.end(), y) != ys.end()) fiber.push_back(y);
    }
    std::sort(fiber.begin(), fiber.end());
    if (fiber.size() == 1) {
      ext.map[static_cast<size_t>(x)] = fiber.front();
    } else {
      ext.ambiguous.push_back(x);
      ext.ambiguous_mass += mu0.weights[static_cast<size_t>(x)];
    }
    ext.fibers[x] = std::move(fiber);
  }
  return ext;
}

UniquenessCertificate certify_unique_plan(const FiniteMetricMeasureSpace& space,
                                          const Measure& mu0, const Measure& mu1, double tol,
                                          const GeodesicSet* geodesics, int probe_cap) {
  UniquenessCertificate cert;
  const TransportSolution sol = solve_w2(space, mu0, mu1, tol);
  cert.witness_a = sol.plan;

  const std::vector<int> src = mu0.support();
  const std::vector<int> dst = mu1.support();
  // tight cells of the terminating duals; every optimal plan lives on them
  std::vector<std::pair<int, int>> cells;
  for (int i : src)
    for (int j : dst)
      if (std::abs(0.5 * space.d2(i, j) - sol.phi[static_cast<size_t>(i)] -
                   sol.phi_c[static_cast<size_t>(j)]) <= tol)
        cells.emplace_back(i, j);

  const int z = static_cast<int>(cells.size());
  LinearProgram base;
  base.num_vars = z;
  base.objective.assign(static_cast<size_t>(z), 0.0);
  for (int i : src) {
    auto& row = base.add_row(LinearProgram::EQ, mu0.weights[static_cast<size_t>(i)]);
    for (int c = 0; c < z; ++c)
      if (cells[static_cast<size_t>(c)].first == i) row.coeffs.emplace_back(c, 1.0);
  }
  for (int j : dst) {
    auto& row = base.add_row(LinearProgram::EQ, mu1.weights[static_cast<size_t>(j)]);
    for (int c = 0; c < z; ++c)
      if (cells[static_cast<size_t>(c)].second == j) row.coeffs.emplace_back(c, 1.0);
  }

  for (int c = 0; c < z; ++c) {
    const auto [i, j] = cells[static_cast<size_t>(c)];
    if (sol.plan.at(i, j) > tol) continue;  // already carries mass
    if (cert.probes_used >= probe_cap) {
      cert.verdict = UniquenessCertificate::INCONCLUSIVE;
      return cert;
    }
    LinearProgram lp = base;
    lp.objective[static_cast<size_t>(c)] = -1.0;  // maximize x_c
    ++cert.probes_used;
    const LpResult res = lp_solve(lp);
    if (res.status != LpResult::OPTIMAL) continue;
    if (-res.objective > 10.0 * tol) {
      cert.verdict = UniquenessCertificate::MULTIPLE;
      cert.witness_b = TransportPlan::zero(space.size());
      for (int c2 = 0; c2 < z; ++c2)
        cert.witness_b.at(cells[static_cast<size_t>(c2)].first, cells[static_cast<size_t>(c2)].second) =
            res.x[static_cast<size_t>(c2)];
      return cert;
    }
  }

  if (geodesics) {
    for (const auto& [i, j] : sol.plan.support(tol)) {
      auto it = geodesics->by_pair.find({i, j});
      if (it != geodesics->by_pair.end() && it->second.size() >= 2) {
        cert.dynamical_multiplicity = true;
        cert.multi_pair = {i, j};
        cert.verdict = UniquenessCertificate::MULTIPLE;
        cert.witness_b = cert.witness_a;
        return cert;
      }
    }
  }
  cert.verdict = UniquenessCertificate::UNIQUE;
  return cert;
}

BranchingWitness build_mixing_plan(const DynamicalPlan& nu1, const DynamicalPlan& nu2,
                                   int tau_index, const FiniteMetricMeasureSpace& space) {
  if (nu1.time_resolution != nu2.time_resolution)
    throw ResamplingRequired("mixing inputs must share a time grid");
  const int T = nu1.time_resolution;
  if (tau_index <= 0 || tau_index >= T) throw OffGridTime("tau must be interior");

  const Measure start1 = evaluate(nu1, 0, space);
  const Measure start2 = evaluate(nu2, 0, space);
  for (int i = 0; i < space.size(); ++i)
    if (std::abs(start1.weights[static_cast<size_t>(i)] - start2.weights[static_cast<size_t>(i)]) > 1e-12)
      throw MarginalMismatch("plans start from different measures");

  const Measure at1 = evaluate(nu1, tau_index, space);
  const Measure at2 = evaluate(nu2, tau_index, space);
  double overlap = 0.0;
  for (int i = 0; i < space.size(); ++i)
    if (at1.weights[static_cast<size_t>(i)] > 0.0 && at2.weights[static_cast<size_t>(i)] > 0.0)
      overlap += space.m(i);
  if (!(overlap > 0.0)) throw NoOverlapAtTau("supports at tau are m-disjoint");

  auto average = [](const DynamicalPlan& a, const DynamicalPlan& b) {
    DynamicalPlan out;
    out.time_resolution = a.time_resolution;
    out.epsilon = std::max(a.epsilon, b.epsilon);
    for (const auto& atom : a.atoms) out.atoms.push_back(PlanAtom{atom.geodesic, 0.5 * atom.weight});
    for (const auto& atom : b.atoms) out.atoms.push_back(PlanAtom{atom.geodesic, 0.5 * atom.weight});
    return out;
  };
  const DynamicalPlan left =
      average(restrict_plan(nu1, 0, tau_index, space), restrict_plan(nu2, 0, tau_index, space));
  const DynamicalPlan right =
      average(restrict_plan(nu1, tau_index, T, space), restrict_plan(nu2, tau_index, T, space));

  BranchingWitness bw;
  bw.tau_index = tau_index;
  bw.mix = glue_plans(left, right, space);
  bw.witness = is_nonbranching(bw.mix);
  bw.cost_mix = plan_cost(bw.mix);
  bw.cost_avg = 0.5 * (plan_cost(nu1) + plan_cost(nu2));
  return bw;
}

StepwiseExtraction stepwise_map_extraction(const FiniteMetricMeasureSpace& space,
                                           const std::vector<std::vector<int>>& patches,
                                           const Measure& mu0, const Measure& mu1, double step,
                                           const GeodesicSet& geodesics, double tol_dual) {
  if (!(step > 0.0 && step <= 1.0)) throw InvalidParameter("step must lie in (0,1]");
  std::vector<int> all(static_cast<size_t>(space.size()));
  for (int i = 0; i < space.size(); ++i) all[static_cast<size_t>(i)] = i;
  const double diam_space = diameter(space, all);

  // discrete Lebesgue condition: every ball of radius step*diam fits a patch
  const double delta = step * diam_space;
  for (int x = 0; x < space.size(); ++x) {
    bool covered = false;
    for (const auto& patch : patches) {
      bool inside = true;
      for (int y = 0; y < space.size() && inside; ++y)
        if (space.d(x, y) <= delta &&
            std::find(patch.begin(), patch.end(), y) == patch.end())
          inside = false;
      if (inside && std::find(patch.begin(), patch.end(), x) != patch.end()) {
        covered = true;
        break;
      }
    }
    if (!covered) throw CoveringGap("ball at point index " + std::to_string(x));
  }

  // reference dynamical plan along the optimal coupling
  const TransportSolution sol = solve_w2(space, mu0, mu1, tol_dual);
  DynamicalPlan nu;
  nu.time_resolution = geodesics.T;
  nu.epsilon = geodesics.epsilon;
  for (const auto& [i, j] : sol.plan.support(0.0)) {
    auto it = geodesics.by_pair.find({i, j});
    if (it == geodesics.by_pair.end() || it->second.empty())
      throw InsufficientGeodesics("no chain for support pair");
    nu.atoms.push_back(PlanAtom{geodesics.geodesics[static_cast<size_t>(it->second.front())],
                                sol.plan.at(i, j)});
  }

  std::vector<int> support0 = mu0.support();
  std::vector<int> support1 = mu1.support();
  std::vector<int> both = support0;
  both.insert(both.end(), support1.begin(), support1.end());
  const double D = diameter(space, both);

  const int T = geodesics.T;
  int dk = D > 0.0 ? static_cast<int>(std::floor(T * step / (5.0 * D))) : T;
  dk = std::max(1, std::min(dk, T));

  StepwiseExtraction out;
  out.map.assign(static_cast<size_t>(space.size()), -1);
  for (int i : support0) out.map[static_cast<size_t>(i)] = i;

  for (int k = 0; k < T; k += dk) {
    const int next = std::min(k + dk, T);
    const Measure ma = evaluate(nu, k, space);
    const Measure mb = evaluate(nu, next, space);
    MapExtraction hop = extract_optimal_map(space, ma, mb, tol_dual);
    out.hop_ambiguous_mass.push_back(hop.ambiguous_mass);
    const std::vector<int> hop_map = hop.resolved_map();
    // each hop must act within a patch
    for (int x : ma.support()) {
      const int y = hop_map[static_cast<size_t>(x)];
      bool ok = false;
      for (const auto& patch : patches)
        if (std::find(patch.begin(), patch.end(), x) != patch.end() &&
            std::find(patch.begin(), patch.end(), y) != patch.end()) {
          ok = true;
          break;
        }
      if (!ok) throw CoveringGap("hop pair leaves every patch");
    }
    for (int i : support0) {
      int& cur = out.map[static_cast<size_t>(i)];
      if (cur >= 0) cur = hop_map[static_cast<size_t>(cur)];
    }
    ++out.hops;
  }
  return out;
}

nlohmann::json map_to_json(const MapExtraction& ext, const FiniteMetricMeasureSpace& space) {
  nlohmann::json pairs = nlohmann::json::array();
  for (size_t i = 0; i < ext.map.size(); ++i)
    if (ext.map[i] >= 0) pairs.push_back({static_cast<int>(i), ext.map[i]});
  return nlohmann::json{{"space_checksum", space.checksum()},
                        {"pairs", pairs},
                        {"ambiguous", ext.ambiguous},
                        {"ambiguous_mass", ext.ambiguous_mass}};
}

}  // namespace otgeo
