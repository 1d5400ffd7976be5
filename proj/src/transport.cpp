#include "otgeo/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "otgeo/errors.hpp"

namespace otgeo {

namespace {

constexpr double kMassEps = 1e-15;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

Measure TransportPlan::row_marginal() const {
  Measure mu = Measure::zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) mu.weights[static_cast<size_t>(i)] += at(i, j);
  return mu;
}

Measure TransportPlan::col_marginal() const {
  Measure mu = Measure::zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) mu.weights[static_cast<size_t>(j)] += at(i, j);
  return mu;
}

std::vector<std::array<double, 3>> TransportPlan::triplets(double threshold) const {
  std::vector<std::array<double, 3>> out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (at(i, j) > threshold)
        out.push_back({static_cast<double>(i), static_cast<double>(j), at(i, j)});
  return out;
}

std::vector<std::pair<int, int>> TransportPlan::support(double threshold) const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (at(i, j) > threshold) out.emplace_back(i, j);
  return out;
}

double TransportSolution::dual_value(const Measure& mu0, const Measure& mu1) const {
  double v = 0.0;
  for (size_t i = 0; i < phi.size(); ++i) v += phi[i] * mu0.weights[i];
  for (size_t j = 0; j < phi_c.size(); ++j) v += phi_c[j] * mu1.weights[j];
  return 2.0 * v;  // half-cost duals against the full d^2 cost
}

// Successive-shortest-path min-cost flow on the dense bipartite instance.
// Nodes: 0 = source, 1..ns = supply points, ns+1..ns+nt = demand points,
// ns+nt+1 = sink. Dijkstra with Johnson potentials keeps reduced costs
// nonnegative; the terminating potentials yield the Kantorovich duals.
TransportSolution solve_w2(const FiniteMetricMeasureSpace& space, const Measure& mu0,
                           const Measure& mu1, double tol_dual) {
  const int n = space.size();
  if (static_cast<int>(mu0.weights.size()) != n || static_cast<int>(mu1.weights.size()) != n)
    throw DimensionMismatch("marginal vs space point count");
  if (!mu0.is_probability() || !mu1.is_probability())
    throw BadMarginal("solve_w2 expects probability marginals");

  const std::vector<int> src = mu0.support();
  const std::vector<int> dst = mu1.support();
  const int ns = static_cast<int>(src.size());
  const int nt = static_cast<int>(dst.size());
  const int V = ns + nt + 2;
  const int S = 0;
  const int T = V - 1;

  // flow i->j (dense ns x nt) and remaining supply/demand
  std::vector<double> flow(static_cast<size_t>(ns) * nt, 0.0);
  std::vector<double> supply(static_cast<size_t>(ns));
  std::vector<double> demand(static_cast<size_t>(nt));
  for (int i = 0; i < ns; ++i) supply[static_cast<size_t>(i)] = mu0.weights[static_cast<size_t>(src[static_cast<size_t>(i)])];
  for (int j = 0; j < nt; ++j) demand[static_cast<size_t>(j)] = mu1.weights[static_cast<size_t>(dst[static_cast<size_t>(j)])];

  auto cost = [&](int i, int j) { return space.d2(src[static_cast<size_t>(i)], dst[static_cast<size_t>(j)]); };

  std::vector<double> pot(static_cast<size_t>(V), 0.0);
  std::vector<double> dist(static_cast<size_t>(V));
  std::vector<int> prev(static_cast<size_t>(V));
  std::vector<char> done(static_cast<size_t>(V));

  double total_supply = 0.0, total_demand = 0.0;
  for (double s : supply) total_supply += s;
  for (double d : demand) total_demand += d;
  double remaining = std::min(total_supply, total_demand);
  // termination at the probability scale: leftover below 1e-12 is marginal
  // roundoff, not unshipped mass
  constexpr double kTermEps = 1e-12;
  // each augmentation exhausts a supply, a demand or an arc residual; the
  // arc term only matters in degenerate instances with heavy cancellation
  int guard = 8 * (ns + nt) + ns * nt + 64;
  while (remaining > kTermEps) {
    if (--guard < 0) throw NumericalFailure("augmentation did not terminate");
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(prev.begin(), prev.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    dist[S] = 0.0;
    for (int it = 0; it < V; ++it) {
      int u = -1;
      for (int v = 0; v < V; ++v)
        if (!done[static_cast<size_t>(v)] && dist[static_cast<size_t>(v)] < kInf &&
            (u < 0 || dist[static_cast<size_t>(v)] < dist[static_cast<size_t>(u)]))
          u = v;
      if (u < 0) break;
      done[static_cast<size_t>(u)] = 1;
      const double du = dist[static_cast<size_t>(u)];
      auto relax = [&](int v, double edge_cost) {
        // roundoff in the clamped potentials can leave reduced costs a few
        // ulp negative; re-relaxing a settled node could knot the prev chain
        if (done[static_cast<size_t>(v)]) return;
        const double nd = du + edge_cost + pot[static_cast<size_t>(u)] - pot[static_cast<size_t>(v)];
        if (nd < dist[static_cast<size_t>(v)] - 1e-18) {
          dist[static_cast<size_t>(v)] = nd;
          prev[static_cast<size_t>(v)] = u;
        }
      };
      if (u == S) {
        for (int i = 0; i < ns; ++i)
          if (supply[static_cast<size_t>(i)] > kMassEps) relax(1 + i, 0.0);
      } else if (u >= 1 && u <= ns) {
        const int i = u - 1;
        for (int j = 0; j < nt; ++j) relax(1 + ns + j, cost(i, j));
      } else if (u >= 1 + ns && u < T) {
        const int j = u - 1 - ns;
        if (demand[static_cast<size_t>(j)] > kMassEps) relax(T, 0.0);
        for (int i = 0; i < ns; ++i)
          if (flow[static_cast<size_t>(i) * nt + j] > kMassEps) relax(1 + i, -cost(i, j));
      }
    }
    if (dist[static_cast<size_t>(T)] >= kInf)
      throw Infeasible("no augmenting path with residual demand");

    // clamp keeps reduced costs nonnegative for nodes the search never reached
    const double dT = dist[static_cast<size_t>(T)];
    for (int v = 0; v < V; ++v)
      pot[static_cast<size_t>(v)] += std::min(dist[static_cast<size_t>(v)], dT);

    double push = remaining;
    for (int v = T; v != S; v = prev[static_cast<size_t>(v)]) {
      const int u = prev[static_cast<size_t>(v)];
      if (u == S)
        push = std::min(push, supply[static_cast<size_t>(v - 1)]);
      else if (v == T)
        push = std::min(push, demand[static_cast<size_t>(u - 1 - ns)]);
      else if (u > ns)  // reverse arc j -> i
        push = std::min(push, flow[static_cast<size_t>(v - 1) * nt + (u - 1 - ns)]);
    }
    if (!(push > 0.0)) throw NumericalFailure("zero augmentation");
    for (int v = T; v != S; v = prev[static_cast<size_t>(v)]) {
      const int u = prev[static_cast<size_t>(v)];
      if (u == S)
        supply[static_cast<size_t>(v - 1)] -= push;
      else if (v == T)
        demand[static_cast<size_t>(u - 1 - ns)] -= push;
      else if (u <= ns)
        flow[static_cast<size_t>(u - 1) * nt + (v - 1 - ns)] += push;
      else
        flow[static_cast<size_t>(v - 1) * nt + (u - 1 - ns)] -= push;
    }
    remaining -= push;
  }

  TransportSolution sol;
  sol.tol_dual = tol_dual;
  sol.plan = TransportPlan::zero(n);
  sol.cost = 0.0;
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < nt; ++j) {
      double f = flow[static_cast<size_t>(i) * nt + j];
      if (f <= kMassEps) continue;
      sol.plan.at(src[static_cast<size_t>(i)], dst[static_cast<size_t>(j)]) = f;
      sol.cost += f * cost(i, j);
    }

  // Full-cost duals u_i = pot[S] - pot[i], v_j = pot[j] - pot[S] satisfy
  // u_i + v_j <= d^2 with equality on flow arcs; halve for the d^2/2 set Gamma.
  sol.phi.assign(static_cast<size_t>(n), 0.0);
  sol.phi_c.assign(static_cast<size_t>(n), 0.0);
  const double base = pot[static_cast<size_t>(S)];
  for (int i = 0; i < ns; ++i)
    sol.phi[static_cast<size_t>(src[static_cast<size_t>(i)])] = 0.5 * (base - pot[static_cast<size_t>(1 + i)]);
  for (int j = 0; j < nt; ++j)
    sol.phi_c[static_cast<size_t>(dst[static_cast<size_t>(j)])] = 0.5 * (pot[static_cast<size_t>(1 + ns + j)] - base);
  // off-support potentials: extend by the tightest admissible value so the
  // dual constraint holds everywhere
  for (int x = 0; x < n; ++x) {
    bool is_src = std::find(src.begin(), src.end(), x) != src.end();
    if (!is_src) {
      double best = kInf;
      for (int j = 0; j < nt; ++j)
        best = std::min(best, 0.5 * space.d2(x, dst[static_cast<size_t>(j)]) -
                                  sol.phi_c[static_cast<size_t>(dst[static_cast<size_t>(j)])]);
      sol.phi[static_cast<size_t>(x)] = best;
    }
    bool is_dst = std::find(dst.begin(), dst.end(), x) != dst.end();
    if (!is_dst) {
      double best = kInf;
      for (int i = 0; i < ns; ++i)
        best = std::min(best, 0.5 * space.d2(src[static_cast<size_t>(i)], x) -
                                  sol.phi[static_cast<size_t>(src[static_cast<size_t>(i)])]);
      sol.phi_c[static_cast<size_t>(x)] = best;
    }
  }
  return sol;
}

ContactSet contact_set(const FiniteMetricMeasureSpace& space, const TransportSolution& sol,
                       double tol_dual) {
  ContactSet cs;
  const int n = space.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double gap = 0.5 * space.d2(i, j) - sol.phi[static_cast<size_t>(i)] -
                         sol.phi_c[static_cast<size_t>(j)];
      if (std::abs(gap) <= tol_dual) {
        cs.pairs.emplace_back(i, j);
        cs.fibers[i].push_back(j);
      }
    }
  return cs;
}

std::vector<int> ContactSet::ambiguous_sources() const {
  std::vector<int> out;
  for (const auto& [x, fiber] : fibers)
    if (fiber.size() > 1) out.push_back(x);
  return out;
}

MonotonicityReport check_cyclical_monotonicity(const FiniteMetricMeasureSpace& space,
                                               const std::vector<std::pair<int, int>>& pairs,
                                               int max_cycle_len, double tol) {
  MonotonicityReport rep;
  rep.max_cycle_len = max_cycle_len;
  const int k = static_cast<int>(pairs.size());
  if (k < 2 || max_cycle_len < 2) return rep;

  // Exchange graph: w(p,q) = d^2(x_p, y_q) - d^2(x_p, y_p). A cycle of
  // total weight < 0 is exactly a cyclical-monotonicity violation.
  std::vector<double> w(static_cast<size_t>(k) * k, 0.0);
  for (int p = 0; p < k; ++p)
    for (int q = 0; q < k; ++q)
      w[static_cast<size_t>(p) * k + q] =
          space.d2(pairs[static_cast<size_t>(p)].first, pairs[static_cast<size_t>(q)].second) -
          space.d2(pairs[static_cast<size_t>(p)].first, pairs[static_cast<size_t>(p)].second);

  // best[len] = min-plus power of w; parent[len] recovers the path.
  std::vector<std::vector<double>> best(static_cast<size_t>(max_cycle_len + 1));
  std::vector<std::vector<int>> parent(static_cast<size_t>(max_cycle_len + 1));
  best[1] = w;
  parent[1].assign(static_cast<size_t>(k) * k, -1);
  for (int len = 2; len <= max_cycle_len; ++len) {
    best[static_cast<size_t>(len)].assign(static_cast<size_t>(k) * k, kInf);
    parent[static_cast<size_t>(len)].assign(static_cast<size_t>(k) * k, -1);
    auto& cur = best[static_cast<size_t>(len)];
    auto& par = parent[static_cast<size_t>(len)];
    const auto& prv = best[static_cast<size_t>(len - 1)];
    for (int p = 0; p < k; ++p)
      for (int r = 0; r < k; ++r) {
        const double head = prv[static_cast<size_t>(p) * k + r];
        if (head >= kInf) continue;
        for (int q = 0; q < k; ++q) {
          const double cand = head + w[static_cast<size_t>(r) * k + q];
          if (cand < cur[static_cast<size_t>(p) * k + q]) {
            cur[static_cast<size_t>(p) * k + q] = cand;
            par[static_cast<size_t>(p) * k + q] = r;
          }
        }
      }
    for (int p = 0; p < k; ++p) {
      const double diag = cur[static_cast<size_t>(p) * k + p];
      if (diag < -tol) {
        rep.monotone = false;
        rep.gain = diag;
        std::vector<int> cycle;
        int node = p;
        for (int l = len; l >= 2; --l) {
          cycle.push_back(node);
          node = parent[static_cast<size_t>(l)][static_cast<size_t>(p) * k + node];
        }
        cycle.push_back(node);
        std::reverse(cycle.begin(), cycle.end());
        rep.cycle = cycle;
        return rep;
      }
    }
  }
  return rep;
}

TransportPlan plan_from_map(const Measure& mu0, const std::vector<int>& map) {
  const int n = static_cast<int>(mu0.weights.size());
  if (static_cast<int>(map.size()) != n) throw DimensionMismatch("map vs measure length");
  TransportPlan plan = TransportPlan::zero(n);
  for (int i = 0; i < n; ++i) {
    const double w = mu0.weights[static_cast<size_t>(i)];
    if (w <= 0.0) continue;
    const int j = map[static_cast<size_t>(i)];
    if (j < 0 || j >= n) throw MapUndefinedOnSupport("source index " + std::to_string(i));
    plan.at(i, j) += w;
  }
  return plan;
}

nlohmann::json solution_to_json(const TransportSolution& sol,
                                const FiniteMetricMeasureSpace& space) {
  nlohmann::json trip = nlohmann::json::array();
  for (const auto& t : sol.plan.triplets())
    trip.push_back({static_cast<int>(t[0]), static_cast<int>(t[1]), t[2]});
  return nlohmann::json{{"space_checksum", space.checksum()},
                        {"cost", sol.cost},
                        {"plan", trip},
                        {"phi", sol.phi},
                        {"phi_c", sol.phi_c},
                        {"tol_dual", sol.tol_dual}};
}

TransportSolution solution_from_json(const nlohmann::json& j,
                                     const FiniteMetricMeasureSpace& space) {
  if (j.at("space_checksum").get<std::string>() != space.checksum())
    throw ChecksumMismatch("solution file does not match the supplied space");
  TransportSolution sol;
  sol.cost = j.at("cost").get<double>();
  sol.phi = j.at("phi").get<std::vector<double>>();
  sol.phi_c = j.at("phi_c").get<std::vector<double>>();
  sol.tol_dual = j.at("tol_dual").get<double>();
  sol.plan = TransportPlan::zero(space.size());
  for (const auto& t : j.at("plan"))
    sol.plan.at(t[0].get<int>(), t[1].get<int>()) = t[2].get<double>();
  return sol;
}

}  // namespace otgeo
