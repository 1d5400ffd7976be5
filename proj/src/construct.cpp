#include "otgeo/construct.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "otgeo/errors.hpp"
#include "otgeo/functionals.hpp"
#include "otgeo/simplex.hpp"
#include "otgeo/transport.hpp"

namespace otgeo {

namespace {

constexpr double kWeightFloor = 1e-14;
constexpr double kGradFloor = 1e-12;
constexpr int kParcelCap = 20000;

// marginal + cost-equality rows over the chain weights; extra_vars appended
// after the chain block
LinearProgram base_lp(const IntermediatePolytope& poly, int extra_vars) {
  const int z = static_cast<int>(poly.chains.size());
  LinearProgram lp;
  lp.num_vars = z + extra_vars;
  lp.objective.assign(static_cast<size_t>(lp.num_vars), 0.0);
  for (int i : poly.mu0.support()) {
    auto& row = lp.add_row(LinearProgram::EQ, poly.mu0.weights[static_cast<size_t>(i)]);
    for (int c = 0; c < z; ++c)
      if (poly.chains[static_cast<size_t>(c)].start == i) row.coeffs.emplace_back(c, 1.0);
  }
  for (int j : poly.mu1.support()) {
    auto& row = lp.add_row(LinearProgram::EQ, poly.mu1.weights[static_cast<size_t>(j)]);
    for (int c = 0; c < z; ++c)
      if (poly.chains[static_cast<size_t>(c)].end == j) row.coeffs.emplace_back(c, 1.0);
  }
  auto& cost = lp.add_row(LinearProgram::EQ, poly.w2sq);
  for (int c = 0; c < z; ++c) {
    const double l = poly.chains[static_cast<size_t>(c)].geo.length;
    cost.coeffs.emplace_back(c, l * l);
  }
  return lp;
}

int chain_position(const IntermediatePolytope& poly, int c) {
  return poly.chains[static_cast<size_t>(c)].geo.chain[static_cast<size_t>(poly.k_lambda)];
}

std::vector<double> solve_or_throw(const LinearProgram& lp) {
  const LpResult res = lp_solve(lp);
  if (res.status == LpResult::INFEASIBLE) throw InfeasiblePolytope();
  if (res.status != LpResult::OPTIMAL) throw NumericalFailure("polytope LP did not terminate");
  return res.x;
}

}  // namespace

IntermediatePolytope build_intermediate_polytope(const FiniteMetricMeasureSpace& space,
                                                 const GeodesicSet& geodesics, const Measure& mu0,
                                                 const Measure& mu1, int lambda_num,
                                                 int lambda_den) {
  if (lambda_num <= 0 || lambda_num >= lambda_den)
    throw InvalidParameter("lambda must lie strictly inside (0,1)");
  if ((static_cast<long long>(geodesics.T) * lambda_num) % lambda_den != 0)
    throw OffGridTime("lambda * T is not an integer grid index");

  IntermediatePolytope poly;
  poly.T = geodesics.T;
  poly.k_lambda = static_cast<int>(static_cast<long long>(geodesics.T) * lambda_num / lambda_den);
  poly.mu0 = mu0;
  poly.mu1 = mu1;
  poly.epsilon = geodesics.epsilon;

  const TransportSolution sol = solve_w2(space, mu0, mu1);
  poly.w2sq = sol.cost;

  // chains that agree at the query time are interchangeable for every
  // functional of e_lambda; keeping one per landing point avoids degenerate
  // directions in the downstream optimizations
  for (int i : mu0.support())
    for (int j : mu1.support()) {
      auto it = geodesics.by_pair.find({i, j});
      if (it == geodesics.by_pair.end()) continue;
      std::vector<int> seen;
      for (int g : it->second) {
        const int pos =
            geodesics.geodesics[static_cast<size_t>(g)].chain[static_cast<size_t>(poly.k_lambda)];
        if (std::find(seen.begin(), seen.end(), pos) != seen.end()) continue;
        seen.push_back(pos);
        poly.chains.push_back({geodesics.geodesics[static_cast<size_t>(g)], i, j});
      }
    }
  for (const auto& [i, j] : sol.plan.support(0.0))
    if (geodesics.by_pair.find({i, j}) == geodesics.by_pair.end() ||
        geodesics.by_pair.at({i, j}).empty())
      throw InsufficientGeodesics("optimal pair without a chain");
  return poly;
}

Measure eval_lambda(const IntermediatePolytope& poly, const std::vector<double>& weights,
                    const FiniteMetricMeasureSpace& space) {
  Measure eta = Measure::zero(space.size());
  for (size_t c = 0; c < poly.chains.size(); ++c)
    eta.weights[static_cast<size_t>(chain_position(poly, static_cast<int>(c)))] += weights[c];
  return eta;
}

DynamicalPlan plan_from_weights(const IntermediatePolytope& poly,
                                const std::vector<double>& weights, double threshold) {
  DynamicalPlan nu;
  nu.time_resolution = poly.T;
  nu.epsilon = poly.epsilon;
  for (size_t c = 0; c < poly.chains.size(); ++c)
    if (weights[c] > threshold) nu.atoms.push_back(PlanAtom{poly.chains[c].geo, weights[c]});
  return nu;
}

double lambda_split_defect(const FiniteMetricMeasureSpace& space, const IntermediatePolytope& poly,
                           const Measure& eta) {
  const double w2 = std::sqrt(poly.w2sq);
  const double lambda = static_cast<double>(poly.k_lambda) / poly.T;
  const double left = std::sqrt(solve_w2(space, poly.mu0, eta).cost);
  const double right = std::sqrt(solve_w2(space, eta, poly.mu1).cost);
  return std::abs(left - lambda * w2) + std::abs(right - (1.0 - lambda) * w2);
}

ExcessResult minimize_excess(const IntermediatePolytope& poly,
                             const FiniteMetricMeasureSpace& space, double C) {
  if (!(C >= 0.0)) throw InvalidParameter("excess cap must be nonnegative");
  const int z = static_cast<int>(poly.chains.size());

  // positions reachable at the query time, split by m > 0
  std::vector<int> ac_positions;
  for (int c = 0; c < z; ++c) {
    const int pos = chain_position(poly, c);
    if (space.in_support(pos) &&
        std::find(ac_positions.begin(), ac_positions.end(), pos) == ac_positions.end())
      ac_positions.push_back(pos);
  }
  std::sort(ac_positions.begin(), ac_positions.end());

  const int nu = static_cast<int>(ac_positions.size());
  LinearProgram lp = base_lp(poly, nu);
  for (int u = 0; u < nu; ++u) {
    const int pos = ac_positions[static_cast<size_t>(u)];
    const double m = space.m(pos);
    auto& row = lp.add_row(LinearProgram::LE, C * m);
    for (int c = 0; c < z; ++c)
      if (chain_position(poly, c) == pos) row.coeffs.emplace_back(c, 1.0);
    row.coeffs.emplace_back(z + u, -m);
    lp.objective[static_cast<size_t>(z + u)] = m;
  }
  for (int c = 0; c < z; ++c)
    if (!space.in_support(chain_position(poly, c)))
      lp.objective[static_cast<size_t>(c)] = 1.0;  // singular landing mass

  const std::vector<double> x = solve_or_throw(lp);
  ExcessResult res;
  res.weights.assign(x.begin(), x.begin() + z);
  res.eta = eval_lambda(poly, res.weights, space);
  res.value = excess_mass(res.eta, space, C);
  return res;
}

EntropyResult maximize_entropy(const IntermediatePolytope& poly,
                               const FiniteMetricMeasureSpace& space, double N, double C_cap,
                               double tol_entropy, int max_iter) {
  if (!(N >= 1.0)) throw InvalidParameter("entropy order must be >= 1");
  const int z = static_cast<int>(poly.chains.size());

  std::vector<int> ac_positions;
  for (int c = 0; c < z; ++c) {
    const int pos = chain_position(poly, c);
    if (space.in_support(pos) &&
        std::find(ac_positions.begin(), ac_positions.end(), pos) == ac_positions.end())
      ac_positions.push_back(pos);
  }
  std::sort(ac_positions.begin(), ac_positions.end());
  const int nu = static_cast<int>(ac_positions.size());

  auto add_cap_rows = [&](LinearProgram& lp) {
    if (C_cap < 0.0) return;
    for (int pos : ac_positions) {
      auto& row = lp.add_row(LinearProgram::LE, C_cap * space.m(pos));
      for (int c = 0; c < z; ++c)
        if (chain_position(poly, c) == pos) row.coeffs.emplace_back(c, 1.0);
    }
    auto& sing = lp.add_row(LinearProgram::EQ, 0.0);
    for (int c = 0; c < z; ++c)
      if (!space.in_support(chain_position(poly, c))) sing.coeffs.emplace_back(c, 1.0);
  };

  EntropyResult res;

  if (N == 1.0) {
    // support-spreading surrogate: reward every m-positive cell holding more
    // than kappa of mass, up to its reference weight
    const double kappa = 1e-6;
    LinearProgram lp = base_lp(poly, nu);
    add_cap_rows(lp);
    for (int u = 0; u < nu; ++u) {
      const int pos = ac_positions[static_cast<size_t>(u)];
      auto& bound = lp.add_row(LinearProgram::LE, space.m(pos));
      bound.coeffs.emplace_back(z + u, 1.0);
      auto& link = lp.add_row(LinearProgram::LE, 0.0);
      link.coeffs.emplace_back(z + u, kappa);
      for (int c = 0; c < z; ++c)
        if (chain_position(poly, c) == pos) link.coeffs.emplace_back(c, -1.0);
      lp.objective[static_cast<size_t>(z + u)] = -1.0;
    }
    const std::vector<double> x = solve_or_throw(lp);
    res.weights.assign(x.begin(), x.begin() + z);
    res.eta = eval_lambda(poly, res.weights, space);
    res.value = renyi_entropy(res.eta, space, 1.0);
    res.iterations = 1;
    return res;
  }

  LinearProgram lp = base_lp(poly, 0);
  add_cap_rows(lp);
  std::vector<double> w = solve_or_throw(lp);

  auto entropy_of = [&](const std::vector<double>& weights) {
    return renyi_entropy(eval_lambda(poly, weights, space), space, N);
  };

  std::vector<double> grad(static_cast<size_t>(z), 0.0);
  for (int it = 0; it < max_iter; ++it) {
    const Measure eta = eval_lambda(poly, w, space);
    for (int c = 0; c < z; ++c) {
      const int pos = chain_position(poly, c);
      if (!space.in_support(pos)) {
        grad[static_cast<size_t>(c)] = 0.0;
        continue;
      }
      const double mass = std::max(eta.weights[static_cast<size_t>(pos)], kGradFloor);
      grad[static_cast<size_t>(c)] =
          (1.0 - 1.0 / N) * std::pow(mass, -1.0 / N) * std::pow(space.m(pos), 1.0 / N);
    }
    LinearProgram oracle = base_lp(poly, 0);
    add_cap_rows(oracle);
    for (int c = 0; c < z; ++c) oracle.objective[static_cast<size_t>(c)] = -grad[static_cast<size_t>(c)];
    const std::vector<double> s = solve_or_throw(oracle);
    double gap = 0.0;
    for (int c = 0; c < z; ++c)
      gap += grad[static_cast<size_t>(c)] * (s[static_cast<size_t>(c)] - w[static_cast<size_t>(c)]);
    res.iterations = it + 1;
    res.gap = gap;
    if (gap < tol_entropy) {
      // tied oracle vertex with a different image hints at a non-unique face
      const Measure alt = eval_lambda(poly, s, space);
      double diff = 0.0;
      for (size_t i = 0; i < alt.weights.size(); ++i)
        diff = std::max(diff, std::abs(alt.weights[i] - eta.weights[i]));
      res.maybe_nonunique = diff > 1e-8;
      res.weights = w;
      res.eta = eta;
      res.value = renyi_entropy(eta, space, N);
      return res;
    }
    // exact line search on the concave 1-d section
    double lo = 0.0, hi = 1.0;
    for (int ls = 0; ls < 100; ++ls) {
      const double a = lo + (hi - lo) / 3.0;
      const double b = hi - (hi - lo) / 3.0;
      std::vector<double> wa = w, wb = w;
      for (int c = 0; c < z; ++c) {
        wa[static_cast<size_t>(c)] += a * (s[static_cast<size_t>(c)] - w[static_cast<size_t>(c)]);
        wb[static_cast<size_t>(c)] += b * (s[static_cast<size_t>(c)] - w[static_cast<size_t>(c)]);
      }
      if (entropy_of(wa) < entropy_of(wb))
        lo = a;
      else
        hi = b;
    }
    const double alpha = 0.5 * (lo + hi);
    for (int c = 0; c < z; ++c)
      w[static_cast<size_t>(c)] += alpha * (s[static_cast<size_t>(c)] - w[static_cast<size_t>(c)]);
  }
  throw NoConvergence("entropy maximization: " + std::to_string(max_iter) +
                      " iterations, gap " + std::to_string(res.gap));
}

namespace {

struct Parcel {
  std::vector<int> chain;
  double weight = 0.0;
};

long long ipow(long long b, int e) {
  long long r = 1;
  for (int i = 0; i < e; ++i) {
    r *= b;
    if (r > 100000000LL) throw InvalidParameter("global time grid too fine");
  }
  return r;
}

}  // namespace

GoodGeodesicResult good_geodesic_to_dirac(const FiniteMetricMeasureSpace& space,
                                          const GeodesicSet& geodesics, const Measure& mu0,
                                          int o, double K, double N, int lambda_num,
                                          int lambda_den, int depth) {
  const int n = space.size();
  if (o < 0 || o >= n) throw InvalidParameter("target point out of range");
  if (depth < 1) throw InvalidParameter("depth must be >= 1");
  if (!mu0.is_probability()) throw BadMarginal("mu0 must be a probability measure");
  const Decomposition dec0 = decompose(mu0, space);
  if (dec0.singular_mass > 1e-12) throw BadMarginal("mu0 must be absolutely continuous");
  const int p = lambda_num, q = lambda_den;
  if (p <= 0 || p >= q) throw InvalidParameter("lambda must lie strictly inside (0,1)");

  std::vector<int> supp_union = mu0.support();
  supp_union.push_back(o);
  const double D = diameter(space, supp_union);
  const double kminus = K < 0.0 ? -K : 0.0;
  const double lambda = static_cast<double>(p) / q;

  GoodGeodesicReport rep;
  rep.K = K;
  rep.N = N;
  rep.D = D;
  rep.lambda = lambda;
  rep.depth = depth;
  rep.linf0 = dec0.linf();
  rep.entropy0 = renyi_entropy(dec0, space, N);
  const int Tg = geodesics.T;
  const long long T_glob = Tg * ipow(q, depth);
  rep.T_global = static_cast<int>(T_glob);

  rep.times.push_back(0.0);
  rep.time_indices.push_back(0);
  rep.measures.push_back(mu0);
  rep.linf.push_back(rep.linf0);
  rep.linf_margin.push_back(0.0);
  rep.entropy_margin.push_back(0.0);
  rep.fc_check.push_back(0.0);

  const double cap_factor = density_cap(K, N, D, lambda);

  std::vector<Parcel> parcels;
  Measure cur = mu0;
  double linf_prev = rep.linf0;
  long long global_index = 0;

  for (int level = 1; level <= depth; ++level) {
    IntermediatePolytope poly =
        build_intermediate_polytope(space, geodesics, cur, Measure::dirac(n, o), p, q);
    // the per-level density cap is what keeps the L-infinity ladder tight:
    // without it the maximizer may pick an equally-entropic vertex that
    // piles several cells' mass onto one grid point
    EntropyResult ent;
    try {
      ent = maximize_entropy(poly, space, N, cap_factor * linf_prev * (1.0 + 1e-9));
    } catch (const InfeasiblePolytope&) {
      // grid parity can make the exact cap unattainable; fall back to the
      // unconstrained maximizer and let fc_check record the overshoot
      ent = maximize_entropy(poly, space, N);
    }

    const bool last = level == depth;
    // segment step count on the global grid; the last level carries its tail
    const long long seg_steps =
        last ? Tg * static_cast<long long>(q) * ipow(q - p, depth - 1)
             : Tg * static_cast<long long>(p) * ipow(q - p, level - 1) * ipow(q, depth - level);

    std::vector<Parcel> next;
    auto extend = [&](const Parcel* base, const std::vector<int>& seg, double weight) {
      Parcel np;
      if (base) {
        np.chain = base->chain;
        np.chain.insert(np.chain.end(), seg.begin() + 1, seg.end());
      } else {
        np.chain = seg;
      }
      np.weight = weight;
      next.push_back(std::move(np));
      if (static_cast<int>(next.size()) > kParcelCap)
        throw CapExceeded("parcel composition grew beyond the cap");
    };

    // group the level atoms by start point
    std::map<int, std::vector<std::pair<std::vector<int>, double>>> by_start;
    for (size_t c = 0; c < poly.chains.size(); ++c) {
      const double wgt = ent.weights[c];
      if (wgt <= kWeightFloor) continue;
      const auto& full = poly.chains[c].geo.chain;
      std::vector<int> part =
          last ? full : std::vector<int>(full.begin(), full.begin() + poly.k_lambda + 1);
      by_start[poly.chains[c].start].emplace_back(
          resample_chain(part, static_cast<int>(seg_steps)), wgt);
    }

    if (level == 1) {
      for (const auto& [x, atoms] : by_start)
        for (const auto& [seg, wgt] : atoms) extend(nullptr, seg, wgt);
    } else {
      std::vector<Parcel> prev = std::move(parcels);
      for (const auto& par : prev) {
        const int x = par.chain.back();
        auto it = by_start.find(x);
        if (it == by_start.end()) throw NumericalFailure("parcel endpoint lost between levels");
        const double denom = cur.weights[static_cast<size_t>(x)];
        for (const auto& [seg, wgt] : it->second) extend(&par, seg, par.weight * wgt / denom);
      }
    }
    parcels = std::move(next);

    cur = ent.eta;
    global_index += last ? Tg * static_cast<long long>(p) * ipow(q - p, depth - 1)
                         : Tg * static_cast<long long>(p) * ipow(q - p, level - 1) *
                               ipow(q, depth - level);

    const double t = static_cast<double>(global_index) / T_glob;
    const Decomposition dec = decompose(cur, space);
    const double linf_t = dec.linf();
    const double bound =
        std::pow(1.0 - t, -N) * std::exp(D * t * std::sqrt((N - 1.0) * kminus)) * rep.linf0;
    const double ent_lower = (1.0 - t) * std::exp(-D * t * std::sqrt((N - 1.0) * kminus) / N);
    rep.times.push_back(t);
    rep.time_indices.push_back(static_cast<int>(global_index));
    rep.measures.push_back(cur);
    rep.linf.push_back(linf_t);
    rep.linf_margin.push_back(1.0 - linf_t / bound);
    rep.entropy_margin.push_back(renyi_entropy(dec, space, N) / rep.entropy0 - ent_lower);
    rep.fc_check.push_back(excess_mass(dec, space, cap_factor * linf_prev));
    linf_prev = linf_t;
  }

  GoodGeodesicResult out;
  out.report = std::move(rep);
  out.plan.time_resolution = static_cast<int>(T_glob);
  double worst = 0.0;
  for (auto& par : parcels) {
    PlanAtom atom{make_geodesic(space, std::move(par.chain)), par.weight};
    worst = std::max(worst, atom.geodesic.slack);
    out.plan.atoms.push_back(std::move(atom));
  }
  out.plan.epsilon = worst;
  out.report.epsilon = worst;
  return out;
}

FiniteDiracsResult good_geodesic_to_finite_diracs(const FiniteMetricMeasureSpace& space,
                                                  const GeodesicSet& geodesics,
                                                  const Measure& mu0,
                                                  const std::vector<std::pair<int, double>>& atoms,
                                                  double K, double N, int lambda_num,
                                                  int lambda_den, int depth) {
  const int n = space.size();
  if (atoms.empty()) throw InvalidParameter("need at least one target atom");
  double total = 0.0;
  for (size_t a = 0; a < atoms.size(); ++a) {
    total += atoms[a].second;
    for (size_t b = a + 1; b < atoms.size(); ++b)
      if (atoms[a].first == atoms[b].first) throw InvalidParameter("duplicate target atom");
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidParameter("atom masses must sum to 1");

  Measure mu1 = Measure::zero(n);
  for (const auto& [x, w] : atoms) mu1.weights[static_cast<size_t>(x)] = w;

  FiniteDiracsResult out;
  out.extraction = extract_optimal_map(space, mu0, mu1);
  if (out.extraction.ambiguous_mass > 2.0 / n)
    throw MapExtractionFailed("fiber ambiguity carries mass " +
                              std::to_string(out.extraction.ambiguous_mass));
  const std::vector<int> tmap = out.extraction.resolved_map();

  std::vector<std::vector<Measure>> fiber_measures;  // per fiber, per time
  std::vector<double> fiber_mass;
  bool first = true;
  for (const auto& [x, w] : atoms) {
    Measure part = Measure::zero(n);
    double mass = 0.0;
    for (int i : mu0.support())
      if (tmap[static_cast<size_t>(i)] == x) {
        part.weights[static_cast<size_t>(i)] = mu0.weights[static_cast<size_t>(i)];
        mass += mu0.weights[static_cast<size_t>(i)];
      }
    if (mass <= 0.0) continue;
    for (double& v : part.weights) v /= mass;

    GoodGeodesicResult fiber =
        good_geodesic_to_dirac(space, geodesics, part, x, K, N, lambda_num, lambda_den, depth);
    out.fiber_reports.push_back(fiber.report);
    fiber_mass.push_back(mass);
    fiber_measures.push_back(fiber.report.measures);
    if (first) {
      out.plan.time_resolution = fiber.plan.time_resolution;
      first = false;
    }
    for (const auto& atom : fiber.plan.atoms)
      out.plan.atoms.push_back(PlanAtom{atom.geodesic, atom.weight * mass});
    out.plan.epsilon = std::max(out.plan.epsilon, fiber.plan.epsilon);
  }
  if (out.fiber_reports.empty()) throw BadMarginal("mu0 carries no mass");

  // aggregate report against the full-mu0 bounds
  const Decomposition dec0 = decompose(mu0, space);
  std::vector<int> supp_union = mu0.support();
  for (const auto& [x, w] : atoms) supp_union.push_back(x);
  const double D = diameter(space, supp_union);
  const double kminus = K < 0.0 ? -K : 0.0;

  GoodGeodesicReport& rep = out.report;
  rep = out.fiber_reports.front();
  rep.D = D;
  rep.linf0 = dec0.linf();
  rep.entropy0 = renyi_entropy(dec0, space, N);
  rep.measures.clear();
  rep.linf.clear();
  rep.linf_margin.clear();
  rep.entropy_margin.clear();
  rep.fc_check.clear();

  const size_t n_times = out.fiber_reports.front().times.size();
  for (size_t ti = 0; ti < n_times; ++ti) {
    Measure mix = Measure::zero(n);
    double worst_overlap = 0.0;
    double entropy_sum = 0.0;
    for (size_t f = 0; f < fiber_measures.size(); ++f) {
      const Measure& mf = fiber_measures[f][ti];
      for (int i = 0; i < n; ++i)
        mix.weights[static_cast<size_t>(i)] += fiber_mass[f] * mf.weights[static_cast<size_t>(i)];
      entropy_sum += std::pow(fiber_mass[f], 1.0 - 1.0 / N) * renyi_entropy(mf, space, N);
      for (size_t g = 0; g < f; ++g) {
        double overlap = 0.0;
        for (int i = 0; i < n; ++i)
          if (mf.weights[static_cast<size_t>(i)] > 0.0 &&
              fiber_measures[g][ti].weights[static_cast<size_t>(i)] > 0.0)
            overlap += space.m(i);
        worst_overlap = std::max(worst_overlap, overlap);
      }
    }
    const Decomposition dec = decompose(mix, space);
    const double t = rep.times[ti];
    const double bound =
        std::pow(1.0 - t, -N) * std::exp(D * t * std::sqrt((N - 1.0) * kminus)) * rep.linf0;
    const double ent_lower = (1.0 - t) * std::exp(-D * t * std::sqrt((N - 1.0) * kminus) / N);
    const double ent = renyi_entropy(dec, space, N);
    rep.measures.push_back(mix);
    rep.linf.push_back(dec.linf());
    rep.linf_margin.push_back(1.0 - dec.linf() / bound);
    rep.entropy_margin.push_back(ent / rep.entropy0 - ent_lower);
    rep.fc_check.push_back(0.0);
    out.disjointness.push_back(worst_overlap);
    out.additivity_gap.push_back(std::abs(ent - entropy_sum));
  }
  rep.epsilon = out.plan.epsilon;
  return out;
}

FiniteDiracsResult good_geodesic_general(const FiniteMetricMeasureSpace& space,
                                         const GeodesicSet& geodesics, const Measure& mu0,
                                         const Measure& mu1, int n_atoms, double K, double N,
                                         int lambda_num, int lambda_den, int depth) {
  if (n_atoms < 1) throw InvalidParameter("need at least one atom");
  if (!mu1.is_probability()) throw BadMarginal("mu1 must be a probability measure");

  // keep the heaviest atoms (ties to the lowest index), merge the rest to
  // the nearest kept atom
  std::vector<int> supp = mu1.support();
  std::stable_sort(supp.begin(), supp.end(), [&](int a, int b) {
    return mu1.weights[static_cast<size_t>(a)] > mu1.weights[static_cast<size_t>(b)];
  });
  std::vector<int> kept(supp.begin(),
                        supp.begin() + std::min<size_t>(supp.size(), static_cast<size_t>(n_atoms)));
  std::sort(kept.begin(), kept.end());

  Measure quant = Measure::zero(space.size());
  for (int j : supp) {
    int best = kept.front();
    for (int c : kept)
      if (space.d(j, c) < space.d(j, best)) best = c;
    quant.weights[static_cast<size_t>(best)] += mu1.weights[static_cast<size_t>(j)];
  }

  std::vector<std::pair<int, double>> atoms;
  for (int c : kept) atoms.emplace_back(c, quant.weights[static_cast<size_t>(c)]);

  FiniteDiracsResult out = good_geodesic_to_finite_diracs(space, geodesics, mu0, atoms, K, N,
                                                          lambda_num, lambda_den, depth);
  out.report.approx_error_w2 = std::sqrt(solve_w2(space, mu1, quant).cost);
  return out;
}

nlohmann::json report_to_json(const GoodGeodesicReport& rep) {
  nlohmann::json densities = nlohmann::json::array();
  for (const auto& mu : rep.measures) {
    nlohmann::json sparse = nlohmann::json::array();
    for (size_t i = 0; i < mu.weights.size(); ++i)
      if (mu.weights[i] > 0.0) sparse.push_back({static_cast<int>(i), mu.weights[i]});
    densities.push_back(std::move(sparse));
  }
  return nlohmann::json{
      {"params",
       {{"K", rep.K},
        {"N", rep.N},
        {"D", rep.D},
        {"lambda", rep.lambda},
        {"depth", rep.depth},
        {"T", rep.T_global},
        {"epsilon", rep.epsilon}}},
      {"times", rep.times},
      {"densities", densities},
      {"linf", rep.linf},
      {"linf_margin", rep.linf_margin},
      {"entropy_margin", rep.entropy_margin},
      {"fc_check", rep.fc_check},
      {"approx_error_w2", rep.approx_error_w2}};
}

}  // namespace otgeo
