#include "otgeo/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "otgeo/errors.hpp"

namespace otgeo {

double chain_slack(const FiniteMetricMeasureSpace& space, const std::vector<int>& chain) {
  const int T = static_cast<int>(chain.size()) - 1;
  if (T <= 0) return 0.0;
  const double L = space.d(chain.front(), chain.back());
  double worst = 0.0;
  for (int a = 0; a <= T; ++a)
    for (int b = a + 1; b <= T; ++b) {
      const double dev = std::abs(space.d(chain[static_cast<size_t>(a)], chain[static_cast<size_t>(b)]) -
                                  static_cast<double>(b - a) / T * L);
      worst = std::max(worst, dev);
    }
  return worst;
}

DiscreteGeodesic make_geodesic(const FiniteMetricMeasureSpace& space, std::vector<int> chain) {
  if (chain.empty()) throw BadInput("empty chain");
  DiscreteGeodesic g;
  g.length = space.d(chain.front(), chain.back());
  g.slack = chain_slack(space, chain);
  g.chain = std::move(chain);
  return g;
}

bool satisfies_speed_bound(const FiniteMetricMeasureSpace& space, const std::vector<int>& chain,
                           double eps) {
  return chain_slack(space, chain) <= eps;
}

double DynamicalPlan::total_weight() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.weight;
  return s;
}

void GeodesicSet::rebuild_index() {
  by_pair.clear();
  for (size_t i = 0; i < geodesics.size(); ++i) {
    const auto& c = geodesics[i].chain;
    by_pair[{c.front(), c.back()}].push_back(static_cast<int>(i));
  }
}

Measure evaluate(const DynamicalPlan& nu, int k, const FiniteMetricMeasureSpace& space) {
  if (k < 0 || k > nu.time_resolution) throw OffGridTime("index " + std::to_string(k));
  Measure mu = Measure::zero(space.size());
  for (const auto& a : nu.atoms)
    mu.weights[static_cast<size_t>(a.geodesic.at_time(k))] += a.weight;
  return mu;
}

Measure evaluate_at(const DynamicalPlan& nu, double t, const FiniteMetricMeasureSpace& space) {
  const double kk = t * nu.time_resolution;
  const double rounded = std::round(kk);
  if (std::abs(kk - rounded) > 1e-9) throw OffGridTime("t = " + std::to_string(t));
  return evaluate(nu, static_cast<int>(rounded), space);
}

DynamicalPlan restrict_plan(const DynamicalPlan& nu, int ks, int kt,
                            const FiniteMetricMeasureSpace& space) {
  if (ks < 0 || kt > nu.time_resolution || ks >= kt)
    throw OffGridTime("restriction window [" + std::to_string(ks) + "," + std::to_string(kt) + "]");
  DynamicalPlan out;
  out.time_resolution = kt - ks;
  double worst = 0.0;
  for (const auto& a : nu.atoms) {
    std::vector<int> sub(a.geodesic.chain.begin() + ks, a.geodesic.chain.begin() + kt + 1);
    PlanAtom atom{make_geodesic(space, std::move(sub)), a.weight};
    worst = std::max(worst, atom.geodesic.slack);
    out.atoms.push_back(std::move(atom));
  }
  out.epsilon = std::max(nu.epsilon, worst);
  return out;
}

Disintegration disintegrate(const DynamicalPlan& nu, int k, const FiniteMetricMeasureSpace& space) {
  Disintegration dis;
  dis.base = evaluate(nu, k, space);
  for (const auto& a : nu.atoms) {
    const int x = a.geodesic.at_time(k);
    auto& cond = dis.conditionals[x];
    cond.time_resolution = nu.time_resolution;
    cond.epsilon = nu.epsilon;
    cond.atoms.push_back(PlanAtom{a.geodesic, a.weight / dis.base.weights[static_cast<size_t>(x)]});
  }
  return dis;
}

std::vector<int> resample_chain(const std::vector<int>& chain, int T_new) {
  const long long T_old = static_cast<long long>(chain.size()) - 1;
  std::vector<int> out(static_cast<size_t>(T_new) + 1);
  for (long long i = 0; i <= T_new; ++i) {
    const long long idx = (2 * i * T_old + T_new) / (2LL * T_new);  // round half up
    out[static_cast<size_t>(i)] = chain[static_cast<size_t>(idx)];
  }
  return out;
}

DynamicalPlan glue_plans(const DynamicalPlan& left, const DynamicalPlan& right,
                         const FiniteMetricMeasureSpace& space) {
  const Measure end_left = evaluate(left, left.time_resolution, space);
  const Measure start_right = evaluate(right, 0, space);
  for (int i = 0; i < space.size(); ++i)
    if (std::abs(end_left.weights[static_cast<size_t>(i)] - start_right.weights[static_cast<size_t>(i)]) > 1e-12)
      throw JunctionMismatch("marginals differ at point index " + std::to_string(i));

  const Disintegration dl = disintegrate(left, left.time_resolution, space);
  const Disintegration dr = disintegrate(right, 0, space);

  const int H = std::lcm(left.time_resolution, right.time_resolution);
  DynamicalPlan out;
  out.time_resolution = 2 * H;
  double worst = 0.0;
  for (const auto& [x, cond_l] : dl.conditionals) {
    const double alpha = dl.base.weights[static_cast<size_t>(x)];
    const auto it = dr.conditionals.find(x);
    if (it == dr.conditionals.end())
      throw JunctionMismatch("no right conditional at point index " + std::to_string(x));
    for (const auto& al : cond_l.atoms)
      for (const auto& ar : it->second.atoms) {
        std::vector<int> lc = resample_chain(al.geodesic.chain, H);
        std::vector<int> rc = resample_chain(ar.geodesic.chain, H);
        lc.insert(lc.end(), rc.begin() + 1, rc.end());
        PlanAtom atom{make_geodesic(space, std::move(lc)), alpha * al.weight * ar.weight};
        worst = std::max(worst, atom.geodesic.slack);
        out.atoms.push_back(std::move(atom));
      }
  }
  out.epsilon = worst;
  return out;
}

BranchWitness is_nonbranching(const std::vector<DiscreteGeodesic>& chains) {
  BranchWitness w;
  for (size_t i = 0; i < chains.size(); ++i)
    for (size_t j = i + 1; j < chains.size(); ++j) {
      const auto& a = chains[i].chain;
      const auto& b = chains[j].chain;
      if (a.size() != b.size()) continue;
      size_t k = 0;
      while (k < a.size() && a[k] == b[k]) ++k;
      // shared initial segment through at least time 1/T, then a split
      if (k >= 2 && k < a.size()) {
        w.nonbranching = false;
        w.first = static_cast<int>(i);
        w.second = static_cast<int>(j);
        w.split_index = static_cast<int>(k) - 1;
        return w;
      }
    }
  return w;
}

BranchWitness is_nonbranching(const GeodesicSet& set) { return is_nonbranching(set.geodesics); }

BranchWitness is_nonbranching(const DynamicalPlan& nu) {
  std::vector<DiscreteGeodesic> chains;
  chains.reserve(nu.atoms.size());
  for (const auto& a : nu.atoms) chains.push_back(a.geodesic);
  return is_nonbranching(chains);
}

double plan_cost(const DynamicalPlan& nu) {
  double c = 0.0;
  for (const auto& a : nu.atoms) c += a.weight * a.geodesic.length * a.geodesic.length;
  return c;
}

GeodesicSet enumerate_geodesics(const FiniteMetricMeasureSpace& space, int T, double eps, int cap) {
  if (T < 1) throw InvalidParameter("time resolution must be >= 1");
  GeodesicSet set;
  set.T = T;
  set.epsilon = eps;
  const int n = space.size();

  for (int a = 0; a < n && !set.truncated; ++a)
    for (int b = 0; b < n && !set.truncated; ++b) {
      const double L = space.d(a, b);
      std::vector<int> chain{a};
      // depth-first over interior positions; every pairwise speed constraint
      // against the prefix and against the fixed endpoint prunes the branch
      auto feasible = [&](int x, int k) {
        for (int j = 0; j < k; ++j)
          if (std::abs(space.d(chain[static_cast<size_t>(j)], x) -
                       static_cast<double>(k - j) / T * L) > eps)
            return false;
        return std::abs(space.d(x, b) - static_cast<double>(T - k) / T * L) <= eps;
      };
      std::vector<int> stack{0};  // next candidate per level
      chain.reserve(static_cast<size_t>(T) + 1);
      while (!stack.empty()) {
        const int k = static_cast<int>(chain.size());
        if (k == T) {
          std::vector<int> full = chain;
          full.push_back(b);
          set.geodesics.push_back(make_geodesic(space, std::move(full)));
          if (static_cast<int>(set.geodesics.size()) >= cap) {
            set.truncated = true;
            break;
          }
          stack.pop_back();
          chain.pop_back();
          continue;
        }
        int& cand = stack.back();
        bool advanced = false;
        while (cand < n) {
          const int x = cand++;
          if (feasible(x, k)) {
            chain.push_back(x);
            stack.push_back(0);
            advanced = true;
            break;
          }
        }
        if (!advanced) {
          stack.pop_back();
          if (!chain.empty() && static_cast<int>(chain.size()) > 1) chain.pop_back();
          else if (stack.empty()) break;
        }
      }
    }
  set.rebuild_index();
  return set;
}

DynamicalPlan reverse_plan(const DynamicalPlan& nu, const FiniteMetricMeasureSpace& space) {
  DynamicalPlan out;
  out.time_resolution = nu.time_resolution;
  out.epsilon = nu.epsilon;
  for (const auto& a : nu.atoms) {
    std::vector<int> rev(a.geodesic.chain.rbegin(), a.geodesic.chain.rend());
    out.atoms.push_back(PlanAtom{make_geodesic(space, std::move(rev)), a.weight});
  }
  return out;
}

nlohmann::json plan_to_json(const DynamicalPlan& nu, const FiniteMetricMeasureSpace& space) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : nu.atoms)
    atoms.push_back({{"chain", a.geodesic.chain}, {"weight", a.weight}});
  return nlohmann::json{{"space_checksum", space.checksum()},
                        {"T", nu.time_resolution},
                        {"epsilon", nu.epsilon},
                        {"atoms", atoms}};
}

DynamicalPlan plan_from_json(const nlohmann::json& j, const FiniteMetricMeasureSpace& space) {
  if (j.at("space_checksum").get<std::string>() != space.checksum())
    throw ChecksumMismatch("plan file does not match the supplied space");
  DynamicalPlan nu;
  nu.time_resolution = j.at("T").get<int>();
  nu.epsilon = j.at("epsilon").get<double>();
  for (const auto& a : j.at("atoms")) {
    auto chain = a.at("chain").get<std::vector<int>>();
    if (static_cast<int>(chain.size()) != nu.time_resolution + 1)
      throw DimensionMismatch("chain length vs plan resolution");
    nu.atoms.push_back(PlanAtom{make_geodesic(space, std::move(chain)), a.at("weight").get<double>()});
  }
  return nu;
}

nlohmann::json geoset_to_json(const GeodesicSet& set, const FiniteMetricMeasureSpace& space) {
  nlohmann::json chains = nlohmann::json::array();
  for (const auto& g : set.geodesics) chains.push_back(g.chain);
  return nlohmann::json{{"space_checksum", space.checksum()},
                        {"T", set.T},
                        {"epsilon", set.epsilon},
                        {"truncated", set.truncated},
                        {"chains", chains}};
}

GeodesicSet geoset_from_json(const nlohmann::json& j, const FiniteMetricMeasureSpace& space) {
  if (j.at("space_checksum").get<std::string>() != space.checksum())
    throw ChecksumMismatch("geodesic file does not match the supplied space");
  GeodesicSet set;
  set.T = j.at("T").get<int>();
  set.epsilon = j.at("epsilon").get<double>();
  set.truncated = j.at("truncated").get<bool>();
  for (const auto& c : j.at("chains"))
    set.geodesics.push_back(make_geodesic(space, c.get<std::vector<int>>()));
  set.rebuild_index();
  return set;
}

}  // namespace otgeo
