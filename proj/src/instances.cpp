#include "otgeo/instances.hpp"

#include <cmath>
#include <functional>

#include "otgeo/errors.hpp"

namespace otgeo {

namespace {

// floor((num/den) + 1/2) with exact integer arithmetic, den > 0
long long round_div(long long num, long long den) {
  long long v = 2 * num + den;
  long long q = v / (2 * den);
  if (v % (2 * den) != 0 && v < 0) --q;
  return q;
}

// chain[k] = path[round(k * (|path|-1) / T)]
std::vector<int> sample_path(const std::vector<int>& path, int T) {
  const long long steps = static_cast<long long>(path.size()) - 1;
  std::vector<int> chain(static_cast<size_t>(T) + 1);
  for (long long k = 0; k <= T; ++k)
    chain[static_cast<size_t>(k)] = path[static_cast<size_t>(round_div(k * steps, T))];
  return chain;
}

// chain[k] = path[floor(k * (|path|-1) / T)]; together with sample_path this
// gives both rounding variants of the same path, so intermediate-point
// selection has one cell of slack at off-grid times
std::vector<int> sample_path_floor(const std::vector<int>& path, int T) {
  const long long steps = static_cast<long long>(path.size()) - 1;
  std::vector<int> chain(static_cast<size_t>(T) + 1);
  for (long long k = 0; k <= T; ++k)
    chain[static_cast<size_t>(k)] = path[static_cast<size_t>(k * steps / T)];
  return chain;
}

void emit_variants(GeodesicSet& set, const FiniteMetricMeasureSpace& space,
                   const std::vector<int>& path, int T) {
  std::vector<int> a = sample_path(path, T);
  std::vector<int> b = sample_path_floor(path, T);
  const bool same = a == b;
  set.geodesics.push_back(make_geodesic(space, std::move(a)));
  if (!same) set.geodesics.push_back(make_geodesic(space, std::move(b)));
}

double weight_fn(const std::string& id, double x) {
  if (id == "uniform") return 1.0;
  if (id == "expneg") return std::exp(-x);
  if (id == "linear") return 1.0 + x;
  throw InvalidSpec("unknown weight function: " + id);
}

Instance make_line(const InstanceSpec& spec, bool weighted) {
  const int n = spec.n;
  if (n < 2) throw InvalidSpec("interval needs n >= 2");
  if (spec.length <= 0.0) throw InvalidSpec("length must be positive");
  const double h = spec.length / (n - 1);

  std::vector<std::string> ids;
  std::vector<double> dist(static_cast<size_t>(n) * n);
  std::vector<double> m(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    ids.push_back("x" + std::to_string(i));
    m[static_cast<size_t>(i)] = weighted ? weight_fn(spec.weight_id, i * h) * h : h;
    for (int j = 0; j < n; ++j)
      dist[static_cast<size_t>(i) * n + j] = std::abs(i - j) * h;
  }
  FiniteMetricMeasureSpace space(std::move(ids), std::move(dist), std::move(m));

  GeodesicSet set;
  set.T = spec.T;
  set.epsilon = 2.0 * h;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::vector<int> path;
      const int dir = j >= i ? 1 : -1;
      for (int p = i; p != j + dir; p += dir) path.push_back(p);
      emit_variants(set, space, path, spec.T);
    }
  set.rebuild_index();

  Instance inst{std::move(space), std::move(set),
                "line of " + std::to_string(n) + " points, mesh " + std::to_string(h) +
                    "; monotone chains are the unique geodesics"};
  return inst;
}

Instance make_tripod(const InstanceSpec& spec) {
  const int k = spec.n;
  if (k < 1) throw InvalidSpec("tripod needs n >= 1 points per branch");
  if (spec.length <= 0.0) throw InvalidSpec("length must be positive");
  const int n = 3 * k + 1;
  const double h = spec.length / k;

  // index 0 = junction; branch b point i (1-based) at index b*k + i
  auto idx = [&](int b, int i) { return i == 0 ? 0 : b * k + i; };
  auto branch_of = [&](int p) { return p == 0 ? -1 : (p - 1) / k; };
  auto depth_of = [&](int p) { return p == 0 ? 0 : (p - 1) % k + 1; };

  std::vector<std::string> ids{"o"};
  const char* names[3] = {"a", "b", "c"};
  for (int b = 0; b < 3; ++b)
    for (int i = 1; i <= k; ++i) ids.push_back(names[b] + std::to_string(i));

  std::vector<double> dist(static_cast<size_t>(n) * n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      const int bp = branch_of(p), bq = branch_of(q);
      const int dp = depth_of(p), dq = depth_of(q);
      dist[static_cast<size_t>(p) * n + q] =
          (bp == bq || p == 0 || q == 0) ? std::abs(dp - dq) * h : (dp + dq) * h;
    }
  std::vector<double> m(static_cast<size_t>(n), h);
  FiniteMetricMeasureSpace space(std::move(ids), std::move(dist), std::move(m));

  GeodesicSet set;
  set.T = spec.T;
  set.epsilon = 2.0 * h;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      std::vector<int> path;
      const int bp = branch_of(p), bq = branch_of(q);
      if (bp == bq || p == 0 || q == 0) {
        const int b = p == 0 ? bq : bp;
        const int dp = depth_of(p), dq = depth_of(q);
        const int dir = dq >= dp ? 1 : -1;
        for (int i = dp; i != dq + dir; i += dir) path.push_back(i == 0 ? 0 : idx(b, i));
      } else {
        for (int i = depth_of(p); i >= 0; --i) path.push_back(i == 0 ? 0 : idx(bp, i));
        for (int i = 1; i <= depth_of(q); ++i) path.push_back(idx(bq, i));
      }
      emit_variants(set, space, path, spec.T);
    }
  set.rebuild_index();

  Instance inst{std::move(space), std::move(set),
                "tripod with 3 branches of " + std::to_string(k) + " points, spacing " +
                    std::to_string(h) + "; cross-branch geodesics pass through the junction"};
  return inst;
}

Instance make_grid2d(const InstanceSpec& spec) {
  const int n = spec.n;
  if (n < 2) throw InvalidSpec("grid2d needs n >= 2 per side");
  const double h = 1.0 / (n - 1);
  const int N = n * n;
  auto idx = [&](int i, int j) { return i * n + j; };

  std::vector<std::string> ids;
  std::vector<double> m(static_cast<size_t>(N), h * h);
  std::vector<double> dist(static_cast<size_t>(N) * N);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) ids.push_back("g" + std::to_string(i) + "_" + std::to_string(j));
  for (int p = 0; p < N; ++p)
    for (int q = 0; q < N; ++q) {
      const double dx = (p / n - q / n) * h;
      const double dy = (p % n - q % n) * h;
      dist[static_cast<size_t>(p) * N + q] = std::hypot(dx, dy);
    }
  FiniteMetricMeasureSpace space(std::move(ids), std::move(dist), std::move(m));

  GeodesicSet set;
  set.T = spec.T;
  set.epsilon = 2.0 * h;
  for (int p = 0; p < N; ++p)
    for (int q = 0; q < N; ++q) {
      // nearest lattice point to the straight segment at each grid time
      std::vector<int> chain(static_cast<size_t>(spec.T) + 1);
      for (int t = 0; t <= spec.T; ++t) {
        const int ci = static_cast<int>(round_div(static_cast<long long>(t) * (q / n - p / n), spec.T)) + p / n;
        const int cj = static_cast<int>(round_div(static_cast<long long>(t) * (q % n - p % n), spec.T)) + p % n;
        chain[static_cast<size_t>(t)] = idx(ci, cj);
      }
      set.geodesics.push_back(make_geodesic(space, std::move(chain)));
    }
  set.rebuild_index();

  Instance inst{std::move(space), std::move(set),
                "square lattice " + std::to_string(n) + "x" + std::to_string(n) +
                    " with l2 metric; chains follow nearest-lattice segments"};
  return inst;
}

}  // namespace

double default_epsilon(const InstanceSpec& spec) {
  if (spec.kind == "interval" || spec.kind == "weighted_interval")
    return 2.0 * spec.length / (spec.n - 1);
  if (spec.kind == "tripod") return 2.0 * spec.length / spec.n;
  if (spec.kind == "grid2d") return 2.0 / (spec.n - 1);
  throw InvalidSpec("unknown instance kind: " + spec.kind);
}

Instance generate(const InstanceSpec& spec) {
  if (spec.T < 1) throw InvalidSpec("time resolution must be >= 1");
  if (spec.kind == "interval") return make_line(spec, false);
  if (spec.kind == "weighted_interval") return make_line(spec, true);
  if (spec.kind == "tripod") return make_tripod(spec);
  if (spec.kind == "grid2d") return make_grid2d(spec);
  throw InvalidSpec("unknown instance kind: " + spec.kind);
}

}  // namespace otgeo
