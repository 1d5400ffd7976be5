#include "otgeo/space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <nlohmann/json.hpp>

#include "otgeo/errors.hpp"

namespace otgeo {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string hex_digest(const std::string& data) {
  // FNV-1a 64 bit
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

FiniteMetricMeasureSpace::FiniteMetricMeasureSpace(std::vector<std::string> points,
                                                  std::vector<double> dist_flat,
                                                  std::vector<double> ref_measure)
    : points_(std::move(points)), dist_(std::move(dist_flat)), ref_measure_(std::move(ref_measure)) {
  const size_t n = points_.size();
  if (n == 0) throw BadInput("space has no points");
  if (dist_.size() != n * n) throw DimensionMismatch("distance matrix size");
  if (ref_measure_.size() != n) throw DimensionMismatch("reference measure size");

  for (size_t i = 0; i < n; ++i) {
    if (std::abs(dist_[i * n + i]) > kMetricTol)
      throw AsymmetricDistance("nonzero diagonal at " + points_[i]);
    dist_[i * n + i] = 0.0;
    if (ref_measure_[i] < 0.0) throw NegativeWeight("reference weight at " + points_[i]);
  }
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      if (dist_[i * n + j] < 0.0) throw BadInput("negative distance");
      if (std::abs(dist_[i * n + j] - dist_[j * n + i]) > kMetricTol)
        throw AsymmetricDistance(points_[i] + "," + points_[j]);
      // symmetrize exactly so downstream arithmetic is deterministic
      dist_[j * n + i] = dist_[i * n + j];
    }
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      for (size_t k = 0; k < n; ++k)
        if (dist_[i * n + j] > dist_[i * n + k] + dist_[k * n + j] + kMetricTol)
          throw TriangleInequalityViolated(points_[i] + "," + points_[j] + "," + points_[k]);

  bool has_support = false;
  for (double w : ref_measure_) has_support = has_support || w > 0.0;
  if (!has_support) throw EmptySupport("reference measure vanishes everywhere");

  std::string canon = "points:";
  for (const auto& p : points_) canon += p + ";";
  canon += "dist:";
  for (double v : dist_) canon += fmt_double(v) + ",";
  canon += "m:";
  for (double v : ref_measure_) canon += fmt_double(v) + ",";
  checksum_ = hex_digest(canon);
}

std::vector<int> FiniteMetricMeasureSpace::support() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (in_support(i)) out.push_back(i);
  return out;
}

double FiniteMetricMeasureSpace::total_mass() const {
  return std::accumulate(ref_measure_.begin(), ref_measure_.end(), 0.0);
}

int FiniteMetricMeasureSpace::index_of(const std::string& id) const {
  for (int i = 0; i < size(); ++i)
    if (points_[static_cast<size_t>(i)] == id) return i;
  return -1;
}

nlohmann::json FiniteMetricMeasureSpace::to_json() const {
  const size_t n = points_.size();
  nlohmann::json d_rows = nlohmann::json::array();
  for (size_t i = 0; i < n; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (size_t j = 0; j < n; ++j) row.push_back(dist_[i * n + j]);
    d_rows.push_back(std::move(row));
  }
  return nlohmann::json{{"version", 1},
                        {"points", points_},
                        {"metric", {{"type", "matrix"}, {"d", d_rows}}},
                        {"measure", ref_measure_},
                        {"checksum", checksum_}};
}

FiniteMetricMeasureSpace FiniteMetricMeasureSpace::from_json(const nlohmann::json& j) {
  return validate_space(j);
}

FiniteMetricMeasureSpace validate_space(const nlohmann::json& raw) {
  if (!raw.is_object()) throw BadInput("space description must be an object");
  if (raw.contains("version") && raw.at("version").get<int>() != 1)
    throw BadInput("unsupported space file version");
  if (!raw.contains("points") || !raw.contains("metric") || !raw.contains("measure"))
    throw BadInput("space description needs points, metric and measure");

  auto points = raw.at("points").get<std::vector<std::string>>();
  auto measure = raw.at("measure").get<std::vector<double>>();
  const size_t n = points.size();

  const auto& metric = raw.at("metric");
  std::vector<double> dist(n * n, 0.0);
  const std::string type = metric.at("type").get<std::string>();
  if (type == "matrix") {
    const auto& rows = metric.at("d");
    if (rows.size() != n) throw DimensionMismatch("metric matrix rows");
    for (size_t i = 0; i < n; ++i) {
      if (rows[i].size() != n) throw DimensionMismatch("metric matrix cols");
      for (size_t j = 0; j < n; ++j) dist[i * n + j] = rows[i][j].get<double>();
    }
  } else if (type == "euclidean") {
    const auto coords = metric.at("coords").get<std::vector<std::vector<double>>>();
    if (coords.size() != n) throw DimensionMismatch("coordinate rows");
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        if (coords[i].size() != coords[j].size()) throw DimensionMismatch("coordinate dims");
        double s = 0.0;
        for (size_t k = 0; k < coords[i].size(); ++k) {
          double diff = coords[i][k] - coords[j][k];
          s += diff * diff;
        }
        dist[i * n + j] = std::sqrt(s);
      }
  } else {
    throw BadInput("unknown metric type: " + type);
  }

  return FiniteMetricMeasureSpace(std::move(points), std::move(dist), std::move(measure));
}

double Measure::total() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

bool Measure::is_probability(double tol) const {
  for (double w : weights)
    if (w < 0.0) return false;
  return std::abs(total() - 1.0) <= tol;
}

std::vector<int> Measure::support() const {
  std::vector<int> out;
  for (size_t i = 0; i < weights.size(); ++i)
    if (weights[i] > 0.0) out.push_back(static_cast<int>(i));
  return out;
}

Measure Measure::dirac(int n, int at, double mass) {
  Measure mu = Measure::zero(n);
  mu.weights[static_cast<size_t>(at)] = mass;
  return mu;
}

double Decomposition::linf() const {
  double v = 0.0;
  for (double r : density) v = std::max(v, r);
  return v;
}

Decomposition decompose(const Measure& mu, const FiniteMetricMeasureSpace& space) {
  if (static_cast<int>(mu.weights.size()) != space.size())
    throw DimensionMismatch("measure vs space point count");
  Decomposition dec;
  dec.density.assign(mu.weights.size(), 0.0);
  for (int i = 0; i < space.size(); ++i) {
    const double w = mu.weights[static_cast<size_t>(i)];
    if (w < 0.0) throw NegativeWeight("measure weight at index " + std::to_string(i));
    if (space.in_support(i))
      dec.density[static_cast<size_t>(i)] = w / space.m(i);
    else
      dec.singular_mass += w;
  }
  return dec;
}

Measure reconstruct(const Decomposition& dec, const Measure& singular_part,
                    const FiniteMetricMeasureSpace& space) {
  Measure mu = Measure::zero(space.size());
  for (int i = 0; i < space.size(); ++i) {
    if (space.in_support(i))
      mu.weights[static_cast<size_t>(i)] = dec.density[static_cast<size_t>(i)] * space.m(i);
    else
      mu.weights[static_cast<size_t>(i)] = singular_part.weights[static_cast<size_t>(i)];
  }
  return mu;
}

double diameter(const FiniteMetricMeasureSpace& space, const std::vector<int>& subset) {
  if (subset.empty()) throw EmptySubset();
  double diam = 0.0;
  for (size_t a = 0; a < subset.size(); ++a)
    for (size_t b = a + 1; b < subset.size(); ++b)
      diam = std::max(diam, space.d(subset[a], subset[b]));
  return diam;
}

nlohmann::json measure_to_json(const Measure& mu, const FiniteMetricMeasureSpace& space) {
  return nlohmann::json{{"space_checksum", space.checksum()}, {"weights", mu.weights}};
}

Measure measure_from_json(const nlohmann::json& j, const FiniteMetricMeasureSpace& space) {
  if (j.at("space_checksum").get<std::string>() != space.checksum())
    throw ChecksumMismatch("measure file does not match the supplied space");
  Measure mu{j.at("weights").get<std::vector<double>>()};
  if (static_cast<int>(mu.weights.size()) != space.size())
    throw DimensionMismatch("measure file length");
  for (double w : mu.weights)
    if (w < 0.0) throw NegativeWeight("measure file weight");
  return mu;
}

}  // namespace otgeo
