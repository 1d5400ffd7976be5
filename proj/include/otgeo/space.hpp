#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace otgeo {

// Finite metric measure space: point identifiers, a symmetric distance
// matrix and a nonnegative reference measure m. Immutable after validation;
// all operations work on dense indices.
class FiniteMetricMeasureSpace {
 public:
  FiniteMetricMeasureSpace(std::vector<std::string> points,
                           std::vector<double> dist_flat,
                           std::vector<double> ref_measure);

  int size() const { return static_cast<int>(points_.size()); }
  const std::vector<std::string>& points() const { return points_; }
  const std::vector<double>& ref_measure() const { return ref_measure_; }
  double m(int i) const { return ref_measure_[static_cast<size_t>(i)]; }
  double d(int i, int j) const {
    return dist_[static_cast<size_t>(i) * points_.size() + static_cast<size_t>(j)];
  }
  double d2(int i, int j) const { double v = d(i, j); return v * v; }

  bool in_support(int i) const { return m(i) > 0.0; }
  std::vector<int> support() const;
  double total_mass() const;

  int index_of(const std::string& id) const;  // -1 if absent

  // Canonical serialization digest; measure/plan files reference it.
  const std::string& checksum() const { return checksum_; }

  nlohmann::json to_json() const;
  static FiniteMetricMeasureSpace from_json(const nlohmann::json& j);

 private:
  std::vector<std::string> points_;
  std::vector<double> dist_;  // row-major n*n
  std::vector<double> ref_measure_;
  std::string checksum_;
};

// Validation tolerance for the triangle inequality and symmetry.
inline constexpr double kMetricTol = 1e-12;

// Validates a raw description (JSON with points / metric / measure fields,
// metric either an explicit matrix or euclidean coordinates).
FiniteMetricMeasureSpace validate_space(const nlohmann::json& raw);

// Nonnegative weight vector over the points of a space.
struct Measure {
  std::vector<double> weights;

  double total() const;
  bool is_probability(double tol = 1e-12) const;
  std::vector<int> support() const;  // indices with weight > 0

  static Measure zero(int n) { return Measure{std::vector<double>(static_cast<size_t>(n), 0.0)}; }
  static Measure dirac(int n, int at, double mass = 1.0);
};

// Lebesgue-type decomposition of a measure relative to the reference
// measure: mu = rho * m on supp(m) plus the singular mass sitting on {m = 0}.
struct Decomposition {
  std::vector<double> density;  // full length; 0 where m = 0
  double singular_mass = 0.0;

  double linf() const;  // ess-sup of the density
};

Decomposition decompose(const Measure& mu, const FiniteMetricMeasureSpace& space);
Measure reconstruct(const Decomposition& dec, const Measure& singular_part,
                    const FiniteMetricMeasureSpace& space);

double diameter(const FiniteMetricMeasureSpace& space, const std::vector<int>& subset);

// Measure file IO: {"space_checksum": ..., "weights": [...]}; checksum
// mismatch against the supplied space is a hard error.
nlohmann::json measure_to_json(const Measure& mu, const FiniteMetricMeasureSpace& space);
Measure measure_from_json(const nlohmann::json& j, const FiniteMetricMeasureSpace& space);

// FNV-1a digest of a canonical string, 16 hex chars.
std::string hex_digest(const std::string& data);

}  // namespace otgeo
