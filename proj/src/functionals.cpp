#include "otgeo/functionals.hpp"

#include <cmath>

#include "otgeo/errors.hpp"

namespace otgeo {

double renyi_entropy(const Decomposition& dec, const FiniteMetricMeasureSpace& space, double N) {
  if (!(N >= 1.0)) throw InvalidParameter("renyi_entropy requires N >= 1");
  const double expo = 1.0 - 1.0 / N;
  double sum = 0.0;
  for (int i = 0; i < space.size(); ++i) {
    const double rho = dec.density[static_cast<size_t>(i)];
    // 0^{1-1/N} := 0 for every N >= 1 so only {rho > 0} contributes
    if (space.in_support(i) && rho > 0.0)
      sum += std::pow(rho, expo) * space.m(i);
  }
  return sum;
}

double renyi_entropy(const Measure& mu, const FiniteMetricMeasureSpace& space, double N) {
  return renyi_entropy(decompose(mu, space), space, N);
}

double excess_mass(const Decomposition& dec, const FiniteMetricMeasureSpace& space, double C) {
  if (!(C >= 0.0)) throw InvalidParameter("excess_mass requires C >= 0");
  double sum = dec.singular_mass;
  for (int i = 0; i < space.size(); ++i) {
    const double rho = dec.density[static_cast<size_t>(i)];
    if (space.in_support(i) && rho > C) sum += (rho - C) * space.m(i);
  }
  return sum;
}

double excess_mass(const Measure& mu, const FiniteMetricMeasureSpace& space, double C) {
  return excess_mass(decompose(mu, space), space, C);
}

double density_cap(double K, double N, double D, double lambda) {
  if (!(N >= 1.0)) throw InvalidParameter("density_cap requires N >= 1");
  if (!(D >= 0.0)) throw InvalidParameter("density_cap requires D >= 0");
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidParameter("lambda must lie in (0,1)");
  const double k_minus = K < 0.0 ? -K : 0.0;
  return std::pow(1.0 - lambda, -N) * std::exp(lambda * D * std::sqrt((N - 1.0) * k_minus));
}

}  // namespace otgeo
