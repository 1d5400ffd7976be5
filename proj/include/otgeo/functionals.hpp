#pragma once

#include "otgeo/space.hpp"

namespace otgeo {

// Renyi entropy E_N(mu) = sum_{m_i > 0} rho_i^{1-1/N} m_i; the singular part
// contributes nothing. For N = 1 the integrand is the indicator of
// {rho > 0}, so E_1(mu) = m({rho > 0}).
double renyi_entropy(const Measure& mu, const FiniteMetricMeasureSpace& space, double N);
double renyi_entropy(const Decomposition& dec, const FiniteMetricMeasureSpace& space, double N);

// Excess mass F_C(mu) = sum max(rho_i - C, 0) m_i + singular mass.
double excess_mass(const Measure& mu, const FiniteMetricMeasureSpace& space, double C);
double excess_mass(const Decomposition& dec, const FiniteMetricMeasureSpace& space, double C);

// Density cap C(K,N,D,lambda) = (1-lambda)^{-N} exp(lambda D sqrt((N-1) K^-)).
double density_cap(double K, double N, double D, double lambda);

}  // namespace otgeo
