#include "otgeo/coeffs.hpp"

#include <numbers>

#include "otgeo/errors.hpp"

namespace otgeo {

namespace {

constexpr double kPi = std::numbers::pi;
// |K| below this is routed to the K = 0 branch; the sine/sinh ratios lose
// all precision as K -> 0.
constexpr double kZeroK = 1e-13;

void check_common(double N, double t, double theta, double min_N) {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidParameter("t must lie in [0,1]");
  if (!(theta >= 0.0)) throw InvalidParameter("theta must be nonnegative");
  if (!(N >= min_N)) throw InvalidParameter("dimension parameter too small");
}

}  // namespace

ExtendedValue sigma(double K, double N, double t, double theta) {
  check_common(N, t, theta, 0.0);
  if (K == 0.0 || std::abs(K) < kZeroK || theta == 0.0)
    return ExtendedValue::finite(t);
  if (K > 0.0) {
    if (N == 0.0) return ExtendedValue::inf();
    if (K * theta * theta >= N * kPi * kPi) return ExtendedValue::inf();
    const double a = theta * std::sqrt(K / N);
    return ExtendedValue::finite(std::sin(t * a) / std::sin(a));
  }
  if (N == 0.0) return ExtendedValue::finite(t);
  const double a = theta * std::sqrt(-K / N);
  return ExtendedValue::finite(std::sinh(t * a) / std::sinh(a));
}

ExtendedValue tau(double K, double N, double t, double theta) {
  check_common(N, t, theta, 1.0);
  const double kt2 = K * theta * theta;
  if (kt2 == 0.0 || std::abs(K) < kZeroK) return ExtendedValue::finite(t);
  if (K > 0.0) {
    // closed condition, boundary included
    if (kt2 >= (N - 1.0) * kPi * kPi) return ExtendedValue::inf();
  } else if (N == 1.0) {
    return ExtendedValue::finite(t);
  }
  const ExtendedValue s = sigma(K, N - 1.0, t, theta);
  if (s.infinite) return ExtendedValue::inf();
  if (t == 0.0) return ExtendedValue::finite(0.0);
  return ExtendedValue::finite(std::pow(t, 1.0 / N) * std::pow(s.value, (N - 1.0) / N));
}

double sigma_lower_bound_gap(double K, double N, double lambda, double theta) {
  if (!(K < 0.0)) throw InvalidParameter("estimate requires K < 0");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw InvalidParameter("lambda must lie in (0,1]");
  if (!(theta >= 0.0)) throw InvalidParameter("theta must be nonnegative");
  if (!(N >= 1.0)) throw InvalidParameter("N must be >= 1");
  const ExtendedValue s = sigma(K, N, lambda, theta);
  const double lhs = s.value / lambda;
  const double rhs = std::exp(-(1.0 - lambda) * theta * std::sqrt(-K / N));
  return lhs - rhs;
}

}  // namespace otgeo
