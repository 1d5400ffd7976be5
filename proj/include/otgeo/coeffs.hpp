#pragma once

#include <cmath>

namespace otgeo {

// Distortion coefficient value: a finite nonnegative real or the
// distinguished infinite value (kept separate from IEEE inf so that report
// serialization stays unambiguous).
struct ExtendedValue {
  double value = 0.0;
  bool infinite = false;

  static ExtendedValue inf() { return {0.0, true}; }
  static ExtendedValue finite(double v) { return {v, false}; }

  // Comparison contract: infinite dominates every finite value; an
  // inequality with the infinite value on the required lower side fails
  // unless both sides are infinite.
  bool operator>=(const ExtendedValue& rhs) const {
    if (infinite) return true;
    if (rhs.infinite) return false;
    return value >= rhs.value;
  }
  bool operator==(const ExtendedValue& rhs) const {
    if (infinite || rhs.infinite) return infinite == rhs.infinite;
    return value == rhs.value;
  }
};

struct CurvatureDimension {
  double K = 0.0;
  double N = 1.0;

  double k_minus() const { return K < 0.0 ? -K : 0.0; }
};

// sigma_{K,N}^{(t)}(theta). Accepts N >= 0: the N slot is also used for the
// N-1 inside tau, with the degenerate N = 0 meaning the ratio collapses to t
// for K <= 0 and is infinite for K > 0, theta > 0.
ExtendedValue sigma(double K, double N, double t, double theta);

// tau_{K,N}^{(t)}(theta) = t^{1/N} sigma_{K,N-1}^{(t)}(theta)^{(N-1)/N},
// with the full case analysis (infinite branch when K theta^2 >= (N-1) pi^2
// and K > 0, linear branch when K theta^2 = 0 or K < 0 with N = 1).
ExtendedValue tau(double K, double N, double t, double theta);

// sigma(K,N,lambda,theta)/lambda - exp(-(1-lambda) theta sqrt(K^-/N));
// the exponential lower-bound estimate for K < 0, guaranteed >= 0 up to
// roundoff.
double sigma_lower_bound_gap(double K, double N, double lambda, double theta);

}  // namespace otgeo
