#pragma once

#include <cmath>
#include <utility>
#include <vector>

namespace casimir {

// Value represented as mantissa * exp(log_scale), with |mantissa| in [1,2)
// after normalization (or exactly 0).  Keeps products of exponentially
// large/small Bessel factors representable; log scales are summed separately
// by the matrix assembly.
struct ScaledValue {
  double mantissa = 0.0;
  double log_scale = 0.0;

  double value() const { return mantissa * std::exp(log_scale); }
  // log of |value|; -inf for zero.
  double log_abs() const { return std::log(std::fabs(mantissa)) + log_scale; }
  int sign() const { return (mantissa > 0) - (mantissa < 0); }
};

// Build a normalized ScaledValue from sign and log magnitude.
ScaledValue scaled_from_log(int sign, double log_magnitude);

// Modified Bessel function I_m(x), exponentially scaled (log_scale ~ +x for
// large x so the mantissa stays O(1)).  0 <= m <= 200, 0 < x <= 1e4.
ScaledValue bessel_I_scaled(int m, double x);

// Modified Bessel function K_m(x), same range; rejects x < 1e-12 where the
// logarithmic singularity makes the value meaningless in this context.
ScaledValue bessel_K_scaled(int m, double x);

// (I'_m, K'_m) via the three-term recurrence identities
// I'_m = (I_{m-1} + I_{m+1})/2,  K'_m = -(K_{m-1} + K_{m+1})/2.
std::pair<ScaledValue, ScaledValue> bessel_derivatives(int m, double x);

// Ordinary Bessel function J_m(x) on the real axis, 0 <= m <= 60, 0 < x <= 100.
double bessel_J(int m, double x);

// J'_m(x) = (J_{m-1} - J_{m+1})/2, with J'_0 = -J_1.
double bessel_J_deriv(int m, double x);

// Bessel function of the second kind, order zero (MFS fundamental solution).
double bessel_Y0(double x);

namespace specfun_detail {

// log I_m(x) for m = 0..mmax at fixed x > 0.  Series for moderate x,
// Miller backward recurrence with sum normalization for large x.
std::vector<double> log_bessel_I(int mmax, double x);

// log K_m(x) for m = 0..mmax; series/continued fraction seeds for orders 0,1
// then upward recurrence carried in scaled form.
std::vector<double> log_bessel_K(int mmax, double x);

// log I'_m and log|K'_m| (K'_m < 0) for m = 0..mmax.
void log_bessel_derivs(int mmax, double x,
                       std::vector<double>& log_Ip,
                       std::vector<double>& log_Kp_abs);

// J_m(x) for m = 0..mmax (backward recurrence, normalized).
std::vector<double> bessel_J_all(int mmax, double x);

// log(exp(a) + exp(b)) without overflow.
double log_add(double a, double b);

}  // namespace specfun_detail

}  // namespace casimir
