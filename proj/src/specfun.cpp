#include "casimir/specfun.hpp"

#include <algorithm>
#include <limits>

#include "casimir/errors.hpp"

namespace casimir {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209;
constexpr double kPi = 3.14159265358979323846264338;
constexpr double kLn2 = 0.69314718055994530941723212;

void check_IK_domain(int m, double x, double x_min) {
  if (m < 0 || m > 200)
    throw DomainError("bessel order out of range [0,200]: m=" + std::to_string(m));
  if (!(x > x_min) || x > 1e4)
    throw DomainError("bessel argument out of range: x=" + std::to_string(x));
}

// I_m(x) by the ascending series, with the leading (x/2)^m/m! factored out in
// log form so small-x/large-m values never underflow.
double log_I_series(int m, double x) {
  const double q = 0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 4000; ++k) {
    term *= q / (static_cast<double>(k) * (m + k));
    sum += term;
    if (term < 1e-20 * sum) break;
  }
  return m * std::log(0.5 * x) - std::lgamma(m + 1.0) + std::log(sum);
}

// Miller backward recurrence; returns log I_m for all m = 0..mmax using the
// normalization e^{-x} (I_0 + 2 sum_k I_k) = 1.
std::vector<double> log_I_miller(int mmax, double x) {
  const int start = mmax + 16 + static_cast<int>(std::ceil(9.4 * std::sqrt(x)));
  std::vector<double> v(start + 2, 0.0);
  v[start + 1] = 0.0;
  v[start] = 1e-250;
  for (int k = start; k >= 1; --k) {
    v[k - 1] = v[k + 1] + (2.0 * k / x) * v[k];
    if (v[k - 1] > 1e280) {
      // Only the ratios matter; rescale everything written so far.
      for (int j = k - 1; j <= start + 1; ++j) v[j] *= 1e-280;
    }
  }
  double norm = v[0];
  for (int k = 1; k <= start; ++k) norm += 2.0 * v[k];
  // e^{-x} I_m = v[m] / norm  =>  log I_m = log v[m] - log norm + x
  std::vector<double> out(mmax + 1);
  for (int m = 0; m <= mmax; ++m)
    out[m] = std::log(v[m]) - std::log(norm) + x;
  return out;
}

// K_0, K_1 for x <= 2 by the classical log-series.
void K01_series(double x, double& k0, double& k1) {
  const double q = 0.25 * x * x;
  const double lx = std::log(0.5 * x);
  // I_0, I_1 and the psi-weighted companion sums.
  double term = 1.0, i0 = 1.0, s0 = 0.0, hk = 0.0;
  for (int k = 1; k < 60; ++k) {
    term *= q / (static_cast<double>(k) * k);
    hk += 1.0 / k;
    i0 += term;
    s0 += term * hk;
    if (term < 1e-19 * i0) break;
  }
  k0 = -(lx + kEulerGamma) * i0 + s0;

  term = 1.0;
  double i1sum = 1.0, s1 = 0.0;
  hk = 0.0;
  // K_1 = 1/x + ln(x/2) I_1 - (x/4) sum_k [2 psi(k+1) + 1/(k+1)] q^k / (k!(k+1)!)
  for (int k = 0; k < 60; ++k) {
    if (k > 0) {
      term *= q / (static_cast<double>(k) * (k + 1));
      hk += 1.0 / k;
      i1sum += term;
    }
    s1 += term * (2.0 * (hk - kEulerGamma) + 1.0 / (k + 1));
    if (k > 2 && term < 1e-19 * i1sum) break;
  }
  const double i1 = 0.5 * x * i1sum;
  k1 = 1.0 / x + lx * i1 - 0.25 * x * s1;
}

// Scaled e^{+x} K_0, K_1 for x > 2 via the Thompson-Barnett continued
// fraction (CF2) at order nu = 0.
void K01_cf2_scaled(double x, double& k0e, double& k1e) {
  const double eps = 1e-16;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  const double a1 = 0.25;  // 1/4 - nu^2 with nu = 0
  double q = a1, c = a1, a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i < 800; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::fabs(dels / s) <= eps) break;
  }
  h = a1 * h;
  k0e = std::sqrt(kPi / (2.0 * x)) / s;
  k1e = k0e * (x + 0.5 - h) / x;
}

}  // namespace

ScaledValue scaled_from_log(int sign, double log_magnitude) {
  if (sign == 0) return ScaledValue{0.0, 0.0};
  const double e = std::floor(log_magnitude / kLn2);
  double mant = std::exp(log_magnitude - e * kLn2);  // in [1,2)
  mant = std::min(std::max(mant, 1.0), std::nextafter(2.0, 1.0));
  return ScaledValue{sign > 0 ? mant : -mant, e * kLn2};
}

namespace specfun_detail {

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

std::vector<double> log_bessel_I(int mmax, double x) {
  if (mmax < 0 || !(x > 0))
    throw DomainError("log_bessel_I: bad arguments");
  if (x <= 30.0) {
    std::vector<double> out(mmax + 1);
    for (int m = 0; m <= mmax; ++m) out[m] = log_I_series(m, x);
    return out;
  }
  return log_I_miller(mmax, x);
}

std::vector<double> log_bessel_K(int mmax, double x) {
  if (mmax < 0)
    throw DomainError("log_bessel_K: bad order");
  if (!(x >= 1e-12))
    throw DomainError("log_bessel_K: x below 1e-12 (logarithmic singularity)");
  double lk0, lk1;
  if (x <= 2.0) {
    double k0, k1;
    K01_series(x, k0, k1);
    lk0 = std::log(k0);
    lk1 = std::log(k1);
  } else {
    double k0e, k1e;
    K01_cf2_scaled(x, k0e, k1e);
    lk0 = std::log(k0e) - x;
    lk1 = std::log(k1e) - x;
  }
  std::vector<double> out(mmax + 1);
  out[0] = lk0;
  if (mmax >= 1) out[1] = lk1;
  // Upward recurrence, forward stable for K; carried as mantissa pairs with a
  // shared additive log to avoid overflow at large m / small x.
  double km1 = std::exp(lk0 - lk1), k = 1.0, acc = lk1;
  for (int m = 1; m < mmax; ++m) {
    double kp1 = km1 + (2.0 * m / x) * k;
    km1 = k;
    k = kp1;
    if (k > 1e250) {
      const double s = std::log(k);
      km1 *= std::exp(-s);
      k = 1.0;
      acc += s;
    }
    out[m + 1] = std::log(k) + acc;
  }
  return out;
}

void log_bessel_derivs(int mmax, double x,
                       std::vector<double>& log_Ip,
                       std::vector<double>& log_Kp_abs) {
  const auto li = log_bessel_I(mmax + 1, x);
  const auto lk = log_bessel_K(mmax + 1, x);
  log_Ip.resize(mmax + 1);
  log_Kp_abs.resize(mmax + 1);
  log_Ip[0] = li[1];
  log_Kp_abs[0] = lk[1];
  for (int m = 1; m <= mmax; ++m) {
    log_Ip[m] = log_add(li[m - 1], li[m + 1]) - kLn2;
    log_Kp_abs[m] = log_add(lk[m - 1], lk[m + 1]) - kLn2;
  }
}

std::vector<double> bessel_J_all(int mmax, double x) {
  if (mmax < 0 || !(x > 0))
    throw DomainError("bessel_J_all: bad arguments");
  auto run = [&](int start) {
    std::vector<double> v(start + 2, 0.0);
    v[start + 1] = 0.0;
    v[start] = 1e-250;
    for (int k = start; k >= 1; --k) {
      v[k - 1] = (2.0 * k / x) * v[k] - v[k + 1];
      if (std::fabs(v[k - 1]) > 1e280) {
        for (int j = k - 1; j <= start + 1; ++j) v[j] *= 1e-280;
      }
    }
    double norm = v[0];
    for (int k = 2; k <= start; k += 2) norm += 2.0 * v[k];
    std::vector<double> out(mmax + 1);
    for (int m = 0; m <= mmax; ++m) out[m] = v[m] / norm;
    return out;
  };
  int start = std::max(mmax, static_cast<int>(x)) + 20;
  if (start % 2) ++start;
  auto a = run(start);
  for (int iter = 0; iter < 6; ++iter) {
    auto b = run(start + 24);
    double num = 0.0, den = 0.0;
    for (int m = 0; m <= mmax; ++m) {
      num = std::max(num, std::fabs(a[m] - b[m]));
      den = std::max(den, std::fabs(b[m]));
    }
    a = std::move(b);
    start += 24;
    if (num <= 5e-14 * std::max(den, 1e-3)) break;
  }
  return a;
}

}  // namespace specfun_detail

ScaledValue bessel_I_scaled(int m, double x) {
  check_IK_domain(m, x, 0.0);
  const auto li = specfun_detail::log_bessel_I(m, x);
  return scaled_from_log(+1, li[m]);
}

ScaledValue bessel_K_scaled(int m, double x) {
  check_IK_domain(m, x, 1e-12);
  const auto lk = specfun_detail::log_bessel_K(m, x);
  return scaled_from_log(+1, lk[m]);
}

std::pair<ScaledValue, ScaledValue> bessel_derivatives(int m, double x) {
  check_IK_domain(m, x, 1e-12);
  std::vector<double> lip, lkp;
  specfun_detail::log_bessel_derivs(m, x, lip, lkp);
  return {scaled_from_log(+1, lip[m]), scaled_from_log(-1, lkp[m])};
}

double bessel_J(int m, double x) {
  if (m < 0 || m > 60)
    throw DomainError("bessel_J: order out of range [0,60]");
  if (!(x > 0) || x > 100.0)
    throw DomainError("bessel_J: argument out of range (0,100]");
  return specfun_detail::bessel_J_all(m, x)[m];
}

double bessel_J_deriv(int m, double x) {
  if (m < 0 || m > 60)
    throw DomainError("bessel_J_deriv: order out of range [0,60]");
  if (!(x > 0) || x > 100.0)
    throw DomainError("bessel_J_deriv: argument out of range (0,100]");
  const auto j = specfun_detail::bessel_J_all(m + 1, x);
  if (m == 0) return -j[1];
  return 0.5 * (j[m - 1] - j[m + 1]);
}

double bessel_Y0(double x) {
  if (!(x > 0) || x > 1e3)
    throw DomainError("bessel_Y0: argument out of range (0,1e3]");
  if (x <= 14.0) {
    const double q = 0.25 * x * x;
    double term = 1.0, hk = 0.0, sum = 0.0;
    for (int k = 1; k < 80; ++k) {
      term *= q / (static_cast<double>(k) * k);
      hk += 1.0 / k;
      const double contrib = ((k % 2) ? 1.0 : -1.0) * hk * term;
      sum += contrib;
      if (std::fabs(term) < 1e-19) break;
    }
    const double j0 = specfun_detail::bessel_J_all(0, x)[0];
    return (2.0 / kPi) * ((std::log(0.5 * x) + kEulerGamma) * j0 + sum);
  }
  // Hankel asymptotic expansion.  With t_j = prod_{i<=j} (2i-1)^2/(8 i x):
  //   P0 = 1 - t_2 + t_4 - ...,   Q0 = -t_1 + t_3 - t_5 + ...
  double a = 1.0, p = 1.0, q = 0.0;
  for (int j = 1; j < 40; ++j) {
    const double prev = a;
    a *= (2.0 * j - 1.0) * (2.0 * j - 1.0) / (8.0 * j * x);
    if (j > 1 && a > prev) break;  // asymptotic series started diverging
    if (j % 2 == 1) {
      q += (j % 4 == 1 ? -1.0 : 1.0) * a;
    } else {
      p += (j % 4 == 2 ? -1.0 : 1.0) * a;
    }
    if (a < 1e-17) break;
  }
  const double chi = x - 0.25 * kPi;
  return std::sqrt(2.0 / (kPi * x)) * (p * std::sin(chi) + q * std::cos(chi));
}

}  // namespace casimir
