#include "hexact/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hexact/errors.hpp"

namespace hexact {

namespace {

constexpr long double kEpsL = std::numeric_limits<long double>::epsilon();
constexpr long double kTinyL = 1e-4000L;
constexpr long double kPiL = 3.141592653589793238462643383279502884L;

// 1/Gamma(x), exact zero at the poles.
long double rgamma_l(long double x) {
  if (x <= 0 && x == std::floor(x)) return 0.0L;
  return 1.0L / std::tgamma(x);
}

// gamma(s, x) by its power series; intended for x < s + 1 and s > 0.
long double lower_series(long double s, long double x) {
  if (x == 0) return 0.0L;
  long double ap = s;
  long double term = 1.0L / s;
  long double sum = term;
  for (int n = 1; n < 100000; ++n) {
    ap += 1;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEpsL) break;
  }
  return sum * std::exp(-x + s * std::log(x));
}

// Gamma(s, x) by Legendre's continued fraction (modified Lentz).  Valid for
// any real s when x > 0; converges quickly once x > s + 1.
long double upper_cf(long double s, long double x) {
  long double b = x + 1 - s;
  long double c = 1 / kTinyL;
  long double d = 1 / b;
  long double h = d;
  for (int i = 1; i < 100000; ++i) {
    const long double an = -i * (i - s);
    b += 2;
    d = an * d + b;
    if (std::fabs(d) < kTinyL) d = kTinyL;
    c = b + an / c;
    if (std::fabs(c) < kTinyL) c = kTinyL;
    d = 1 / d;
    const long double del = d * c;
    h *= del;
    if (std::fabs(del - 1) < kEpsL) break;
  }
  return std::exp(-x + s * std::log(x)) * h;
}

}  // namespace

double clenshaw_eval(std::span<const double> coeffs, double z) {
  if (coeffs.empty()) throw InvalidArgument("clenshaw_eval: empty coefficient list");
  z = std::clamp(z, -1.0, 1.0);
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = coeffs.size() - 1; k >= 1; --k) {
    const double b0 = 2.0 * z * b1 - b2 + coeffs[k];
    b2 = b1;
    b1 = b0;
  }
  return z * b1 - b2 + 0.5 * coeffs[0];
}

double default_switch_const(double P) {
  if (!(P > 0)) throw InvalidArgument("default_switch_const: P must be positive");
  return 5.8 / (P + 1.5);
}

void pcf_power_coeffs(long double order, std::span<long double> out) {
  const long double nu = order;
  const long double a = -nu - 0.5L;
  const long double sqpi = std::sqrt(kPiL);
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (k == 0) {
      out[k] = std::pow(2.0L, nu / 2) * sqpi * rgamma_l((1 - nu) / 2);
    } else if (k == 1) {
      out[k] = -std::pow(2.0L, (nu + 1) / 2) * sqpi * rgamma_l(-nu / 2);
    } else {
      const long double m = static_cast<long double>(k - 2);
      long double num = a * out[k - 2];
      if (k >= 4) num += out[k - 4] / 4;
      out[k] = num / ((m + 2) * (m + 1));
    }
  }
}

long double pcf_power_series(long double order, long double z, const SeriesControl& ctrl) {
  // d_{k+2} (k+2)(k+1) = a d_k + d_{k-2}/4 with a = -order - 1/2.
  if (!(z >= 0)) throw InvalidArgument("pcf_power_series: z must be nonnegative");
  const long double nu = order;
  const long double a = -nu - 0.5L;
  const long double sqpi = std::sqrt(kPiL);
  long double dkm4 = 0, dkm3 = 0;
  long double dkm2 = std::pow(2.0L, nu / 2) * sqpi * rgamma_l((1 - nu) / 2);
  long double dkm1 = -std::pow(2.0L, (nu + 1) / 2) * sqpi * rgamma_l(-nu / 2);
  long double sum = dkm2 + dkm1 * z;
  if (z == 0) return sum;
  long double prev_term = std::fabs(dkm1 * z);
  long double zk = z * z;  // z^k for the coefficient about to be added
  const long double z2 = z * z;
  for (int k = 2; k < ctrl.max_terms; ++k) {
    const long double kk = static_cast<long double>(k);
    const long double dk = (a * dkm2 + dkm4 / 4) / (kk * (kk - 1));
    const long double term = std::fabs(dk * zk);
    sum += dk * zk;
    dkm4 = dkm3;
    dkm3 = dkm2;
    dkm2 = dkm1;
    dkm1 = dk;
    zk *= z;
    // Past the peak of the terms, stop once two consecutive terms are negligible.
    if (kk > z2 + 4 &&
        term + prev_term <= static_cast<long double>(ctrl.rel_tol) * std::fabs(sum))
      return sum;
    prev_term = term;
  }
  throw ConvergenceFailure("parabolic_cylinder: power series did not converge within " +
                               std::to_string(ctrl.max_terms) + " terms",
                           static_cast<double>(sum));
}

long double pcf_asymptotic(long double order, long double z, const SeriesControl& ctrl) {
  if (!(z > 0)) throw InvalidArgument("pcf_asymptotic: z must be positive");
  const long double nu = order;
  const long double inv2z2 = 1.0L / (2 * z * z);
  long double term = 1;
  long double sum = 1;
  // For integer order the series terminates and is exact; otherwise stop at
  // the smallest term once past the region k < order/2 where terms may grow.
  const bool terminating = nu == std::floor(nu);
  for (int k = 0; k < ctrl.max_terms; ++k) {
    const long double kk = static_cast<long double>(k);
    const long double next = -term * (nu - 2 * kk) * (nu - 2 * kk - 1) * inv2z2 / (kk + 1);
    if (next == 0) break;
    if (!terminating && kk > nu / 2 && std::fabs(next) >= std::fabs(term)) break;
    sum += next;
    term = next;
    if (std::fabs(term) < kEpsL * std::fabs(sum) / 16) break;
  }
  return std::exp(-z * z / 4 + nu * std::log(z)) * sum;
}

double parabolic_cylinder(double order, double z, double switch_const, const SeriesControl& ctrl) {
  if (!(order > 0)) throw InvalidArgument("parabolic_cylinder: order must be positive");
  if (!(z >= 0)) throw InvalidArgument("parabolic_cylinder: z must be nonnegative");
  if (!(switch_const > 0)) throw InvalidArgument("parabolic_cylinder: switch constant must be positive");
  const double zs = switch_const * (order + 0.5);
  if (z < zs) return static_cast<double>(pcf_power_series(order, z, ctrl));
  return static_cast<double>(pcf_asymptotic(order, z, ctrl));
}

long double lower_incomplete_gamma_l(long double s, long double z) {
  if (!(s > 0)) throw InvalidArgument("lower_incomplete_gamma: s must be positive");
  if (!(z >= 0)) throw InvalidArgument("lower_incomplete_gamma: z must be nonnegative");
  if (z < s + 1) return lower_series(s, z);
  return std::tgamma(s) - upper_cf(s, z);
}

long double upper_incomplete_gamma_l(long double s, long double z) {
  if (!(z >= 0)) throw InvalidArgument("upper_incomplete_gamma: z must be nonnegative");
  if (s <= 0) {
    if (!(z >= 1)) throw InvalidArgument("upper_incomplete_gamma: s <= 0 requires z >= 1");
    return upper_cf(s, z);
  }
  if (z < s + 1) return std::tgamma(s) - lower_series(s, z);
  return upper_cf(s, z);
}

double lower_incomplete_gamma(double s, double z) {
  return static_cast<double>(lower_incomplete_gamma_l(s, z));
}

double upper_incomplete_gamma(double s, double z) {
  return static_cast<double>(upper_incomplete_gamma_l(s, z));
}

long double log_bessel_i_l(long double nu, long double z) {
  if (!(nu > -1)) throw InvalidArgument("log_bessel_i: nu must exceed -1");
  if (!(z >= 0)) throw InvalidArgument("log_bessel_i: z must be nonnegative");
  if (z == 0) {
    if (nu == 0) return 0.0L;
    return nu > 0 ? -std::numeric_limits<long double>::infinity()
                  : std::numeric_limits<long double>::infinity();
  }
  if (z <= 1000 || nu * nu >= 2 * z) {
    // Ascending series sum_k (z^2/4)^k / (k! (nu+1)_k), rescaled on the fly.
    const long double q = z * z / 4;
    long double term = 1, sum = 1, logscale = 0;
    constexpr long double kBig = 1e300L;
    for (long k = 1; k < 100000000L; ++k) {
      const long double kk = static_cast<long double>(k);
      const long double ratio = q / (kk * (kk + nu));
      term *= ratio;
      sum += term;
      if (sum > kBig) {
        sum /= kBig;
        term /= kBig;
        logscale += std::log(kBig);
      }
      if (ratio < 1 && term < kEpsL * sum / 4) break;
    }
    return nu * std::log(z / 2) - std::lgamma(nu + 1) + std::log(sum) + logscale;
  }
  // Hankel expansion; nu^2 < 2z keeps the terms decreasing from the start.
  const long double mu = 4 * nu * nu;
  long double term = 1, sum = 1;
  for (int k = 1; k < 1000; ++k) {
    const long double odd = 2.0L * k - 1;
    const long double next = -term * (mu - odd * odd) / (8.0L * k * z);
    if (std::fabs(next) >= std::fabs(term)) break;
    sum += next;
    term = next;
    if (std::fabs(term) < kEpsL * std::fabs(sum) / 4) break;
  }
  return z - 0.5L * std::log(2 * kPiL * z) + std::log(sum);
}

double log_bessel_i(double nu, double z) { return static_cast<double>(log_bessel_i_l(nu, z)); }

}  // namespace hexact
