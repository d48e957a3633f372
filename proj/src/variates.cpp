#include "hexact/variates.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <string>

#include "hexact/errors.hpp"
#include "hexact/specfun.hpp"

namespace hexact {

double sample_exponential(RngStream& rng) { return -std::log(rng.next_uniform()); }

double sample_normal(double mean, double stddev, RngStream& rng) {
  if (!(stddev >= 0)) throw InvalidArgument("sample_normal: stddev must be nonnegative");
  const double u = rng.next_uniform();
  // Phi^-1(u) = -sqrt(2) erfc^-1(2u), accurate in both tails.
  const double z = -M_SQRT2 * boost::math::erfc_inv(2.0 * u);
  return mean + stddev * z;
}

double sample_gamma(double shape, double rate, RngStream& rng) {
  if (!(shape > 0)) throw InvalidArgument("sample_gamma: shape must be positive");
  if (!(rate > 0)) throw InvalidArgument("sample_gamma: rate must be positive");
  double boost_factor = 1.0;
  double a = shape;
  if (a < 1.0) {
    // Gamma(a) = Gamma(a + 1) * U^(1/a); done in logs to keep tiny shapes finite.
    boost_factor = std::exp(std::log(rng.next_uniform()) / a);
    a += 1.0;
  }
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = sample_normal(0.0, 1.0, rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.next_uniform();
    if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v * boost_factor / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * boost_factor / rate;
  }
}

std::uint64_t sample_poisson_inversion(double mean, RngStream& rng) {
  if (!(mean >= 0)) throw InvalidArgument("sample_poisson: mean must be nonnegative");
  if (mean == 0) return 0;
  const double u = rng.next_uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  while (u > cdf) {
    ++k;
    p *= mean / static_cast<double>(k);
    const double next = cdf + p;
    if (next == cdf) break;  // remaining mass below rounding
    cdf = next;
  }
  return k;
}

std::uint64_t sample_poisson_ptrd(double mean, RngStream& rng) {
  if (!(mean >= 10)) throw InvalidArgument("sample_poisson_ptrd: requires mean >= 10");
  const double smu = std::sqrt(mean);
  const double b = 0.931 + 2.53 * smu;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    const double U = rng.next_uniform() - 0.5;
    double V = rng.next_uniform();
    const double us = 0.5 - std::fabs(U);
    const double kf = std::floor((2.0 * a / us + b) * U + mean + 0.43);
    if (us >= 0.07 && V <= vr) return static_cast<std::uint64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && V > us)) continue;
    V = std::log(V * inv_alpha / (a / (us * us) + b));
    if (V <= -mean + kf * log_mean - std::lgamma(kf + 1.0)) return static_cast<std::uint64_t>(kf);
  }
}

std::uint64_t sample_poisson(double mean, RngStream& rng) {
  if (!(mean >= 0)) throw InvalidArgument("sample_poisson: mean must be nonnegative");
  if (mean < 10.0) return sample_poisson_inversion(mean, rng);
  return sample_poisson_ptrd(mean, rng);
}

double bessel_log_pmf(double nu, double z, std::uint64_t n) {
  if (z == 0) return n == 0 ? 0.0 : -INFINITY;
  const double nn = static_cast<double>(n);
  return (2.0 * nn + nu) * std::log(z / 2) - std::lgamma(nn + 1.0) - std::lgamma(nn + nu + 1.0) -
         log_bessel_i(nu, z);
}

std::uint64_t sample_bessel_count(double nu, double z, RngStream& rng) {
  if (!(nu > -1)) throw InvalidArgument("sample_bessel_count: nu must exceed -1");
  if (!(z >= 0)) throw InvalidArgument("sample_bessel_count: z must be nonnegative");
  if (z == 0) return 0;
  const double u = rng.next_uniform();
  const double log_half_z2 = 2.0 * std::log(z / 2);
  double logp = bessel_log_pmf(nu, z, 0);
  double cdf = 0.0;
  for (std::uint64_t n = 0;; ++n) {
    const double p = std::exp(logp);
    cdf += p;
    if (u <= cdf) return n;
    const double nn = static_cast<double>(n);
    // Beyond the mode with negligible remaining mass: rounding left u > cdf.
    if (nn + 1.0 > z && p < 1e-300) return n;
    logp += log_half_z2 - std::log(nn + 1.0) - std::log(nn + 1.0 + nu);
  }
}

CirTransitionParams CirTransitionParams::make(double kappa, double theta, double sigma, double dt) {
  CirTransitionParams p{kappa, theta, sigma, 4.0 * kappa * theta / (sigma * sigma), dt};
  p.validate();
  return p;
}

void CirTransitionParams::validate() const {
  if (!(kappa > 0 && theta > 0 && sigma > 0 && dt > 0))
    throw InvalidArgument("CirTransitionParams: kappa, theta, sigma, dt must be positive");
  const double expect = 4.0 * kappa * theta / (sigma * sigma);
  if (!(std::fabs(delta - expect) <= 1e-14 * expect))
    throw InvalidArgument("CirTransitionParams: delta inconsistent with 4 kappa theta / sigma^2");
}

double CirTransitionParams::scale() const {
  return -sigma * sigma * std::expm1(-kappa * dt) / (4.0 * kappa);
}

double CirTransitionParams::noncentrality(double v0) const {
  return v0 * std::exp(-kappa * dt) / scale();
}

double sample_cir_transition(double v0, const CirTransitionParams& p, RngStream& rng) {
  if (!(v0 >= 0)) throw InvalidArgument("sample_cir_transition: v0 must be nonnegative");
  const double lambda = p.noncentrality(v0);
  const std::uint64_t N = sample_poisson(0.5 * lambda, rng);
  return p.scale() * sample_gamma(0.5 * p.delta + static_cast<double>(N), 0.5, rng);
}

}  // namespace hexact
