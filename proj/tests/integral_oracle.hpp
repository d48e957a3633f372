#pragma once
// Cumulants of the bridge integral under the squared-Bessel measure assembled
// from the series representation alone (zeta values, compound Poisson levels,
// Bessel pmf), independent of the closed-form Laplace transform.
#include <array>
#include <cmath>

#include "hexact/conditional_integral.hpp"
#include "hexact/variates.hpp"

namespace series_oracle {

using Cumulants = std::array<double, 4>;

inline double zeta_even(int m) {
  const double pi2 = M_PI * M_PI;
  switch (m) {
    case 1: return pi2 / 6;
    case 2: return pi2 * pi2 / 90;
    case 3: return pi2 * pi2 * pi2 / 945;
    default: return pi2 * pi2 * pi2 * pi2 / 9450;
  }
}

inline double factorial(int n) { return std::tgamma(n + 1.0); }

// S = (2/pi^2) sum eps_l / l^2.
inline Cumulants cumulants_s() {
  Cumulants k{};
  for (int m = 1; m <= 4; ++m) k[m - 1] = factorial(m - 1) * std::pow(2 / (M_PI * M_PI), m) * zeta_even(m);
  return k;
}

// C^h = (2/pi^2) sum Gamma(h)_l / (l - 1/2)^2; sum (l-1/2)^-2m = (4^m - 1) zeta(2m).
inline Cumulants cumulants_c(double h) {
  Cumulants k{};
  for (int m = 1; m <= 4; ++m)
    k[m - 1] = h * factorial(m - 1) * std::pow(2 / (M_PI * M_PI), m) * (std::pow(4.0, m) - 1) * zeta_even(m);
  return k;
}

inline Cumulants raw_from(const Cumulants& k) {
  return {k[0], k[1] + k[0] * k[0], k[2] + 3 * k[1] * k[0] + std::pow(k[0], 3),
          k[3] + 4 * k[2] * k[0] + 3 * k[1] * k[1] + 6 * k[1] * k[0] * k[0] + std::pow(k[0], 4)};
}

inline Cumulants cumulants_from_raw(const Cumulants& m) {
  const double k1 = m[0];
  const double k2 = m[1] - k1 * k1;
  const double k3 = m[2] - 3 * m[1] * k1 + 2 * k1 * k1 * k1;
  const double k4 = m[3] - 4 * m[2] * k1 - 3 * m[1] * m[1] + 12 * m[1] * k1 * k1 - 6 * std::pow(k1, 4);
  return {k1, k2, k3, k4};
}

inline Cumulants cumulants_x1(const hexact::BridgeConfig& c) {
  const auto ms = raw_from(cumulants_s());
  const double a = c.a0 + c.a_tau;
  Cumulants k{};
  // sum_n lambda_n (tau^2/4^n)^m = a tau^(2m-1) / 2 / (1 - 2^(1-2m)).
  for (int m = 1; m <= 4; ++m) k[m - 1] = a * std::pow(c.tau, 2 * m - 1) / 2 / (1 - std::pow(2.0, 1 - 2 * m)) * ms[m - 1];
  return k;
}

inline Cumulants cumulants_levels(double h, double tau) {
  const auto kc = cumulants_c(h);
  Cumulants k{};
  for (int m = 1; m <= 4; ++m) k[m - 1] = kc[m - 1] * std::pow(tau, 2 * m) / (std::pow(4.0, m) - 1);
  return k;
}

inline Cumulants cumulants_bessel(double nu, double z) {
  Cumulants m{};
  if (z == 0) return m;
  for (std::uint64_t n = 0; n < 2000; ++n) {
    const double p = std::exp(hexact::bessel_log_pmf(nu, z, n));
    const double x = static_cast<double>(n);
    m[0] += p * x;
    m[1] += p * x * x;
    m[2] += p * x * x * x;
    m[3] += p * x * x * x * x;
    if (x > z + 50 && p < 1e-30) break;
  }
  return cumulants_from_raw(m);
}

// Cumulants of I = X1 + X2 + sum_{j <= eta} Z_j (full series).
inline Cumulants cumulants_integral_P(const hexact::BridgeConfig& c) {
  const auto k1 = cumulants_x1(c);
  const auto k2 = cumulants_levels(c.h, c.tau);
  const auto cz = cumulants_levels(2.0, c.tau);
  const auto e = cumulants_bessel(c.nu, c.bessel_z());
  // Compound sum over eta: K(t) = K_eta(K_Z(t)), expanded by Faa di Bruno.
  const Cumulants kz{e[0] * cz[0], e[0] * cz[1] + e[1] * cz[0] * cz[0],
                     e[0] * cz[2] + 3 * e[1] * cz[0] * cz[1] + e[2] * std::pow(cz[0], 3),
                     e[0] * cz[3] + e[1] * (4 * cz[0] * cz[2] + 3 * cz[1] * cz[1]) + 6 * e[2] * cz[0] * cz[0] * cz[1] +
                         e[3] * std::pow(cz[0], 4)};
  Cumulants k{};
  for (int i = 0; i < 4; ++i) k[i] = k1[i] + k2[i] + kz[i];
  return k;
}

}  // namespace series_oracle
