#pragma once
#include <span>

namespace hexact {

// Truncation control for convergent series.
struct SeriesControl {
  int max_terms = 5000;
  double rel_tol = 1e-18;
};

// Chebyshev sum c0*T0(z) + ... + cn*Tn(z) - c0/2 via Clenshaw's recurrence.
// z is clamped to [-1, 1].
[[nodiscard]] double clenshaw_eval(std::span<const double> coeffs, double z);

// Default switch constant Delta for an order P+1 parabolic cylinder function,
// chosen so the branch switch point Delta*(P + 3/2) sits at z = 5.8.  Below it
// the extended-precision power series loses < 1e-12 to cancellation; above it
// the optimally truncated asymptotic series is accurate to < 1e-11 for every
// P in (0, 2].  See README ("Parabolic cylinder branch switch").
[[nodiscard]] double default_switch_const(double P);

// Weber parabolic cylinder function D_order(z) for z >= 0, order > 0.
// Uses the power series below z = Delta*(order + 1/2) and the asymptotic
// series (optimally truncated) at or above it.
[[nodiscard]] double parabolic_cylinder(double order, double z,
                                        double switch_const,
                                        const SeriesControl& ctrl = {});

// The two branches, exposed for cross-checks.  Both are evaluated in
// extended precision.
[[nodiscard]] long double pcf_power_series(long double order, long double z,
                                           const SeriesControl& ctrl = {});
[[nodiscard]] long double pcf_asymptotic(long double order, long double z,
                                         const SeriesControl& ctrl = {});

// Coefficients of the power series D_order(z) = sum_k d_k z^k, k < n.
void pcf_power_coeffs(long double order, std::span<long double> out);

// Non-normalised incomplete gamma functions.
//   gamma(s, z) = int_0^z t^(s-1) e^-t dt,  Gamma(s, z) = int_z^inf ...
// upper_incomplete_gamma also accepts s <= 0 provided z >= 1.
[[nodiscard]] double lower_incomplete_gamma(double s, double z);
[[nodiscard]] double upper_incomplete_gamma(double s, double z);
[[nodiscard]] long double lower_incomplete_gamma_l(long double s, long double z);
[[nodiscard]] long double upper_incomplete_gamma_l(long double s, long double z);

// log I_nu(z) for nu > -1, z >= 0.  Returns -inf where I_nu(0) = 0 and
// +inf where I_nu(0) diverges (-1 < nu < 0).
[[nodiscard]] double log_bessel_i(double nu, double z);
[[nodiscard]] long double log_bessel_i_l(long double nu, long double z);

}  // namespace hexact
