#pragma once
#include <cstdint>

#include "hexact/rng.hpp"

namespace hexact {

// Exp(1).
[[nodiscard]] double sample_exponential(RngStream& rng);

// Normal(mean, stddev) by inversion of the normal CDF.
[[nodiscard]] double sample_normal(double mean, double stddev, RngStream& rng);

// Gamma with shape-rate parameterisation (mean = shape / rate).  Marsaglia-Tsang
// squeeze; shapes below one are boosted to shape + 1 and corrected by U^(1/shape).
[[nodiscard]] double sample_gamma(double shape, double rate, RngStream& rng);

// Poisson(mean): sequential inversion for mean < 10, PTRD (transformed
// rejection with decomposition) for mean >= 10.
[[nodiscard]] std::uint64_t sample_poisson(double mean, RngStream& rng);
[[nodiscard]] std::uint64_t sample_poisson_inversion(double mean, RngStream& rng);
[[nodiscard]] std::uint64_t sample_poisson_ptrd(double mean, RngStream& rng);

// Bessel(nu, z) count: pmf (z/2)^(2n+nu) / (I_nu(z) n! Gamma(n+nu+1)), drawn by
// sequential inversion from n = 0 with the pmf carried in log space.
[[nodiscard]] std::uint64_t sample_bessel_count(double nu, double z, RngStream& rng);
[[nodiscard]] double bessel_log_pmf(double nu, double z, std::uint64_t n);

// Exact CIR transition over a step dt.
struct CirTransitionParams {
  double kappa = 0.0;
  double theta = 0.0;
  double sigma = 0.0;
  double delta = 0.0;  // 4 kappa theta / sigma^2
  double dt = 0.0;

  // Validated construction with delta derived from the other fields.
  [[nodiscard]] static CirTransitionParams make(double kappa, double theta, double sigma, double dt);
  void validate() const;
  // Scale factor sigma^2 (1 - e^-kappa dt) / (4 kappa).
  [[nodiscard]] double scale() const;
  // Noncentrality for a start value v0.
  [[nodiscard]] double noncentrality(double v0) const;
};

// V_dt | V_0 = v0 as scale * chi-square(delta, lambda), drawn through the
// Poisson-gamma mixture N ~ Poisson(lambda/2), Gamma(delta/2 + N, rate 1/2).
[[nodiscard]] double sample_cir_transition(double v0, const CirTransitionParams& p, RngStream& rng);

}  // namespace hexact
