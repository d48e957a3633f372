#pragma once
#include <cstdint>
#include <vector>

#include "hexact/components.hpp"
#include "hexact/heston_params.hpp"
#include "hexact/rng.hpp"

namespace hexact {

// How X2 and the Z_j are drawn.
enum class X2Mode {
  DirectInversion,     // tau^2 Y_2^h and tau^2 Z' from the shipped tables
  TruncationBaseline,  // truncated gamma series per level (approximate, for comparison)
};

// Default proposal cap for the acceptance-rejection step.
inline constexpr std::uint64_t kDefaultMaxProposals = 1'000'000;
// Gamma terms kept per level by the truncation baseline.
inline constexpr int kBaselineInnerTerms = 200;

// The squared Bessel bridge integral I = int_0^tau A_s ds given A_0 = a0,
// A_tau = a_tau, for the time-changed variance A_s = V_(4 s / sigma^2).
struct BridgeConfig {
  double tau = 0.0;    // sigma^2 t / 4
  double a0 = 0.0;     // v0
  double a_tau = 0.0;  // vt
  double delta = 0.0;  // 4 kappa theta / sigma^2
  double nu = 0.0;     // delta / 2 - 1
  double h = 0.0;      // delta / 2
  double q = 0.0;      // 2 kappa / sigma^2
  int K = 0;           // outer levels simulated exactly
  X2Mode x2_mode = X2Mode::DirectInversion;
  std::uint64_t max_proposals = kDefaultMaxProposals;
  HDigits h_digits;  // three-decimal split of h (direct inversion only)

  // Derives nu, h and h_digits from delta.  Throws InvalidArgument on a
  // violated invariant.
  [[nodiscard]] static BridgeConfig make(double tau, double a0, double a_tau, double delta, double q, int K,
                                         X2Mode mode = X2Mode::DirectInversion);
  // Bridge for a Heston step of length t from v0 to vt.
  [[nodiscard]] static BridgeConfig from_heston(const HestonParams& p, double v0, double vt, double t, int K,
                                                X2Mode mode = X2Mode::DirectInversion);
  void validate() const;
  // Bessel argument sqrt(a0 a_tau) / tau.
  [[nodiscard]] double bessel_z() const;
};

// Mean and variance of the dropped tails R1^K = sum_{n>K} of X1 and
// R2^K = sum_{n>K} of X2.
struct RemainderMoments {
  double mean1 = 0.0;
  double var1 = 0.0;
  double mean2 = 0.0;
  double var2 = 0.0;
};
[[nodiscard]] RemainderMoments remainder_moments(const BridgeConfig& cfg, int K);

// Full-series means and variances of X1, X2 and one Z (independent of K).
struct ComponentMoments {
  double mean_x1 = 0.0;
  double var_x1 = 0.0;
  double mean_x2 = 0.0;
  double var_x2 = 0.0;
  double mean_z = 0.0;
  double var_z = 0.0;
};
[[nodiscard]] ComponentMoments component_moments(const BridgeConfig& cfg);

// Gamma draw with the given mean and variance; 0 when the mean is 0.
[[nodiscard]] double sample_moment_matched_gamma(double mean, double var, RngStream& rng);

// X1^K + Gamma1^K.  If max_count is given it is raised to the largest
// Poisson level count drawn.
[[nodiscard]] double sample_x1(const BridgeConfig& cfg, const TableSet& tables, RngStream& rng,
                               std::uint64_t* max_count = nullptr);
[[nodiscard]] double sample_x2(const BridgeConfig& cfg, const TableSet& tables, RngStream& rng);
[[nodiscard]] double sample_z(const BridgeConfig& cfg, const TableSet& tables, RngStream& rng);

// One draw of I under the squared-Bessel measure: X1 + X2 + sum_{j <= eta} Z_j.
[[nodiscard]] double sample_integral_P(const BridgeConfig& cfg, const TableSet& tables, RngStream& rng);

// Normalising constant L >= 1 of the measure change; the mean number of
// proposals per accepted draw.  Throws NumericFailure if L < 1 - 1e-9.
[[nodiscard]] double acceptance_factor(const BridgeConfig& cfg);

struct IntegralDraw {
  double value = 0.0;
  std::uint64_t proposals = 0;
};
// One draw of I under the CIR measure by acceptance-rejection: propose
// Y ~ I under the squared-Bessel measure, accept with probability e^(-q^2 Y / 2).
// Throws RunawayRejection after cfg.max_proposals proposals.
[[nodiscard]] IntegralDraw sample_integral_Q(const BridgeConfig& cfg, const TableSet& tables, RngStream& rng);

// Closed-form Laplace transforms of the components at b >= 0.
[[nodiscard]] double laplace_x1(const BridgeConfig& cfg, double b);
[[nodiscard]] double laplace_x2(const BridgeConfig& cfg, double b);
[[nodiscard]] double laplace_z(const BridgeConfig& cfg, double b);

// log of the Laplace transform of I under the squared-Bessel measure:
//   (zeta / sinh zeta) exp((a0 + a_tau)/(2 tau) (1 - zeta coth zeta))
//     * I_nu(z zeta / sinh zeta) / I_nu(z),  zeta = sqrt(2b) tau, z = sqrt(a0 a_tau)/tau.
// Continued analytically to -pi^2 / (2 tau^2) < b < 0 (zeta imaginary).
[[nodiscard]] long double log_laplace_fP(const BridgeConfig& cfg, long double b);
[[nodiscard]] double laplace_fP(const BridgeConfig& cfg, double b);
// Under the CIR measure: L_P(b + q^2/2) / L_P(q^2/2).
[[nodiscard]] double laplace_fQ(const BridgeConfig& cfg, double b);

// Raw moments E[I^k], k = 1..order (order <= 4), under the CIR measure, from
// Richardson-extrapolated central differences of log L_Q at 0.
[[nodiscard]] std::vector<double> exact_moments_Q(const BridgeConfig& cfg, int order);
// Same under the squared-Bessel measure.
[[nodiscard]] std::vector<double> exact_moments_P(const BridgeConfig& cfg, int order);

// E[s^eta] for eta ~ Bessel(nu, z), summed from the pmf.
[[nodiscard]] double bessel_pgf(double nu, double z, double s);

// Integrated variance int_0^t V ds given V_0 = v0, V_t = vt under the model
// measure: (4 / sigma^2) times a draw of sample_integral_Q.
[[nodiscard]] IntegralDraw conditional_integral_draw(double v0, double vt, double t, const HestonParams& params, int K,
                                                     const TableSet& tables, RngStream& rng,
                                                     X2Mode mode = X2Mode::DirectInversion);

}  // namespace hexact
