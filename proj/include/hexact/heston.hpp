#pragma once
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hexact/components.hpp"
#include "hexact/conditional_integral.hpp"
#include "hexact/heston_params.hpp"
#include "hexact/rng.hpp"
#include "hexact/variates.hpp"

namespace hexact {

enum class Scheme {
  ExactDirect,         // exact transition, integral by direct inversion
  ExactGammaBaseline,  // exact transition, integral by the truncated gamma series
  EulerFullTruncation, // full-truncation Euler time stepping
};

// "exact-direct", "exact-gamma-baseline", "euler-ft".
[[nodiscard]] std::string_view to_string(Scheme scheme);
// Throws InvalidArgument for unknown names.
[[nodiscard]] Scheme parse_scheme(std::string_view name);
[[nodiscard]] bool is_exact(Scheme scheme);

struct StepResult {
  double s = 0.0;
  double v = 0.0;
  double integrated_variance = 0.0;  // int V ds over the step (exact schemes)
  std::uint64_t proposals = 0;       // acceptance-rejection proposals used
};

// Exact transition of (S, V) over a fixed step dt.  Holds the per-step
// constants; a stepper is cheap to copy and must not be shared between threads.
class ExactStepper {
public:
  ExactStepper(const HestonParams& params, double dt, int K, const TableSet& tables,
               X2Mode mode = X2Mode::DirectInversion);

  // V_dt from the noncentral chi-square law, int V ds from the conditional
  // integral, then log S from its conditional Gaussian law:
  //   mean mu dt + (rho/sigma)(V_dt - v - kappa theta dt) + (rho kappa/sigma - 1/2) IV,
  //   variance (1 - rho^2) IV.
  [[nodiscard]] StepResult step(double s, double v, RngStream& rng);

  [[nodiscard]] double dt() const { return dt_; }

private:
  HestonParams params_;
  double dt_;
  const TableSet* tables_;
  CirTransitionParams cir_;
  BridgeConfig bridge_;  // endpoints rewritten per step
  double scale_;         // 4 / sigma^2
};

// One exact step; builds an ExactStepper per call (use the class in loops).
// Throws InvalidArgument for s <= 0, v < 0 or dt <= 0; RunawayRejection propagates.
[[nodiscard]] StepResult exact_step(double s, double v, double dt, const HestonParams& params, int K,
                                    const TableSet& tables, RngStream& rng,
                                    X2Mode mode = X2Mode::DirectInversion);

// Full-truncation Euler over n_steps equal steps of dt, in place on (log S, V):
//   V <- V + kappa (theta - V+) dt + sigma sqrt(V+ dt) Z1,
//   log S <- log S + (mu - V+/2) dt + sqrt(V+ dt) (rho Z1 + sqrt(1 - rho^2) Z2),  V+ = max(V, 0).
void euler_advance(double& log_s, double& v, const HestonParams& params, double dt, int n_steps, RngStream& rng);

struct EulerPath {
  double s = 0.0;
  double v = 0.0;
  std::vector<double> s_path;  // S at step ends (only if requested)
  std::vector<double> v_path;
};
// Euler path to params.t in n_steps steps.
[[nodiscard]] EulerPath euler_full_truncation_path(const HestonParams& params, int n_steps, RngStream& rng,
                                                   bool keep_path = false);

// Monte Carlo settings shared by the pricing routines.
struct SimulationOptions {
  Scheme scheme = Scheme::ExactDirect;
  int K = 1;
  std::uint64_t n_paths = 100'000;
  std::uint64_t seed = 20240101;
  int euler_steps = 0;   // Euler steps to the horizon; 0 selects round(sqrt(n_paths))
  unsigned threads = 0;  // 0 selects std::thread::hardware_concurrency()

  void validate() const;
  // Euler steps to the horizon after applying the sqrt(n_paths) default.
  [[nodiscard]] int resolved_euler_steps() const;
};

// Paths are simulated in fixed chunks of this size; each path draws from
// parent.split(path index) and chunk partial sums are combined in chunk
// order, so results are bit-identical for any thread count.
inline constexpr std::uint64_t kPathChunk = 4096;

struct PricingReport {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::uint64_t n_paths = 0;
  Scheme scheme = Scheme::ExactDirect;
  int K = 0;
  double proposals_mean = 0.0;  // mean acceptance-rejection proposals per integral draw (0 for Euler)
  double seconds = 0.0;         // wall time
};

// e^(-r t) E[max(S_t - strike, 0)].  Exact schemes use a single step to t.
[[nodiscard]] PricingReport price_european_call(const HestonParams& params, double strike,
                                                const SimulationOptions& opts, const TableSet& tables);

// e^(-r t) E[max(mean of S at t j / n_fixings, j = 1..n_fixings, - strike, 0)].
// Exact schemes take one step per fixing interval; Euler uses the resolved step
// count rounded up to a multiple of n_fixings.
[[nodiscard]] PricingReport price_asian_call(const HestonParams& params, double strike, int n_fixings,
                                             const SimulationOptions& opts, const TableSet& tables);

// e^(-r t) P(lower < S < upper at every date t j / (steps_per_year t)).
// steps_per_year * t must be a positive integer.  Exact schemes step from
// date to date; Euler takes ceil(euler_steps / dates) substeps per interval
// (one per interval when euler_steps is 0).
[[nodiscard]] PricingReport price_double_no_touch(const HestonParams& params, double lower, double upper,
                                                  double steps_per_year, const SimulationOptions& opts,
                                                  const TableSet& tables);

struct TerminalState {
  double s = 0.0;
  double v = 0.0;
};
// Terminal (S_t, V_t) of n_paths paths taking n_steps equal steps (exact or Euler).
[[nodiscard]] std::vector<TerminalState> simulate_terminal(const HestonParams& params, int n_steps,
                                                           const SimulationOptions& opts, const TableSet& tables);

// One row of the conditional-integral moment study.
struct MomentErrorRow {
  double v_t = 0.0;
  int K = 0;
  int order = 0;
  double exact = 0.0;     // E[(int V ds)^order | v0, v_t]
  double sample = 0.0;
  double abs_error = 0.0;
  double three_se = 0.0;  // 3 standard errors of the sample moment
  [[nodiscard]] bool significant() const { return abs_error > three_se; }
};

// Absolute errors of the first four raw moments of int_0^t V ds given
// V_0 = params.v0, V_t = v_t, for every (v_t, K), against the exact moments.
[[nodiscard]] std::vector<MomentErrorRow> moment_error_report(const HestonParams& params, double t,
                                                              const std::vector<double>& v_t_list,
                                                              const std::vector<int>& K_list,
                                                              std::uint64_t n_paths, std::uint64_t seed,
                                                              const TableSet& tables,
                                                              X2Mode mode = X2Mode::DirectInversion,
                                                              unsigned threads = 0);

// Relative first-moment bias of the direct-inversion X2 draw, whose degree h
// is rounded to three decimals.
struct X2BiasReport {
  double h = 0.0;
  double h_rounded = 0.0;
  double predicted = 0.0;       // (h~ - h) / h
  double measured = 0.0;        // E[X2 draw] / E[X2] - 1
  double standard_error = 0.0;
  std::uint64_t draws = 0;
};

// Measures E[X2 draw] with stratified uniforms: every table evaluation in the
// X2 draw uses u = (i + U_i) / strata, i = 0..strata-1, independently per
// evaluation slot (a Latin hypercube design, so the sample mean is unbiased).
// The standard error comes from `replicates` independent designs.
[[nodiscard]] X2BiasReport x2_rounding_bias(const HestonParams& params, std::uint64_t strata, int replicates,
                                            std::uint64_t seed, const TableSet& tables);

}  // namespace hexact
