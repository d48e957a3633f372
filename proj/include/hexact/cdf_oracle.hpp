#pragma once
#include <functional>
#include <optional>
#include <vector>

#include "hexact/cheb_table.hpp"

namespace hexact {

// Budgets and tolerances for the series evaluation of F_{S^P} and its inverse.
struct OracleConfig {
  int outer_terms = 20000;         // max n in the outer sum
  double switch_const = 0.0;       // Delta; y* = max(Delta (P + 3/2), y).  <= 0 selects the default:
                                   // default_switch_const(P), or no G1 at all for integer P
  int g1_terms = 4000;             // power-series budget for G1
  int g2_terms = 400;              // asymptotic-series budget for G2
  double root_tol = 1e-11;         // |F(x) - u| accepted by invert_cdf
  double outer_rel_tol = 1e-20;    // outer sum stops when a term falls below this times the sum

  void validate() const;
};

// True for P in (0, 1] or an integer in [1, 50].  Accuracy is verified for
// P <= 2; larger integers are supported on a best-effort basis.
[[nodiscard]] bool oracle_supports(double P);

// F_{S^P}(x) by the outer series over n with G = G1 + G2 (extended precision).
[[nodiscard]] long double cdf_sp_l(double P, long double x, const OracleConfig& cfg = {});
[[nodiscard]] double cdf_sp(double P, double x, const OracleConfig& cfg = {});
// 1 - F_{S^P}(x) evaluated in quad precision; used where F is within 1e-6 of one.
[[nodiscard]] long double survival_sp_q(double P, double x, const OracleConfig& cfg = {});

// Small-x leading form (1/sqrt(pi)) 2^(P+1/2) P^(P-1) x^(1/2-P) e^(-P^2/(2x)).
[[nodiscard]] double leading_cdf_left(double P, double x);

// Asymptotic quantiles: the inverse of the small-x leading form (u -> 0) and
// the gamma right tail -(2/15) log((1-u) Gamma(5P/2)) (u -> 1).
[[nodiscard]] double left_tail_quantile(double P, double u);
[[nodiscard]] double right_tail_quantile(double P, double u);

// Gamma law matching the right tail: shape 5P/2, rate 15/2.
struct GammaMatch {
  double shape = 0.0;
  double rate = 0.0;
};
[[nodiscard]] GammaMatch right_tail_gamma_match(double P);

// x with F(x) = u: geometric bracketing from the tail forms, bisection to 1e-3
// relative width, then Newton with a centred-difference derivative iterated
// until x stops moving.  Throws ConvergenceFailure if no bracket is found in
// 200 expansions or if the final |F(x) - u| exceeds cfg.root_tol.
[[nodiscard]] double invert_cdf(double P, double u, const OracleConfig& cfg = {},
                                std::optional<double> initial_guess = std::nullopt);

// x with 1 - F(x) = q, keeping full relative precision in q near zero.
[[nodiscard]] double invert_survival(double P, double q, const OracleConfig& cfg = {},
                                     std::optional<double> initial_guess = std::nullopt);

// Chebyshev coefficients of f on [-1, 1] from its values at the degree + 1
// cosine nodes; evaluate with clenshaw_eval (c0 / 2 convention).
[[nodiscard]] std::vector<double> fit_chebyshev(const std::function<double(double)>& f, int degree);

// Refit every regime of `plan` (same boundaries, scalings, k1, k2, degrees)
// against invert_cdf for the table's parameter.  Non-standardized tables only
// for P in the verified range; standardized tables are best effort.
[[nodiscard]] InverseCdfTable regenerate_table(const InverseCdfTable& plan, const OracleConfig& cfg = {});

// Max |table quantile - invert_cdf| over a logit-spaced grid.
[[nodiscard]] ValidationReport validate_against_oracle(const InverseCdfTable& table, int grid_size,
                                                       double u_lo = kTableUMin, double u_hi = kTableUMax,
                                                       const OracleConfig& cfg = {});

}  // namespace hexact
