#pragma once
#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hexact {

// Probability-space domain covered by every table; u outside it is clipped.
inline constexpr double kTableUMin = 1e-12;
inline constexpr double kTableUMax = 1.0 - 1e-12;

// Tolerance on |z(u)| - 1 at regime endpoints.  One shipped large-P regime
// maps its outer endpoint to 1 + 5.3e-7; evaluation clamps z to [-1, 1].
inline constexpr double kZRangeTol = 1e-6;

// How a regime maps u to the Chebyshev variable U(u) before z = k1*U + k2.
enum class ScalingKind {
  LogLogTail,          // log(-log(1-u))
  LogLogLeft,          // log(-log(u))                 (mirror of the tail form)
  CentralProduct,      // sqrt(2 pi)(u - F0); value = U * cheb
  CentralProductLeft,  // sqrt(2 pi)(F0 - u); value = U * cheb
  LinearCentral,       // (u_right - u) sqrt(2P/45)
  ReciprocalLogLeft,   // inverse of the small-x leading CDF asymptotics
  GammaLogRight,       // -(2/15) log((1-u) Gamma(5P/2))
  GammaRateRight,      // -(2/15) log((1-u) 15/2)
};

[[nodiscard]] std::string_view to_string(ScalingKind kind);
// Throws TableError for unknown names.
[[nodiscard]] ScalingKind parse_scaling_kind(std::string_view name);
[[nodiscard]] bool is_product_kind(ScalingKind kind);

struct RegimeSpec {
  double u_left = 0.0;
  double u_right = 0.0;
  ScalingKind kind = ScalingKind::LogLogTail;
  double k1 = 0.0;
  double k2 = 0.0;
  std::vector<double> coeffs;

  // Verbatim decimal text as read from (or to be written to) the table file.
  std::string u_right_text, k1_text, k2_text;
  std::vector<std::string> coeff_text;

  [[nodiscard]] int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

struct InverseCdfTable {
  std::string base_id;        // S1 .. S1000000, Y5 .. Y2000, Zprime
  double parameter = 0.0;     // P (or h) entering the scaling formulas
  std::string parameter_text;
  bool standardized = false;  // values are (S - P/3) / sqrt(2P/45)
  std::optional<double> anchor;  // F(0) of the standardized variable
  std::string anchor_text;
  std::vector<RegimeSpec> regimes;

  // Scaling constants derived from the parameter (filled by finalize()).
  double rl_a = 0.0, rl_b = 0.0, rl_c = 0.0;  // U = 1 / (a - b (log u + c))
  double log_gamma_5p2 = 0.0;                 // log Gamma(5P/2)
  double sd_factor = 0.0;                     // sqrt(2P/45)

  void finalize();
};

// U(u) for a regime of the table.  Domain violations are clipped and counted.
[[nodiscard]] double scale_u(const InverseCdfTable& table, const RegimeSpec& regime, double u);
// Inverse of scale_u: the u at which the regime's scaling equals U.
[[nodiscard]] double unscale_u(const InverseCdfTable& table, const RegimeSpec& regime, double U);
// 1 - unscale_u(U) computed without cancellation for the right-tail kinds
// (LLT, GL, RATE); nullopt for every other kind.
[[nodiscard]] std::optional<double> unscale_tail(const InverseCdfTable& table, const RegimeSpec& regime, double U);

// Raw table value at u (standardized units for standardized tables).
[[nodiscard]] double inverse_cdf(const InverseCdfTable& table, double u);
// Quantile in the variate's own units (destandardized where needed).
[[nodiscard]] double quantile(const InverseCdfTable& table, double u);
// Regime evaluation without the regime search or clipping.
[[nodiscard]] double eval_regime(const InverseCdfTable& table, const RegimeSpec& regime, double u);

// Number of uniforms clipped into [kTableUMin, kTableUMax] so far (all tables).
[[nodiscard]] std::uint64_t clip_count();
void reset_clip_count();

// File I/O.  load_table also runs audit_table.
[[nodiscard]] InverseCdfTable parse_table(std::string_view text, const std::string& origin = "<memory>");
[[nodiscard]] InverseCdfTable load_table(const std::string& path);
[[nodiscard]] std::string serialize_table(const InverseCdfTable& table);

struct AuditReport {
  double max_z_overshoot = 0.0;  // max over regime endpoints of |z| - 1
  double max_seam_jump = 0.0;    // variate units
  int grid_size = 0;
};

// Structural and numerical audit: contiguity, z-range, monotonicity on a
// grid in logit(u), seam continuity.  Throws TableError naming the regime.
AuditReport audit_table(const InverseCdfTable& table, int grid_size = 10000);

struct ValidationReport {
  double max_abs_error = 0.0;
  double u_at_max = 0.0;
  std::vector<double> per_regime_max;  // max abs error per regime
  std::vector<int> per_regime_points;
};

// Max |table quantile - oracle quantile| over grid_size points spaced
// uniformly in logit(u) on [u_lo, u_hi].
[[nodiscard]] ValidationReport validate_table(const InverseCdfTable& table,
                                              const std::function<double(double)>& oracle_quantile,
                                              int grid_size, double u_lo = kTableUMin,
                                              double u_hi = kTableUMax);

// logit-spaced audit grid.
[[nodiscard]] std::vector<double> logit_grid(int n, double u_lo, double u_hi);

}  // namespace hexact
