#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hexact/heston.hpp"

namespace hexact {

// Built-in parameter sets: case1 .. case4 (European calls), asian, barrier.
[[nodiscard]] std::vector<std::string> named_cases();
// Throws ConfigError for unknown names.
[[nodiscard]] HestonParams named_case(std::string_view name);

// Everything a pricing or moment run needs.
struct RunConfig {
  std::string case_name = "custom";
  HestonParams params;
  SimulationOptions sim;
  int steps = 0;          // grid steps per year: barrier monitoring dates; Euler steps (0: sqrt rule)
  double strike = 100.0;
  double lower = 90.0;    // barrier
  double upper = 110.0;
  int fixings = 0;        // Asian fixings; 0 selects one per year
  std::string tables_dir;
  std::string output;     // CSV path; empty for none

  // Euler steps to the horizon implied by `steps` (0 keeps the sqrt rule).
  [[nodiscard]] int euler_steps_to_horizon() const;
  [[nodiscard]] int resolved_fixings() const;
};

// Recognised keys: case, kappa, theta, sigma, rho, t, v0, s0, r, scheme, K,
// n_paths, steps, seed, tables_dir, output, strike, lower, upper, fixings,
// threads.  Setting `case` loads the named parameters (overwriting the model
// keys).  Throws ConfigError for unknown keys or unparsable values.
void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

// key = value lines; '#' starts a comment; blank lines ignored.  Keys keep
// file order; `case` is applied first so explicit keys override it.
[[nodiscard]] std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text,
                                                                               const std::string& origin);
[[nodiscard]] std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);
void apply_config(RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& entries);

// CSV: scheme,case,strike,estimate,std_error,n_paths,K,proposals_mean,seconds
[[nodiscard]] std::string csv_header();
// `strike` is the call strike, or "lower:upper" for the barrier.
[[nodiscard]] std::string csv_row(const std::string& case_name, const std::string& strike, const PricingReport& r);
// Appends a row, writing the header first if the file is new or empty.
void append_csv(const std::string& path, const std::string& case_name, const std::string& strike,
                const PricingReport& r);

}  // namespace hexact
