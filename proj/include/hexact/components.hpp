#pragma once
#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hexact/cheb_table.hpp"
#include "hexact/rng.hpp"

namespace hexact {

// Bases with shipped S^P tables, largest first.
inline constexpr std::array<std::int64_t, 7> kCountBases = {1'000'000, 100'000, 10'000, 5'000, 50, 10, 1};
// Denominators k with shipped Y_2^(1/k) tables, largest fraction first.
inline constexpr std::array<int, 9> kHDenominators = {5, 10, 20, 50, 100, 200, 500, 1000, 2000};

// P = sum base * multiplicity, multiplicities the greedy quotients.
struct BaseDecomposition {
  std::map<std::int64_t, std::int64_t> multiplicities;  // base -> count (zeros omitted)

  [[nodiscard]] std::int64_t count(std::int64_t base) const;
  [[nodiscard]] std::int64_t total() const;
  [[nodiscard]] std::int64_t draws() const;  // number of table evaluations per sample
};

// h rounded to three decimals, split into an integer part and digits h_k with
// sum_k h_k / k equal to the fractional part.
struct HDigits {
  double h = 0.0;               // the value as given
  std::int64_t thousandths = 0;  // round(h * 1000)
  std::int64_t whole = 0;       // integer part of the rounded value
  std::map<int, int> digits;    // denominator -> h_k (zeros omitted)

  [[nodiscard]] double rounded() const { return static_cast<double>(thousandths) / 1000.0; }
  [[nodiscard]] int digit(int denominator) const;
  // Relative first-moment bias |h - h~| / h introduced by the rounding.
  [[nodiscard]] double relative_bias() const;
};

[[nodiscard]] BaseDecomposition decompose_count(std::int64_t P);

// Greedy from 1/5 down with h_k <= 2.  With every digit capped at 2 the
// largest representable fraction is 0.777; above that the 1/5 digit takes the
// fewest extra units (up to 4) that bring the rest back into range.  Values of
// h >= 1 contribute S^floor(h) through the count tables.
[[nodiscard]] HDigits decompose_h(double h);

// The shipped tables, keyed by role.  Tables are immutable and shared between
// copies of a set; role lookups go through a cache indexed like kCountBases
// and kHDenominators.
class TableSet {
public:
  TableSet() = default;

  // Load every table file from a directory (S*, Y*, Zprime).  Missing or
  // corrupt files raise ConfigError / TableError.
  [[nodiscard]] static TableSet load(const std::string& dir);

  void add(InverseCdfTable table);

  [[nodiscard]] const InverseCdfTable& count_table(std::int64_t base) const;
  [[nodiscard]] const InverseCdfTable& h_table(int denominator) const;
  [[nodiscard]] const InverseCdfTable& z_prime_table() const;
  [[nodiscard]] bool has(const std::string& base_id) const { return tables_.count(base_id) != 0; }
  [[nodiscard]] std::vector<std::string> ids() const;
  [[nodiscard]] const InverseCdfTable& get(const std::string& base_id) const;

private:
  std::map<std::string, std::shared_ptr<const InverseCdfTable>> tables_;
  std::array<const InverseCdfTable*, kCountBases.size()> count_cache_{};
  std::array<const InverseCdfTable*, kHDenominators.size()> h_cache_{};
  const InverseCdfTable* z_prime_cache_ = nullptr;
};

// One draw of S^P, the sum of P independent copies of S = (2/pi^2) sum eps_l / l^2.
[[nodiscard]] double sample_s_p(std::int64_t P, const TableSet& tables, RngStream& rng);
[[nodiscard]] double sample_s_p(const BaseDecomposition& dec, const TableSet& tables, RngStream& rng);

// One draw of Y_2^h, Laplace transform (sqrt(2b)/sinh sqrt(2b))^h, with h rounded to 3 decimals.
[[nodiscard]] double sample_y2(double h, const TableSet& tables, RngStream& rng);
[[nodiscard]] double sample_y2(const HDigits& digits, const TableSet& tables, RngStream& rng);

// One draw of Z' = Z / tau^2 (the h = 2 case).
[[nodiscard]] double sample_z_prime(const TableSet& tables, RngStream& rng);

// Closed-form Laplace transform (sqrt(2b)/sinh sqrt(2b))^p shared by S^p and Y_2^p.
[[nodiscard]] double laplace_s_power(double b, double p);

}  // namespace hexact
