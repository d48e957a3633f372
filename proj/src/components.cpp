#include "hexact/components.hpp"

#include <cmath>
#include <filesystem>

#include "hexact/errors.hpp"

namespace hexact {

namespace {

std::string count_id(std::int64_t base) { return "S" + std::to_string(base); }
std::string h_id(int denominator) { return "Y" + std::to_string(denominator); }
constexpr const char* kZPrimeId = "Zprime";

}  // namespace

std::int64_t BaseDecomposition::count(std::int64_t base) const {
  const auto it = multiplicities.find(base);
  return it == multiplicities.end() ? 0 : it->second;
}

std::int64_t BaseDecomposition::total() const {
  std::int64_t s = 0;
  for (const auto& [base, m] : multiplicities) s += base * m;
  return s;
}

std::int64_t BaseDecomposition::draws() const {
  std::int64_t s = 0;
  for (const auto& kv : multiplicities) s += kv.second;
  return s;
}

int HDigits::digit(int denominator) const {
  const auto it = digits.find(denominator);
  return it == digits.end() ? 0 : it->second;
}

double HDigits::relative_bias() const { return std::fabs(h - rounded()) / h; }

BaseDecomposition decompose_count(std::int64_t P) {
  if (P <= 0) throw InvalidArgument("decompose_count: P must be a positive integer");
  BaseDecomposition d;
  std::int64_t rest = P;
  for (const auto base : kCountBases) {
    const std::int64_t m = rest / base;
    if (m > 0) d.multiplicities[base] = m;
    rest -= m * base;
  }
  return d;
}

HDigits decompose_h(double h) {
  if (!(h > 0) || !std::isfinite(h)) throw InvalidArgument("decompose_h: h must be positive and finite");
  HDigits d;
  d.h = h;
  d.thousandths = std::llround(h * 1000.0);
  if (d.thousandths == 0) throw InvalidArgument("decompose_h: h rounds to zero at three decimals");
  d.whole = d.thousandths / 1000;
  // Work in integer units of 1/2000 so every fraction 1/k is an integer.
  std::int64_t rest = 2 * (d.thousandths % 1000);
  // Largest fraction representable with every digit capped at 2 (0.777).
  constexpr std::int64_t kCap2Max = 1554;
  for (const int k : kHDenominators) {
    const std::int64_t unit = 2000 / k;
    std::int64_t m = std::min<std::int64_t>(2, rest / unit);
    if (k == 5 && rest > kCap2Max) m = 2 + (rest - kCap2Max + unit - 1) / unit;
    if (m > 0) d.digits[k] = static_cast<int>(m);
    rest -= m * unit;
  }
  if (rest != 0) throw NumericFailure("decompose_h: greedy digits do not reproduce h");
  return d;
}

TableSet TableSet::load(const std::string& dir) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError("table directory '" + dir + "' does not exist");
  TableSet set;
  auto load_one = [&](const std::string& id) {
    const auto path = (std::filesystem::path(dir) / (id + ".tbl")).string();
    if (!std::filesystem::exists(path)) throw ConfigError("missing table file '" + path + "'");
    set.add(load_table(path));
  };
  for (const auto base : kCountBases) load_one(count_id(base));
  for (const int k : kHDenominators) load_one(h_id(k));
  load_one(kZPrimeId);
  return set;
}

void TableSet::add(InverseCdfTable table) {
  const std::string id = table.base_id;
  auto ptr = std::make_shared<const InverseCdfTable>(std::move(table));
  const InverseCdfTable* raw = ptr.get();
  tables_.insert_or_assign(id, std::move(ptr));
  for (std::size_t i = 0; i < kCountBases.size(); ++i)
    if (id == count_id(kCountBases[i])) count_cache_[i] = raw;
  for (std::size_t i = 0; i < kHDenominators.size(); ++i)
    if (id == h_id(kHDenominators[i])) h_cache_[i] = raw;
  if (id == kZPrimeId) z_prime_cache_ = raw;
}

std::vector<std::string> TableSet::ids() const {
  std::vector<std::string> out;
  for (const auto& kv : tables_) out.push_back(kv.first);
  return out;
}

const InverseCdfTable& TableSet::get(const std::string& base_id) const {
  const auto it = tables_.find(base_id);
  if (it == tables_.end()) throw ConfigError("table '" + base_id + "' is not loaded");
  return *it->second;
}

const InverseCdfTable& TableSet::count_table(std::int64_t base) const {
  for (std::size_t i = 0; i < kCountBases.size(); ++i)
    if (kCountBases[i] == base && count_cache_[i]) return *count_cache_[i];
  return get(count_id(base));
}

const InverseCdfTable& TableSet::h_table(int denominator) const {
  for (std::size_t i = 0; i < kHDenominators.size(); ++i)
    if (kHDenominators[i] == denominator && h_cache_[i]) return *h_cache_[i];
  return get(h_id(denominator));
}

const InverseCdfTable& TableSet::z_prime_table() const {
  return z_prime_cache_ ? *z_prime_cache_ : get(kZPrimeId);
}

double sample_s_p(const BaseDecomposition& dec, const TableSet& tables, RngStream& rng) {
  double sum = 0.0;
  for (const auto& [base, m] : dec.multiplicities) {
    const auto& t = tables.count_table(base);
    for (std::int64_t i = 0; i < m; ++i) sum += quantile(t, rng.next_uniform());
  }
  return sum;
}

double sample_s_p(std::int64_t P, const TableSet& tables, RngStream& rng) {
  if (P <= 0) throw InvalidArgument("sample_s_p: P must be a positive integer");
  // Same greedy split as decompose_count, without building the map.
  double sum = 0.0;
  std::int64_t rest = P;
  for (const auto base : kCountBases) {
    if (rest < base) continue;
    const auto& t = tables.count_table(base);
    for (; rest >= base; rest -= base) sum += quantile(t, rng.next_uniform());
  }
  return sum;
}

double sample_y2(const HDigits& d, const TableSet& tables, RngStream& rng) {
  double sum = d.whole > 0 ? sample_s_p(d.whole, tables, rng) : 0.0;
  for (const auto& [k, m] : d.digits) {
    const auto& t = tables.h_table(k);
    for (int i = 0; i < m; ++i) sum += quantile(t, rng.next_uniform());
  }
  return sum;
}

double sample_y2(double h, const TableSet& tables, RngStream& rng) {
  return sample_y2(decompose_h(h), tables, rng);
}

double sample_z_prime(const TableSet& tables, RngStream& rng) {
  return quantile(tables.z_prime_table(), rng.next_uniform());
}

double laplace_s_power(double b, double p) {
  if (!(b >= 0)) throw InvalidArgument("laplace_s_power: b must be nonnegative");
  if (b == 0) return 1.0;
  const double c = std::sqrt(2 * b);
  // log(c / sinh c) = log(2c) - c - log1p(-e^{-2c}), stable for large c.
  return std::exp(p * (std::log(2 * c) - c - std::log1p(-std::exp(-2 * c))));
}

}  // namespace hexact
