#include "hexact/cheb_table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hexact/errors.hpp"
#include "hexact/specfun.hpp"

namespace hexact {

namespace {

std::atomic<std::uint64_t> g_clip_count{0};

constexpr double kSqrt2Pi = 2.5066282746310002;

struct KindName {
  ScalingKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {ScalingKind::LogLogTail, "LOG_LOG_TAIL"},
    {ScalingKind::LogLogLeft, "LOG_LOG_LEFT"},
    {ScalingKind::CentralProduct, "CENTRAL_PRODUCT"},
    {ScalingKind::CentralProductLeft, "CENTRAL_PRODUCT_LEFT"},
    {ScalingKind::LinearCentral, "LINEAR_CENTRAL"},
    {ScalingKind::ReciprocalLogLeft, "RECIPROCAL_LOG_LEFT"},
    {ScalingKind::GammaLogRight, "GAMMA_LOG_RIGHT"},
    {ScalingKind::GammaRateRight, "GAMMA_RATE_RIGHT"},
};

std::string regime_label(const InverseCdfTable& t, std::size_t i) {
  return "table " + t.base_id + " regime " + std::to_string(i + 1);
}

double to_variate(const InverseCdfTable& t, double v) {
  return t.standardized ? t.parameter / 3.0 + v * t.sd_factor : v;
}

double parse_number(std::string_view text, const std::string& where) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value))
    throw TableError(where + ": malformed number '" + std::string(text) + "'");
  return value;
}

}  // namespace

std::string_view to_string(ScalingKind kind) {
  for (const auto& kn : kKindNames)
    if (kn.kind == kind) return kn.name;
  return "UNKNOWN";
}

ScalingKind parse_scaling_kind(std::string_view name) {
  for (const auto& kn : kKindNames)
    if (kn.name == name) return kn.kind;
  throw TableError("unknown scaling kind '" + std::string(name) + "'");
}

bool is_product_kind(ScalingKind kind) {
  return kind == ScalingKind::CentralProduct || kind == ScalingKind::CentralProductLeft;
}

void InverseCdfTable::finalize() {
  const double P = parameter;
  if (!(P > 0)) throw TableError("table " + base_id + ": parameter must be positive");
  rl_b = 2.0 / (P * P);
  rl_a = rl_b * (P - 0.5) * std::log(rl_b);
  rl_c = 0.5 * std::log(M_PI) - (P + 0.5) * std::log(2.0) - (P - 1.0) * std::log(P);
  log_gamma_5p2 = std::lgamma(2.5 * P);
  sd_factor = std::sqrt(2.0 * P / 45.0);
}

double scale_u(const InverseCdfTable& t, const RegimeSpec& r, double u) {
  if (!(u >= kTableUMin && u <= kTableUMax)) {
    g_clip_count.fetch_add(1, std::memory_order_relaxed);
    u = std::clamp(u, kTableUMin, kTableUMax);
  }
  switch (r.kind) {
    case ScalingKind::LogLogTail:
      return std::log(-std::log1p(-u));
    case ScalingKind::LogLogLeft:
      return std::log(-std::log(u));
    case ScalingKind::CentralProduct:
      return kSqrt2Pi * (u - *t.anchor);
    case ScalingKind::CentralProductLeft:
      return kSqrt2Pi * (*t.anchor - u);
    case ScalingKind::LinearCentral:
      return (r.u_right - u) * t.sd_factor;
    case ScalingKind::ReciprocalLogLeft:
      return 1.0 / (t.rl_a - t.rl_b * (std::log(u) + t.rl_c));
    case ScalingKind::GammaLogRight:
      return (-2.0 / 15.0) * (std::log1p(-u) + t.log_gamma_5p2);
    case ScalingKind::GammaRateRight:
      return (-2.0 / 15.0) * (std::log1p(-u) + std::log(7.5));
  }
  throw TableError("scale_u: unhandled scaling kind");
}

double unscale_u(const InverseCdfTable& t, const RegimeSpec& r, double U) {
  switch (r.kind) {
    case ScalingKind::LogLogTail:
      return -std::expm1(-std::exp(U));
    case ScalingKind::LogLogLeft:
      return std::exp(-std::exp(U));
    case ScalingKind::CentralProduct:
      return *t.anchor + U / kSqrt2Pi;
    case ScalingKind::CentralProductLeft:
      return *t.anchor - U / kSqrt2Pi;
    case ScalingKind::LinearCentral:
      return r.u_right - U / t.sd_factor;
    case ScalingKind::ReciprocalLogLeft:
      return std::exp((t.rl_a - 1.0 / U) / t.rl_b - t.rl_c);
    case ScalingKind::GammaLogRight:
      return -std::expm1(-7.5 * U - t.log_gamma_5p2);
    case ScalingKind::GammaRateRight:
      return -std::expm1(-7.5 * U - std::log(7.5));
  }
  throw TableError("unscale_u: unhandled scaling kind");
}

std::optional<double> unscale_tail(const InverseCdfTable& t, const RegimeSpec& r, double U) {
  switch (r.kind) {
    case ScalingKind::LogLogTail:
      return std::exp(-std::exp(U));
    case ScalingKind::GammaLogRight:
      return std::exp(-7.5 * U - t.log_gamma_5p2);
    case ScalingKind::GammaRateRight:
      return std::exp(-7.5 * U - std::log(7.5));
    default:
      return std::nullopt;
  }
}

double eval_regime(const InverseCdfTable& t, const RegimeSpec& r, double u) {
  const double U = scale_u(t, r, u);
  const double v = clenshaw_eval(r.coeffs, r.k1 * U + r.k2);
  return is_product_kind(r.kind) ? U * v : v;
}

double inverse_cdf(const InverseCdfTable& t, double u) {
  if (!(u >= kTableUMin && u <= kTableUMax)) {
    g_clip_count.fetch_add(1, std::memory_order_relaxed);
    u = std::clamp(u, kTableUMin, kTableUMax);  // NaN falls through below
  }
  for (const auto& r : t.regimes)
    if (u < r.u_right) return eval_regime(t, r, u);
  if (!t.regimes.empty() && u <= t.regimes.back().u_right) return eval_regime(t, t.regimes.back(), u);
  throw TableError("table " + t.base_id + ": no regime contains u");
}

double quantile(const InverseCdfTable& t, double u) { return to_variate(t, inverse_cdf(t, u)); }

std::uint64_t clip_count() { return g_clip_count.load(std::memory_order_relaxed); }
void reset_clip_count() { g_clip_count.store(0, std::memory_order_relaxed); }

InverseCdfTable parse_table(std::string_view text, const std::string& origin) {
  InverseCdfTable t;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  int declared_regimes = -1;
  bool have_base = false, have_param = false, have_std = false, have_anchor = false;
  RegimeSpec* cur = nullptr;
  int cur_degree = -1;
  auto where = [&]() { return origin + ":" + std::to_string(line_no); };
  auto close_regime = [&]() {
    if (!cur) return;
    const std::string lab = "table " + t.base_id + " regime " + std::to_string(t.regimes.size());
    if (cur->u_right_text.empty() || cur->k1_text.empty() || cur->k2_text.empty() || cur_degree < 0)
      throw TableError(lab + ": incomplete regime block");
    if (static_cast<int>(cur->coeffs.size()) != cur_degree + 1)
      throw TableError(lab + ": degree " + std::to_string(cur_degree) + " but " +
                       std::to_string(cur->coeffs.size()) + " coefficients");
    if (cur_degree > 40) throw TableError(lab + ": degree exceeds 40");
  };
  bool kind_set = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto sp = line.find(' ');
    if (sp == std::string::npos) throw TableError(where() + ": expected 'key value'");
    const std::string key = line.substr(0, sp);
    const std::string val = line.substr(sp + 1);
    if (key == "base_id") {
      t.base_id = val;
      have_base = true;
    } else if (key == "parameter") {
      t.parameter = parse_number(val, where());
      t.parameter_text = val;
      have_param = true;
    } else if (key == "standardized") {
      if (val != "0" && val != "1") throw TableError(where() + ": standardized must be 0 or 1");
      t.standardized = val == "1";
      have_std = true;
    } else if (key == "anchor") {
      if (val != "none") t.anchor = parse_number(val, where());
      t.anchor_text = val;
      have_anchor = true;
    } else if (key == "regimes") {
      declared_regimes = static_cast<int>(parse_number(val, where()));
    } else if (key == "regime") {
      if (cur && !kind_set) throw TableError(where() + ": regime without scaling kind");
      close_regime();
      const int idx = static_cast<int>(parse_number(val, where()));
      if (idx != static_cast<int>(t.regimes.size()) + 1)
        throw TableError(where() + ": regimes must be numbered consecutively");
      t.regimes.emplace_back();
      cur = &t.regimes.back();
      cur_degree = -1;
      kind_set = false;
    } else if (!cur) {
      throw TableError(where() + ": unexpected key '" + key + "' before first regime");
    } else if (key == "u_right") {
      cur->u_right = parse_number(val, where());
      cur->u_right_text = val;
    } else if (key == "scaling") {
      try {
        cur->kind = parse_scaling_kind(val);
      } catch (const TableError& e) {
        throw TableError(where() + ": " + e.what());
      }
      kind_set = true;
    } else if (key == "k1") {
      cur->k1 = parse_number(val, where());
      cur->k1_text = val;
    } else if (key == "k2") {
      cur->k2 = parse_number(val, where());
      cur->k2_text = val;
    } else if (key == "degree") {
      cur_degree = static_cast<int>(parse_number(val, where()));
    } else if (key == "c") {
      cur->coeffs.push_back(parse_number(val, where()));
      cur->coeff_text.push_back(val);
    } else {
      throw TableError(where() + ": unknown key '" + key + "'");
    }
  }
  if (cur && !kind_set) throw TableError(origin + ": last regime without scaling kind");
  close_regime();
  if (!have_base || !have_param || !have_std || !have_anchor)
    throw TableError(origin + ": missing header field");
  if (declared_regimes != static_cast<int>(t.regimes.size()))
    throw TableError(origin + ": regime count does not match header");
  if (t.regimes.empty()) throw TableError(origin + ": no regimes");

  double left = kTableUMin;
  for (std::size_t i = 0; i < t.regimes.size(); ++i) {
    auto& r = t.regimes[i];
    r.u_left = left;
    if (!(r.u_right > r.u_left)) throw TableError(regime_label(t, i) + ": empty or overlapping regime");
    if (is_product_kind(r.kind) && !t.anchor)
      throw TableError(regime_label(t, i) + ": product scaling requires an anchor");
    left = r.u_right;
  }
  if (t.regimes.back().u_right != kTableUMax)
    throw TableError(origin + ": last regime must end at 1 - 1e-12");
  t.finalize();
  return t;
}

InverseCdfTable load_table(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open table file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  InverseCdfTable t = parse_table(ss.str(), path);
  audit_table(t);
  return t;
}

std::string serialize_table(const InverseCdfTable& t) {
  std::ostringstream out;
  out << "# Piecewise Chebyshev inverse CDF, one regime block per sub-interval of (0,1).\n";
  out << "base_id " << t.base_id << "\n";
  out << "parameter " << t.parameter_text << "\n";
  out << "standardized " << (t.standardized ? 1 : 0) << "\n";
  out << "anchor " << (t.anchor_text.empty() ? std::string("none") : t.anchor_text) << "\n";
  out << "regimes " << t.regimes.size() << "\n";
  for (std::size_t i = 0; i < t.regimes.size(); ++i) {
    const auto& r = t.regimes[i];
    out << "\nregime " << (i + 1) << "\n";
    out << "u_right " << r.u_right_text << "\n";
    out << "scaling " << to_string(r.kind) << "\n";
    out << "k1 " << r.k1_text << "\n";
    out << "k2 " << r.k2_text << "\n";
    out << "degree " << r.degree() << "\n";
    for (const auto& c : r.coeff_text) out << "c " << c << "\n";
  }
  return out.str();
}

std::vector<double> logit_grid(int n, double u_lo, double u_hi) {
  std::vector<double> g(n);
  const double a = std::log(u_lo / (1 - u_lo)), b = std::log(u_hi / (1 - u_hi));
  for (int i = 0; i < n; ++i) {
    const double x = n == 1 ? a : a + (b - a) * i / (n - 1);
    // u = 1/(1+e^-x), with the complement formed accurately for x > 0.
    g[i] = x < 0 ? std::exp(x) / (1 + std::exp(x)) : 1 / (1 + std::exp(-x));
  }
  g.front() = u_lo;
  g.back() = u_hi;
  return g;
}

AuditReport audit_table(const InverseCdfTable& t, int grid_size) {
  AuditReport rep;
  rep.grid_size = grid_size;
  for (std::size_t i = 0; i < t.regimes.size(); ++i) {
    const auto& r = t.regimes[i];
    for (double u : {r.u_left, r.u_right}) {
      const double z = r.k1 * scale_u(t, r, u) + r.k2;
      const double over = std::fabs(z) - 1.0;
      rep.max_z_overshoot = std::max(rep.max_z_overshoot, over);
      if (over > kZRangeTol)
        throw TableError(regime_label(t, i) + ": z(u) leaves [-1, 1] by " + std::to_string(over));
    }
    if (i + 1 < t.regimes.size()) {
      const double b = r.u_right;
      const double jump = std::fabs(to_variate(t, eval_regime(t, r, b)) -
                                    to_variate(t, eval_regime(t, t.regimes[i + 1], b)));
      rep.max_seam_jump = std::max(rep.max_seam_jump, jump);
    }
  }
  const auto grid = logit_grid(grid_size, kTableUMin, kTableUMax);
  double prev = -INFINITY;
  for (double u : grid) {
    const double v = quantile(t, u);
    if (!std::isfinite(v)) throw TableError("table " + t.base_id + ": non-finite value at u=" + std::to_string(u));
    if (v < prev) {
      std::size_t i = 0;
      while (i + 1 < t.regimes.size() && u >= t.regimes[i].u_right) ++i;
      std::ostringstream msg;
      msg.precision(17);
      msg << regime_label(t, i) << ": non-monotone evaluation at u=" << u;
      throw TableError(msg.str());
    }
    prev = v;
  }
  return rep;
}

ValidationReport validate_table(const InverseCdfTable& t, const std::function<double(double)>& oracle,
                                int grid_size, double u_lo, double u_hi) {
  ValidationReport rep;
  rep.per_regime_max.assign(t.regimes.size(), 0.0);
  rep.per_regime_points.assign(t.regimes.size(), 0);
  for (double u : logit_grid(grid_size, u_lo, u_hi)) {
    const double err = std::fabs(quantile(t, u) - oracle(u));
    std::size_t i = 0;
    while (i + 1 < t.regimes.size() && u >= t.regimes[i].u_right) ++i;
    rep.per_regime_max[i] = std::max(rep.per_regime_max[i], err);
    rep.per_regime_points[i] += 1;
    if (err > rep.max_abs_error || !(err == err)) {
      rep.max_abs_error = err;
      rep.u_at_max = u;
    }
  }
  return rep;
}

}  // namespace hexact
