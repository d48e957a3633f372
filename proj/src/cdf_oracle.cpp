#include "hexact/cdf_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/float128.hpp>

#include "hexact/errors.hpp"
#include "hexact/specfun.hpp"

namespace hexact {

namespace {

using ld = long double;
using quad = boost::multiprecision::float128;
constexpr ld kPiL = 3.141592653589793238462643383279502884L;

// The series below are written once for any floating type R; long double
// carries the bulk of the work and quad precision the far-right-tail polish,
// where F sits within 1e-10 of one and its absolute error sets the quantile error.

template <class R>
R eps() {
  return std::numeric_limits<R>::epsilon();
}

// gamma(s, x) by its all-positive power series.  Slower than the continued
// fraction for x > s + 1, but free of the cancellation in Gamma(s) - Gamma(s, x).
template <class R>
R lower_gamma_series(const R& s, const R& x) {
  using std::exp;
  using std::log;
  if (x == 0) return R(0);
  R term = 1 / s, sum = term;
  for (int n = 1; n < 100000; ++n) {
    term *= x / (s + n);
    sum += term;
    if (term < eps<R>() * sum / 4) break;
  }
  return sum * exp(-x + s * log(x));
}

// Gamma(s, x) by Legendre's continued fraction (modified Lentz); any real s, x >= 1.
template <class R>
R upper_gamma_cf(const R& s, const R& x) {
  using std::exp;
  using std::fabs;
  using std::log;
  const R tiny = std::numeric_limits<R>::min() * 1e10;
  R b = x + 1 - s, c = 1 / tiny, d = 1 / b, h = d;
  for (int i = 1; i < 100000; ++i) {
    const R an = -i * (i - s);
    b += 2;
    d = an * d + b;
    if (fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (fabs(c) < tiny) c = tiny;
    d = 1 / d;
    const R del = d * c;
    h *= del;
    if (fabs(del - 1) < eps<R>()) break;
  }
  return exp(-x + s * log(x)) * h;
}

template <class R>
R upper_gamma(const R& s, const R& x) {
  using std::tgamma;
  if (s > 0 && x < s + 1) return tgamma(s) - lower_gamma_series(s, x);
  return upper_gamma_cf(s, x);
}

// Power-series coefficients of D_nu(z) = sum_k d_k z^k:
// d_{k+2} (k+2)(k+1) = -(nu + 1/2) d_k + d_{k-2} / 4.
template <class R>
std::vector<R> pcf_coeffs(const R& nu, int n) {
  using std::floor;
  using std::pow;
  using std::sqrt;
  using std::tgamma;
  auto rgamma = [](const R& x) { return (x <= 0 && x == floor(x)) ? R(0) : 1 / tgamma(x); };
  const R pi = boost::math::constants::pi<R>();
  std::vector<R> d(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    if (k == 0) {
      d[0] = pow(R(2), nu / 2) * sqrt(pi) * rgamma((1 - nu) / 2);
    } else if (k == 1) {
      d[1] = -pow(R(2), (nu + 1) / 2) * sqrt(pi) * rgamma(-nu / 2);
    } else {
      R num = -(nu + R(0.5)) * d[static_cast<std::size_t>(k - 2)];
      if (k >= 4) num += d[static_cast<std::size_t>(k - 4)] / 4;
      d[static_cast<std::size_t>(k)] = num / (R(k) * (k - 1));
    }
  }
  return d;
}

// G1(y, y*) = int_y^y* z^(P-1) e^(-z^2/4) D_{P+1}(z) dz, termwise over the
// power series of D: sum_k d_k 2^(P+k-1) [gamma((P+k)/2, y*^2/4) - gamma((P+k)/2, y^2/4)].
// The integrated terms are O(1/k) in size and the lower gammas keep full
// relative accuracy, so the sum carries only a few ulps of rounding.
template <class R>
R g1(const R& P, const R& y, const R& ystar, const OracleConfig& cfg) {
  using std::fabs;
  using std::pow;
  if (y >= ystar) return R(0);
  const R a = y * y / 4, b = ystar * ystar / 4;
  const int nterms = std::min(cfg.g1_terms, static_cast<int>(4 * static_cast<double>(b)) + 400);
  const auto d = pcf_coeffs(P + 1, nterms);
  R sum = 0, prev = 0;
  R pow2 = pow(R(2), P - 1);
  for (int k = 0; k < nterms; ++k) {
    const R s = (P + k) / 2;
    const R term = d[static_cast<std::size_t>(k)] * pow2 * (lower_gamma_series(s, b) - lower_gamma_series(s, a));
    sum += term;
    pow2 *= 2;
    if (k > 4 * b + 8 && fabs(term) + fabs(prev) <= eps<R>() / 1000 * fabs(sum)) return sum;
    prev = term;
  }
  throw ConvergenceFailure("cdf_sp: G1 series did not converge within " + std::to_string(nterms) + " terms",
                           static_cast<double>(sum));
}

// G2(y*) = int_y*^inf, from the asymptotic series of D_{P+1}:
// sum_k (-1)^k (-(P+1))_{2k} / k! 2^(P-2k-1/2) Gamma(P-k+1/2, y*^2/2), optimally
// truncated (exact and finite for integer P).
template <class R>
R g2(const R& P, const R& ystar, const OracleConfig& cfg) {
  using std::fabs;
  using std::floor;
  using std::pow;
  const R nu = P + 1;
  const R x = ystar * ystar / 2;
  const bool terminating = nu == floor(nu);
  R coef = 1;  // (-1)^k (-nu)_{2k} / k!
  R sum = 0, prev_abs = std::numeric_limits<R>::infinity();
  for (int k = 0; k < cfg.g2_terms; ++k) {
    if (coef == 0) return sum;
    const R term = coef * pow(R(2), P - 2 * k - R(0.5)) * upper_gamma(P - k + R(0.5), x);
    if (!terminating && k > nu / 2 && fabs(term) >= prev_abs) return sum;
    sum += term;
    if (!terminating && fabs(term) < eps<R>() / 1000 * fabs(sum)) return sum;
    prev_abs = fabs(term);
    coef *= -(-nu + 2 * k) * (-nu + 2 * k + 1) / (k + 1);
  }
  if (terminating) throw ConvergenceFailure("cdf_sp: G2 budget too small for integer order", static_cast<double>(sum));
  return sum;
}

template <class R>
R cdf_core(double P_in, const R& x, const OracleConfig& cfg, const R& outer_tol, double default_switch_z) {
  using std::exp;
  using std::fabs;
  using std::lgamma;
  using std::log;
  using std::pow;
  using std::sqrt;
  cfg.validate();
  if (!oracle_supports(P_in)) throw InvalidArgument("cdf_sp: P must lie in (0, 1] or be an integer up to 50");
  if (!(x >= 0)) throw InvalidArgument("cdf_sp: x must be nonnegative");
  if (x == 0) return R(0);
  const R P = P_in;
  // For integer P the asymptotic series of D_{P+1} terminates and is exact,
  // so G2 alone is used everywhere unless a switch constant is forced.
  const bool integer_order = P_in == std::floor(P_in);
  R zs = 0;
  if (cfg.switch_const > 0)
    zs = R(cfg.switch_const) * (P + R(1.5));
  else if (!integer_order)
    zs = R(default_switch_z);
  const R sqx = sqrt(x);
  const R lg_p = lgamma(P);
  R sum = 0;
  for (int n = 0; n < cfg.outer_terms; ++n) {
    const R m = R(2 * n) + P;
    const R y = m / sqx;
    const R ystar = y > zs ? y : zs;
    const R G = g1(P, y, ystar, cfg) + g2(P, ystar, cfg);
    const R w = exp(lgamma(n + P) - lgamma(R(n + 1)) - P * log(m) - lg_p);
    const R term = w * G;
    sum += term;
    if (y > zs && fabs(term) <= outer_tol * fabs(sum)) {
      R F = pow(R(2), P + 1) / sqrt(2 * boost::math::constants::pi<R>()) * sum;
      if (F < 0) F = 0;
      if (F > 1) F = 1;
      return F;
    }
    if (sum == 0 && y > zs && G == 0) return R(0);  // underflow far in the left tail
  }
  throw ConvergenceFailure("cdf_sp: outer sum did not converge within " + std::to_string(cfg.outer_terms) + " terms",
                           static_cast<double>(sum));
}

double guess_quantile(double P, double u) {
  const double g = u < 0.5 ? left_tail_quantile(P, u) : right_tail_quantile(P, u);
  return (std::isfinite(g) && g > 0) ? g : P / 3;
}

}  // namespace

void OracleConfig::validate() const {
  if (outer_terms < 1 || g1_terms < 1 || g2_terms < 1) throw InvalidArgument("OracleConfig: budgets must be >= 1");
  if (!(root_tol > 0 && root_tol <= 1e-6)) throw InvalidArgument("OracleConfig: root_tol must lie in (0, 1e-6]");
  if (!(outer_rel_tol > 0)) throw InvalidArgument("OracleConfig: outer_rel_tol must be positive");
}

bool oracle_supports(double P) {
  if (P > 0 && P <= 1) return true;
  return P >= 1 && P <= 50 && P == std::floor(P);
}

long double cdf_sp_l(double P, long double x, const OracleConfig& cfg) {
  // default_switch_const(P) (P + 3/2) = 5.8.
  return cdf_core<ld>(P, x, cfg, static_cast<ld>(cfg.outer_rel_tol), 5.8);
}

long double survival_sp_q(double P, double x, const OracleConfig& cfg) {
  // In quad precision the switch moves out to z = 9: the optimally truncated
  // asymptotic series then errs by about e^-81, while the power series below
  // the switch cancels by only e^(81/4).
  const quad F = cdf_core<quad>(P, quad(x), cfg, quad(1e-32), 9.0);
  return static_cast<ld>(quad(1) - F);
}

double cdf_sp(double P, double x, const OracleConfig& cfg) { return static_cast<double>(cdf_sp_l(P, x, cfg)); }

double leading_cdf_left(double P, double x) {
  if (!(P > 0) || !(x > 0)) throw InvalidArgument("leading_cdf_left: P and x must be positive");
  return std::exp(-0.5 * std::log(M_PI) + (P + 0.5) * std::log(2.0) + (P - 1) * std::log(P) + (0.5 - P) * std::log(x) -
                  P * P / (2 * x));
}

double left_tail_quantile(double P, double u) {
  if (!(P > 0) || !(u > 0 && u < 1)) throw InvalidArgument("left_tail_quantile: need P > 0 and u in (0, 1)");
  const double B = 2 / (P * P);
  const double A = B * (P - 0.5) * std::log(B);
  const double C = 0.5 * std::log(M_PI) - (P + 0.5) * std::log(2.0) - (P - 1) * std::log(P);
  return 1.0 / (A - B * (std::log(u) + C));
}

double right_tail_quantile(double P, double u) {
  if (!(P > 0) || !(u > 0 && u < 1)) throw InvalidArgument("right_tail_quantile: need P > 0 and u in (0, 1)");
  return (-2.0 / 15.0) * (std::log1p(-u) + std::lgamma(2.5 * P));
}

GammaMatch right_tail_gamma_match(double P) { return {2.5 * P, 7.5}; }

namespace {

// Shared root finder.  `tail` is 1 - u carried separately so that far-right
// targets keep their full relative precision.
double invert_impl(double P, double u, ld tail, const OracleConfig& cfg, std::optional<double> initial_guess) {
  const ld target = u;
  auto F = [&](ld x) { return cdf_sp_l(P, x, cfg); };

  ld x0 = initial_guess && *initial_guess > 0 ? *initial_guess : guess_quantile(P, u);
  ld lo = x0, hi = x0;
  int expansions = 0;
  while (F(lo) > target) {
    lo /= 2;
    if (++expansions > 200) throw ConvergenceFailure("invert_cdf: no lower bracket", static_cast<double>(lo));
  }
  while (F(hi) < target) {
    hi *= 2;
    if (++expansions > 200) throw ConvergenceFailure("invert_cdf: no upper bracket", static_cast<double>(hi));
  }
  if (lo == hi) {
    lo = hi / 2;
    hi *= 2;
  }
  while (hi - lo > 1e-3L * hi) {
    const ld mid = 0.5L * (lo + hi);
    (F(mid) < target ? lo : hi) = mid;
  }

  // Newton in log F on the left half (the cdf is tiny and steep there), in F
  // on the right.  Iteration stops once the step no longer shrinks, i.e. when
  // it reaches the resolution of F itself.
  const bool use_log = u < 0.5;
  auto g = [&](ld x) { return use_log ? std::log(F(x)) - std::log(target) : F(x) - target; };
  ld x = 0.5L * (lo + hi);
  ld last_step = std::numeric_limits<ld>::infinity();
  for (int it = 0; it < 60; ++it) {
    const ld gx = g(x);
    if (gx == 0) break;
    (gx < 0 ? lo : hi) = x;
    const ld h = 1e-6L * x;
    const ld slope = (g(x + h) - g(x - h)) / (2 * h);
    ld next = x - gx / slope;
    const bool newton = slope > 0 && next > lo && next < hi;
    if (!newton) next = 0.5L * (lo + hi);
    const ld step = std::fabs(next - x);
    x = next;
    if (step <= 4 * std::numeric_limits<double>::epsilon() * x) break;
    if (newton && it > 2 && step > 0.5L * last_step) break;
    if (newton) last_step = step;
  }

  // Far right tail: F is within 1e-6 of one and its long double rounding
  // (about 1e-19 absolute) would dominate the quantile error, so polish the
  // root on the quad-precision survival function with the density from above.
  if (u > 1 - 1e-6) {
    const ld sv = tail;
    ld dens = -1;
    {
      const ld h = 1e-6L * x;
      dens = (survival_sp_q(P, static_cast<double>(x - h), cfg) - survival_sp_q(P, static_cast<double>(x + h), cfg)) /
             (2 * h);
    }
    for (int it = 0; it < 6 && dens > 0; ++it) {
      const ld r = survival_sp_q(P, static_cast<double>(x), cfg) - sv;
      const ld step = r / dens;
      x += step;
      if (std::fabs(step) <= 2 * std::numeric_limits<double>::epsilon() * x) break;
    }
    const ld err = std::fabs(survival_sp_q(P, static_cast<double>(x), cfg) - sv);
    if (err > static_cast<ld>(cfg.root_tol))
      throw ConvergenceFailure("invert_cdf: residual " + std::to_string(static_cast<double>(err)) + " exceeds root_tol",
                               static_cast<double>(x));
    return static_cast<double>(x);
  }

  const ld err = std::fabs(F(x) - target);
  if (err > static_cast<ld>(cfg.root_tol))
    throw ConvergenceFailure("invert_cdf: residual " + std::to_string(static_cast<double>(err)) + " exceeds root_tol",
                             static_cast<double>(x));
  return static_cast<double>(x);
}

}  // namespace

double invert_cdf(double P, double u, const OracleConfig& cfg, std::optional<double> initial_guess) {
  if (!(u > 0 && u < 1)) throw InvalidArgument("invert_cdf: u must lie in (0, 1)");
  return invert_impl(P, u, 1 - static_cast<ld>(u), cfg, initial_guess);
}

double invert_survival(double P, double q, const OracleConfig& cfg, std::optional<double> initial_guess) {
  if (!(q > 0 && q < 1)) throw InvalidArgument("invert_survival: q must lie in (0, 1)");
  return invert_impl(P, 1 - q, q, cfg, initial_guess);
}

std::vector<double> fit_chebyshev(const std::function<double(double)>& f, int degree) {
  if (degree < 0 || degree > 40) throw InvalidArgument("fit_chebyshev: degree must lie in [0, 40]");
  const int N = degree + 1;
  std::vector<ld> fz(static_cast<std::size_t>(N));
  for (int j = 0; j < N; ++j) fz[static_cast<std::size_t>(j)] = f(std::cos(kPiL * (j + 0.5L) / N));
  std::vector<double> c(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) {
    ld s = 0.0L;
    for (int j = 0; j < N; ++j) s += fz[static_cast<std::size_t>(j)] * std::cos(kPiL * k * (j + 0.5L) / N);
    c[static_cast<std::size_t>(k)] = static_cast<double>(2.0L * s / N);
  }
  return c;
}

InverseCdfTable regenerate_table(const InverseCdfTable& plan, const OracleConfig& cfg) {
  InverseCdfTable out = plan;
  const double P = plan.parameter;
  for (auto& r : out.regimes) {
    auto target = [&](double z) {
      const double U = (z - r.k2) / r.k1;
      // Right-tail scalings are functions of 1 - u, which a double u cannot
      // resolve near one; hand the tail probability to the oracle directly.
      const std::optional<double> q = unscale_tail(plan, r, U);
      double v = q ? invert_survival(P, std::clamp(*q, 1 - kTableUMax, 1 - kTableUMin), cfg)
                   : invert_cdf(P, std::clamp(unscale_u(plan, r, U), kTableUMin, kTableUMax), cfg);
      if (plan.standardized) v = (v - P / 3) / plan.sd_factor;
      if (is_product_kind(r.kind)) v /= U;
      return v;
    };
    r.coeffs = fit_chebyshev(target, r.degree());
    r.coeff_text.clear();
    char buf[40];
    for (double c : r.coeffs) {
      std::snprintf(buf, sizeof buf, "%.15e", c);
      r.coeff_text.emplace_back(buf);
    }
  }
  return out;
}

ValidationReport validate_against_oracle(const InverseCdfTable& table, int grid_size, double u_lo, double u_hi,
                                         const OracleConfig& cfg) {
  const double P = table.parameter;
  return validate_table(table, [&](double u) { return invert_cdf(P, u, cfg, quantile(table, u)); }, grid_size, u_lo,
                        u_hi);
}

}  // namespace hexact
