#include "hexact/conditional_integral.hpp"

#include <boost/math/special_functions/polygamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <cmath>
#include <functional>
#include <sstream>

#include "hexact/errors.hpp"
#include "hexact/specfun.hpp"
#include "hexact/variates.hpp"

namespace hexact {

namespace {

using ld = long double;

constexpr double kPi = 3.14159265358979323846;
constexpr ld kPiL = 3.141592653589793238462643383279502884L;

// With x = zeta^2 (negative for imaginary zeta):
//   sinhc(x) = sinh(zeta) / zeta = sum_k x^k / (2k+1)!
//   zcothm1(x) = zeta coth(zeta) - 1 = [sum_{k>=1} 2k x^k / (2k+1)!] / sinhc(x)
// The power series are used for |x| <= 30; beyond that the closed forms.
struct HyperbolicPair {
  ld log_sinhc = 0.0L;
  ld zcoth_m1 = 0.0L;
};

HyperbolicPair hyperbolic(ld x) {
  if (x > 30) {
    const ld zeta = std::sqrt(x);
    const ld e = std::exp(-2 * zeta);
    return {zeta - std::log(2 * zeta) + std::log1p(-e), zeta * (1 + e) / (1 - e) - 1};
  }
  ld s = 1, n = 0, term = 1;
  for (int k = 1; k < 200; ++k) {
    term *= x / ((2 * k) * (2 * k + 1));
    s += term;
    n += 2 * k * term;
    if (std::fabs(term) * 2 * k < 1e-21L * std::fabs(s)) break;
  }
  return {std::log(s), n / s};
}

void require_finite(double v, const char* where, const BridgeConfig& cfg, double b) {
  if (std::isfinite(v)) return;
  std::ostringstream msg;
  msg << where << ": non-finite value at b=" << b << " (tau=" << cfg.tau << ", a0=" << cfg.a0
      << ", a_tau=" << cfg.a_tau << ", delta=" << cfg.delta << ", q=" << cfg.q << ")";
  throw NumericFailure(msg.str());
}

// Truncated inner series of C^h = (2/pi^2) sum_l Gamma(h)_l / (l - 1/2)^2 with
// a moment-matched gamma tail for l > kBaselineInnerTerms.
double sample_c_baseline(double h, RngStream& rng) {
  constexpr double m = kBaselineInnerTerms;
  const double c = 2.0 / (kPi * kPi);
  double s = 0.0;
  for (int l = 1; l <= kBaselineInnerTerms; ++l) {
    const double w = l - 0.5;
    s += sample_gamma(h, 1.0, rng) / (w * w);
  }
  // sum_{l > m} (l - 1/2)^-2 = psi'(m + 1/2), sum (l - 1/2)^-4 = psi'''(m + 1/2) / 6.
  const double tail_mean = c * h * boost::math::trigamma(m + 0.5);
  const double tail_var = c * c * h * boost::math::polygamma(3, m + 0.5) / 6.0;
  return c * s + sample_moment_matched_gamma(tail_mean, tail_var, rng);
}

// sum_{n=1}^{K} (tau^2 / 4^n) C_n^h plus a gamma tail for n > K with the
// given remainder mean and variance.
double sample_c_levels(double h, double tau, int K, double tail_mean, double tail_var, RngStream& rng) {
  double s = 0.0;
  double w = tau * tau;
  for (int n = 1; n <= K; ++n) {
    w /= 4;
    s += w * sample_c_baseline(h, rng);
  }
  return s + sample_moment_matched_gamma(tail_mean, tail_var, rng);
}

// Cumulants kappa_1..kappa_order of a law whose log Laplace transform is f,
// from central differences at 0 with steps {1, 1/2, 1/4} * h0 and two rounds
// of Richardson extrapolation.  h0 grows with the order from `step` but stays
// below `cap`, which keeps the stencil far from the nearest singularity.
std::vector<ld> cumulants_from_log_laplace(const std::function<ld(ld)>& f, int order, ld step, ld cap) {
  std::vector<ld> kappa(static_cast<std::size_t>(order));
  const ld f0 = f(0);
  for (int n = 1; n <= order; ++n) {
    // Higher orders need a wider stencil to keep rounding out of the n-th difference.
    const ld h0 = std::min(cap, step * (n <= 2 ? 1.0L : (n == 3 ? 10.0L : 30.0L)));
    ld d[3];
    for (int i = 0; i < 3; ++i) {
      const ld h = h0 / static_cast<ld>(1 << i);
      const ld p1 = f(h), m1 = f(-h);
      switch (n) {
        case 1: d[i] = (p1 - m1) / (2 * h); break;
        case 2: d[i] = (p1 - 2 * f0 + m1) / (h * h); break;
        case 3: d[i] = (f(2 * h) - 2 * p1 + 2 * m1 - f(-2 * h)) / (2 * h * h * h); break;
        default: d[i] = (f(2 * h) - 4 * p1 + 6 * f0 - 4 * m1 + f(-2 * h)) / (h * h * h * h); break;
      }
    }
    const ld r0 = (4 * d[1] - d[0]) / 3, r1 = (4 * d[2] - d[1]) / 3;
    const ld deriv = (16 * r1 - r0) / 15;
    kappa[static_cast<std::size_t>(n - 1)] = (n % 2 ? -deriv : deriv);
  }
  return kappa;
}

std::vector<double> raw_from_cumulants(const std::vector<ld>& k) {
  std::vector<double> m;
  const ld k1 = k[0];
  m.push_back(static_cast<double>(k1));
  if (k.size() > 1) m.push_back(static_cast<double>(k[1] + k1 * k1));
  if (k.size() > 2) m.push_back(static_cast<double>(k[2] + 3 * k[1] * k1 + k1 * k1 * k1));
  if (k.size() > 3)
    m.push_back(static_cast<double>(k[3] + 4 * k[2] * k1 + 3 * k[1] * k[1] + 6 * k[1] * k1 * k1 + k1 * k1 * k1 * k1));
  return m;
}

// Mean of I under the squared-Bessel measure (series formulas).
double mean_P(const BridgeConfig& cfg) {
  const auto cm = component_moments(cfg);
  const double z = cfg.bessel_z();
  const double eta_mean = z > 0 ? 0.5 * z * std::exp(log_bessel_i(cfg.nu + 1, z) - log_bessel_i(cfg.nu, z)) : 0.0;
  return cm.mean_x1 + cm.mean_x2 + eta_mean * cm.mean_z;
}

std::vector<double> moments_by_difference(const BridgeConfig& cfg, int order, ld shift) {
  if (order < 1 || order > 4) throw InvalidArgument("exact moments: order must lie in [1, 4]");
  const ld base = log_laplace_fP(cfg, shift);
  auto f = [&](ld b) {
    const ld v = log_laplace_fP(cfg, b + shift) - base;
    if (!std::isfinite(static_cast<double>(v))) {
      std::ostringstream msg;
      msg << "exact moments: non-finite log Laplace transform at b=" << static_cast<double>(b) << " (shift "
          << static_cast<double>(shift) << ")";
      throw NumericFailure(msg.str());
    }
    return v;
  };
  // Step relative to the mean, kept well inside the domain b > -shift - pi^2/(2 tau^2).
  const ld radius = shift + kPiL * kPiL / (2 * static_cast<ld>(cfg.tau) * cfg.tau);
  const ld cap = radius / 40;
  const ld step = std::min<ld>(1e-3L / mean_P(cfg), cap);
  return raw_from_cumulants(cumulants_from_log_laplace(f, order, step, cap));
}

}  // namespace

void HestonParams::validate() const {
  if (!(kappa > 0)) throw InvalidArgument("HestonParams: kappa must be positive");
  if (!(theta > 0)) throw InvalidArgument("HestonParams: theta must be positive");
  if (!(sigma > 0)) throw InvalidArgument("HestonParams: sigma must be positive");
  if (!(t > 0)) throw InvalidArgument("HestonParams: t must be positive");
  if (!(v0 >= 0)) throw InvalidArgument("HestonParams: v0 must be nonnegative");
  if (!(std::fabs(rho) <= 1)) throw InvalidArgument("HestonParams: rho must lie in [-1, 1]");
  if (!(s0 > 0)) throw InvalidArgument("HestonParams: s0 must be positive");
  if (!std::isfinite(mu)) throw InvalidArgument("HestonParams: mu must be finite");
}

BridgeConfig BridgeConfig::make(double tau, double a0, double a_tau, double delta, double q, int K, X2Mode mode) {
  BridgeConfig c;
  c.tau = tau;
  c.a0 = a0;
  c.a_tau = a_tau;
  c.delta = delta;
  c.nu = delta / 2 - 1;
  c.h = delta / 2;
  c.q = q;
  c.K = K;
  c.x2_mode = mode;
  c.validate();
  if (mode == X2Mode::DirectInversion) c.h_digits = decompose_h(c.h);
  return c;
}

BridgeConfig BridgeConfig::from_heston(const HestonParams& p, double v0, double vt, double t, int K, X2Mode mode) {
  p.validate();
  if (!(t > 0)) throw InvalidArgument("BridgeConfig: step length must be positive");
  return make(p.sigma * p.sigma * t / 4, v0, vt, p.delta(), 2 * p.kappa / (p.sigma * p.sigma), K, mode);
}

void BridgeConfig::validate() const {
  if (!(tau > 0)) throw InvalidArgument("BridgeConfig: tau must be positive");
  if (!(a0 >= 0 && a_tau >= 0)) throw InvalidArgument("BridgeConfig: bridge endpoints must be nonnegative");
  if (!(delta > 0)) throw InvalidArgument("BridgeConfig: delta must be positive");
  if (!(std::fabs(nu - (delta / 2 - 1)) <= 1e-15 * (1 + delta)))
    throw InvalidArgument("BridgeConfig: nu must equal delta / 2 - 1");
  if (!(q > 0)) throw InvalidArgument("BridgeConfig: q must be positive");
  if (K < 0) throw InvalidArgument("BridgeConfig: K must be nonnegative");
  if (max_proposals == 0) throw InvalidArgument("BridgeConfig: max_proposals must be positive");
}

double BridgeConfig::bessel_z() const { return std::sqrt(a0 * a_tau) / tau; }

RemainderMoments remainder_moments(const BridgeConfig& cfg, int K) {
  if (K < 0) throw InvalidArgument("remainder_moments: K must be nonnegative");
  const double a = cfg.a0 + cfg.a_tau, t = cfg.tau;
  RemainderMoments r;
  r.mean1 = a * t / 6 * std::ldexp(1.0, -K);
  r.var1 = a * t * t * t / 90 * std::ldexp(1.0, -3 * K);
  r.mean2 = cfg.delta * t * t / 6 * std::ldexp(1.0, -2 * K);
  r.var2 = cfg.delta * t * t * t * t / 45 * std::ldexp(1.0, -4 * K);
  return r;
}

ComponentMoments component_moments(const BridgeConfig& cfg) {
  const double a = cfg.a0 + cfg.a_tau, t = cfg.tau, t2 = t * t, t4 = t2 * t2;
  ComponentMoments m;
  // X1: level n contributes Poisson(a 2^(n-1)/tau) copies of (tau^2/4^n) S with
  // E[S] = 1/3, E[S^2] = 7/45.
  m.mean_x1 = a * t / 3;
  m.var_x1 = 4 * a * t * t2 / 45;
  // X2: level n >= 1 is (tau^2/4^n) C^h with E[C^h] = h, Var[C^h] = 2h/3.
  m.mean_x2 = cfg.delta * t2 / 6;
  m.var_x2 = cfg.delta * t4 / 45;
  // Z: the delta = 4 case of X2.
  m.mean_z = 2 * t2 / 3;
  m.var_z = 4 * t4 / 45;
  return m;
}

double sample_moment_matched_gamma(double mean, double var, RngStream& rng) {
  if (mean == 0) return 0.0;
  if (!(mean > 0 && var > 0)) throw InvalidArgument("sample_moment_matched_gamma: mean and variance must be positive");
  return sample_gamma(mean * mean / var, mean / var, rng);
}

double sample_x1(const BridgeConfig& cfg, const TableSet& tables, RngStream& rng, std::uint64_t* max_count) {
  const double a = cfg.a0 + cfg.a_tau;
  if (a == 0) return 0.0;
  double s = 0.0;
  double w = cfg.tau * cfg.tau;          // tau^2 / 4^n
  double lambda = a / (2 * cfg.tau);     // a 2^(n-1) / tau
  for (int n = 0; n <= cfg.K; ++n) {
    const std::uint64_t P = sample_poisson(lambda, rng);
    if (max_count && P > *max_count) *max_count = P;
    if (P > 0) s += w * sample_s_p(static_cast<std::int64_t>(P), tables, rng);
    w /= 4;
    lambda *= 2;
  }
  const auto r = remainder_moments(cfg, cfg.K);
  return s + sample_moment_matched_gamma(r.mean1, r.var1, rng);
}

double sample_x2(const BridgeConfig& cfg, const TableSet& tables, RngStream& rng) {
  if (cfg.x2_mode == X2Mode::DirectInversion) return cfg.tau * cfg.tau * sample_y2(cfg.h_digits, tables, rng);
  const auto r = remainder_moments(cfg, cfg.K);
  return sample_c_levels(cfg.h, cfg.tau, cfg.K, r.mean2, r.var2, rng);
}

double sample_z(const BridgeConfig& cfg, const TableSet& tables, RngStream& rng) {
  if (cfg.x2_mode == X2Mode::DirectInversion) return cfg.tau * cfg.tau * sample_z_prime(tables, rng);
  // Z is X2 with delta = 4.
  const double t2 = cfg.tau * cfg.tau;
  const double mean = 4 * t2 / 6 * std::ldexp(1.0, -2 * cfg.K);
  const double var = 4 * t2 * t2 / 45 * std::ldexp(1.0, -4 * cfg.K);
  return sample_c_levels(2.0, cfg.tau, cfg.K, mean, var, rng);
}

double sample_integral_P(const BridgeConfig& cfg, const TableSet& tables, RngStream& rng) {
  double s = sample_x1(cfg, tables, rng) + sample_x2(cfg, tables, rng);
  const std::uint64_t eta = sample_bessel_count(cfg.nu, cfg.bessel_z(), rng);
  for (std::uint64_t j = 0; j < eta; ++j) s += sample_z(cfg, tables, rng);
  return s;
}

long double log_laplace_fP(const BridgeConfig& cfg, long double b) {
  const ld tau = cfg.tau;
  const ld x = 2 * b * tau * tau;
  if (!(x > -kPiL * kPiL)) throw InvalidArgument("log_laplace_fP: b must exceed -pi^2 / (2 tau^2)");
  const auto hp = hyperbolic(x);
  ld v = -hp.log_sinhc - (static_cast<ld>(cfg.a0) + cfg.a_tau) / (2 * tau) * hp.zcoth_m1;
  const ld z = cfg.bessel_z();
  if (z > 0)
    v += log_bessel_i_l(cfg.nu, z * std::exp(-hp.log_sinhc)) - log_bessel_i_l(cfg.nu, z);
  else
    v -= static_cast<ld>(cfg.nu) * hp.log_sinhc;  // I_nu ratio -> (zeta / sinh zeta)^nu
  return v;
}

double laplace_fP(const BridgeConfig& cfg, double b) {
  if (!(b >= 0)) throw InvalidArgument("laplace_fP: b must be nonnegative");
  const double v = std::exp(static_cast<double>(log_laplace_fP(cfg, b)));
  require_finite(v, "laplace_fP", cfg, b);
  return v;
}

double laplace_fQ(const BridgeConfig& cfg, double b) {
  if (!(b >= 0)) throw InvalidArgument("laplace_fQ: b must be nonnegative");
  const ld c = static_cast<ld>(cfg.q) * cfg.q / 2;
  const double v = std::exp(static_cast<double>(log_laplace_fP(cfg, b + c) - log_laplace_fP(cfg, c)));
  require_finite(v, "laplace_fQ", cfg, b);
  return v;
}

double laplace_x1(const BridgeConfig& cfg, double b) {
  if (!(b >= 0)) throw InvalidArgument("laplace_x1: b must be nonnegative");
  const auto hp = hyperbolic(2 * static_cast<ld>(b) * cfg.tau * cfg.tau);
  return static_cast<double>(std::exp(-(static_cast<ld>(cfg.a0) + cfg.a_tau) / (2 * cfg.tau) * hp.zcoth_m1));
}

double laplace_x2(const BridgeConfig& cfg, double b) {
  if (!(b >= 0)) throw InvalidArgument("laplace_x2: b must be nonnegative");
  const auto hp = hyperbolic(2 * static_cast<ld>(b) * cfg.tau * cfg.tau);
  return static_cast<double>(std::exp(-static_cast<ld>(cfg.h) * hp.log_sinhc));
}

double laplace_z(const BridgeConfig& cfg, double b) {
  if (!(b >= 0)) throw InvalidArgument("laplace_z: b must be nonnegative");
  const auto hp = hyperbolic(2 * static_cast<ld>(b) * cfg.tau * cfg.tau);
  return static_cast<double>(std::exp(-2 * hp.log_sinhc));
}

double acceptance_factor(const BridgeConfig& cfg) {
  const ld c = static_cast<ld>(cfg.q) * cfg.q / 2;
  const double L = std::exp(static_cast<double>(-log_laplace_fP(cfg, c)));
  require_finite(L, "acceptance_factor", cfg, static_cast<double>(c));
  if (L < 1 - 1e-9) {
    std::ostringstream msg;
    msg << "acceptance_factor: L = " << L << " < 1 (q=" << cfg.q << ", tau=" << cfg.tau << ", a0=" << cfg.a0
        << ", a_tau=" << cfg.a_tau << ", delta=" << cfg.delta << ")";
    throw NumericFailure(msg.str());
  }
  return L;
}

IntegralDraw sample_integral_Q(const BridgeConfig& cfg, const TableSet& tables, RngStream& rng) {
  const double c = cfg.q * cfg.q / 2;
  for (std::uint64_t k = 1; k <= cfg.max_proposals; ++k) {
    const double y = sample_integral_P(cfg, tables, rng);
    if (rng.next_uniform() <= std::exp(-c * y)) return {y, k};
  }
  const double L = acceptance_factor(cfg);
  std::ostringstream msg;
  msg << "sample_integral_Q: no acceptance in " << cfg.max_proposals << " proposals (L=" << L << ", q=" << cfg.q
      << ", tau=" << cfg.tau << ", a0=" << cfg.a0 << ", a_tau=" << cfg.a_tau << ", delta=" << cfg.delta << ")";
  throw RunawayRejection(msg.str(), L);
}

std::vector<double> exact_moments_Q(const BridgeConfig& cfg, int order) {
  return moments_by_difference(cfg, order, static_cast<ld>(cfg.q) * cfg.q / 2);
}

std::vector<double> exact_moments_P(const BridgeConfig& cfg, int order) { return moments_by_difference(cfg, order, 0); }

double bessel_pgf(double nu, double z, double s) {
  if (z == 0) return 1.0;
  double sum = 0.0, prev_p = 0.0;
  for (std::uint64_t n = 0;; ++n) {
    const double p = std::exp(bessel_log_pmf(nu, z, n));
    sum += p * std::pow(s, static_cast<double>(n));
    if (static_cast<double>(n) > z && p < 1e-18 && p <= prev_p) break;
    prev_p = p;
  }
  return sum;
}

IntegralDraw conditional_integral_draw(double v0, double vt, double t, const HestonParams& params, int K,
                                       const TableSet& tables, RngStream& rng, X2Mode mode) {
  if (!(v0 >= 0 && vt >= 0)) throw InvalidArgument("conditional_integral_draw: variances must be nonnegative");
  const auto cfg = BridgeConfig::from_heston(params, v0, vt, t, K, mode);
  auto d = sample_integral_Q(cfg, tables, rng);
  d.value *= 4 / (params.sigma * params.sigma);
  return d;
}

}  // namespace hexact
