#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "hexact/errors.hpp"
#include "hexact/rng.hpp"
#include "hexact/specfun.hpp"
#include "hexact/variates.hpp"
#include "stats.hpp"

using namespace hexact;
using teststats::Moments;

namespace {
constexpr int kN = 1'000'000;
}

TEST_CASE("rng: determinism, open interval, split reproducibility") {
  RngStream a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.next_uniform(), y = b.next_uniform(), z = c.next_uniform();
    CHECK(x == y);
    CHECK(x > 0.0);
    CHECK(x < 1.0);
    differs = differs || (x != z);
  }
  CHECK(differs);
  RngStream parent(7);
  const RngStream c1 = parent.split(3);
  parent.next_uniform();  // consumption does not change children
  RngStream c2 = parent.split(3), c3 = parent.split(4);
  RngStream c1c = c1;
  CHECK(c1c.next_u64() == c2.next_u64());
  RngStream c4 = parent.split(3);
  CHECK(c4.next_u64() != c3.next_u64());
}

TEST_CASE("rng: split children are uncorrelated") {
  RngStream parent(2024);
  Moments prod;
  for (int i = 0; i < 200000; ++i) {
    RngStream s1 = parent.split(2 * i), s2 = parent.split(2 * i + 1);
    prod.add((s1.next_uniform() - 0.5) * (s2.next_uniform() - 0.5));
  }
  CHECK(std::fabs(prod.mean) < 3 * prod.se_mean());
}

TEST_CASE("variates: exponential, gamma, normal moments") {
  RngStream rng(1);
  Moments e, g2, gs, n01;
  for (int i = 0; i < kN; ++i) {
    e.add(sample_exponential(rng));
    g2.add(sample_gamma(2.0, 1.0, rng));
    gs.add(sample_gamma(0.04, 2.0, rng));
    n01.add(sample_normal(0.0, 1.0, rng));
  }
  CHECK(std::fabs(e.mean - 1.0) < 3.0 / std::sqrt(kN));
  CHECK(std::fabs(g2.mean - 2.0) < 3 * g2.se_mean());
  CHECK(std::fabs(g2.variance() - 2.0) < 3 * g2.se_variance());
  CHECK(std::fabs(gs.mean - 0.02) < 3 * gs.se_mean());
  CHECK(std::fabs(gs.variance() - 0.01) < 3 * gs.se_variance());
  CHECK(std::fabs(n01.mean) < 3 * n01.se_mean());
  CHECK(std::fabs(n01.variance() - 1.0) < 3 * n01.se_variance());
  CHECK(std::fabs(n01.skewness()) < 3 * std::sqrt(6.0 / kN));
  CHECK_THROWS_AS((void)sample_gamma(0.0, 1.0, rng), InvalidArgument);
  CHECK_THROWS_AS((void)sample_gamma(1.0, -1.0, rng), InvalidArgument);
}

TEST_CASE("variates: Poisson branches") {
  RngStream rng(2);
  for (int i = 0; i < 100; ++i) CHECK(sample_poisson(0.0, rng) == 0u);
  Moments m4;
  int hits50 = 0;
  for (int i = 0; i < kN; ++i) {
    m4.add(static_cast<double>(sample_poisson(4.0, rng)));
    if (sample_poisson(50.0, rng) == 50u) ++hits50;
  }
  CHECK(std::fabs(m4.mean - 4.0) < 3 * m4.se_mean());
  CHECK(std::fabs(m4.variance() - 4.0) < 3 * m4.se_variance());
  const double p50 = std::exp(-50.0 + 50.0 * std::log(50.0) - std::lgamma(51.0));
  const double phat = static_cast<double>(hits50) / kN;
  CHECK(std::fabs(phat - p50) < 3 * std::sqrt(p50 * (1 - p50) / kN));
  CHECK_THROWS_AS((void)sample_poisson(-1.0, rng), InvalidArgument);
}

TEST_CASE("variates: inversion and PTRD agree at the switch mean") {
  RngStream rng(3);
  constexpr int n = 200000;
  std::map<std::uint64_t, double> ca, cb;
  for (int i = 0; i < n; ++i) {
    ca[sample_poisson_inversion(10.0, rng)] += 1.0;
    cb[sample_poisson_ptrd(10.0, rng)] += 1.0;
  }
  double Fa = 0, Fb = 0, d = 0;
  for (std::uint64_t k = 0; k < 60; ++k) {
    Fa += ca[k] / n;
    Fb += cb[k] / n;
    d = std::max(d, std::fabs(Fa - Fb));
  }
  CHECK(d < teststats::ks_crit_two(n, n));
}

TEST_CASE("variates: Bessel count pmf") {
  RngStream rng(4);
  for (int i = 0; i < 100; ++i) CHECK(sample_bessel_count(0.3, 0.0, rng) == 0u);
  struct Case { double nu, z; };
  for (Case cs : {Case{-0.98, 0.016}, Case{0.0, 1.0}, Case{1.0, 2.0}}) {
    std::map<std::uint64_t, double> counts;
    Moments m;
    for (int i = 0; i < kN; ++i) {
      const auto n = sample_bessel_count(cs.nu, cs.z, rng);
      counts[n] += 1.0;
      m.add(static_cast<double>(n));
    }
    // Analytic pmf from I_nu, support truncated at cumulative 1 - 1e-12.
    double cum = 0.0, tv = 0.0, mean = 0.0;
    std::uint64_t support = 0;
    for (std::uint64_t n = 0; cum < 1.0 - 1e-12 && n < 200; ++n) {
      const double p = std::exp(bessel_log_pmf(cs.nu, cs.z, n));
      cum += p;
      mean += n * p;
      tv += std::fabs(counts[n] / kN - p);
      ++support;
    }
    tv *= 0.5;
    CHECK_MESSAGE(tv <= 5.0 * std::sqrt(static_cast<double>(support)) / std::sqrt(kN),
                  "nu=" << cs.nu << " z=" << cs.z << " tv=" << tv);
    CHECK(std::fabs(m.mean - mean) < 3 * std::max(m.se_mean(), 1e-12));
    if (cs.nu == -0.98) {
      // p0 = (z/2)^nu / (Gamma(nu+1) I_nu(z)).
      const double p0 = std::exp(cs.nu * std::log(cs.z / 2) - std::lgamma(cs.nu + 1) - log_bessel_i(cs.nu, cs.z));
      const double phat = counts[0] / kN;
      CHECK(std::fabs(phat - p0) < 3 * std::sqrt(p0 * (1 - p0) / kN) + 1e-12);
    }
  }
}

TEST_CASE("variates: CIR transition") {
  const auto p1 = CirTransitionParams::make(0.5, 0.04, 1.0, 1.0);
  CHECK(p1.noncentrality(0.04) == doctest::Approx(2 * std::exp(-0.5) / (1 - std::exp(-0.5)) * 0.04).epsilon(1e-14));
  // Hand evaluation: 2 e^-0.5 / (1 - e^-0.5) * 0.04 = 0.1233196...
  CHECK(p1.noncentrality(0.04) == doctest::Approx(0.1233196).epsilon(1e-6));
  CHECK(p1.delta == doctest::Approx(0.08).epsilon(1e-15));
  CHECK_THROWS_AS((void)CirTransitionParams::make(0.5, 0.04, 0.0, 1.0), InvalidArgument);

  RngStream rng(5);
  {
    Moments m;
    for (int i = 0; i < kN; ++i) m.add(sample_cir_transition(0.04, p1, rng));
    CHECK(std::fabs(m.mean - 0.04) < 3 * m.se_mean());
  }
  {
    Moments m;
    for (int i = 0; i < kN; ++i) {
      const double v = sample_cir_transition(0.0, p1, rng);
      CHECK_FALSE(v < 0.0);
      m.add(v);
    }
    CHECK(std::fabs(m.mean - p1.scale() * p1.delta) < 3 * m.se_mean());
  }
  RngStream pick(99);
  for (int set = 0; set < 5; ++set) {
    const double kappa = 0.2 + 5 * pick.next_uniform(), theta = 0.01 + 0.1 * pick.next_uniform();
    const double sigma = 0.2 + pick.next_uniform(), dt = 0.05 + 2 * pick.next_uniform();
    const double v0 = 0.2 * pick.next_uniform();
    const auto p = CirTransitionParams::make(kappa, theta, sigma, dt);
    const double e = std::exp(-kappa * dt);
    const double mean = theta + (v0 - theta) * e;
    const double var = v0 * sigma * sigma * e * (1 - e) / kappa + theta * sigma * sigma * (1 - e) * (1 - e) / (2 * kappa);
    Moments m;
    for (int i = 0; i < 200000; ++i) m.add(sample_cir_transition(v0, p, rng));
    CHECK_MESSAGE(std::fabs(m.mean - mean) < 3 * m.se_mean(), "set " << set);
    CHECK_MESSAGE(std::fabs(m.variance() - var) < 3 * m.se_variance(), "set " << set);
  }
}
