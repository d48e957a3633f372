#pragma once
// Series-based constructions of S and Z' used as independent test oracles.
// The largest terms are simulated exactly; the remaining terms are replaced
// by their mean, which shifts no mass by more than the remainder's standard
// deviation (about 2e-6 for the defaults here).
#include <boost/math/special_functions/trigamma.hpp>
#include <cmath>
#include <vector>

#include "hexact/rng.hpp"
#include "hexact/variates.hpp"

namespace brute {

inline double exp1(hexact::RngStream& rng) { return -std::log(rng.next_uniform()); }

// S = (2/pi^2) sum_l eps_l / l^2 with eps_l ~ Exp(1).
class SeriesS {
public:
  explicit SeriesS(int exact_terms = 2000) : m_(exact_terms) {
    // sum_{l > m} 1 / l^2 = trigamma(m + 1).
    tail_mean_ = 2.0 / (M_PI * M_PI) * boost::math::trigamma(static_cast<double>(m_) + 1.0);
  }
  double operator()(hexact::RngStream& rng) const {
    double s = 0.0;
    for (int l = 1; l <= m_; ++l) s += exp1(rng) / (static_cast<double>(l) * l);
    return 2.0 / (M_PI * M_PI) * s + tail_mean_;
  }

private:
  int m_;
  double tail_mean_;
};

// S^P = (2/pi^2) sum_l Gamma(P,1)_l / l^2 for real P > 0, same mean compensation.
class SeriesSP {
public:
  SeriesSP(double P, int exact_terms) : P_(P), m_(exact_terms) {
    tail_mean_ = P * 2.0 / (M_PI * M_PI) * boost::math::trigamma(static_cast<double>(m_) + 1.0);
  }
  double operator()(hexact::RngStream& rng) const {
    double s = 0.0;
    for (int l = 1; l <= m_; ++l) s += hexact::sample_gamma(P_, 1.0, rng) / (static_cast<double>(l) * l);
    return 2.0 / (M_PI * M_PI) * s + tail_mean_;
  }

private:
  double P_;
  int m_;
  double tail_mean_;
};

// Z' = sum_{n>=1} 4^-n C_n with C = (2/pi^2) sum_l Gamma(2,1)_l / (l - 1/2)^2.
// Level n keeps its first floor(L / 2^n + 1/2) inner terms exactly (the terms
// with weight at least that of the L-th term of level 0); outer levels run to 30.
class SeriesZPrime {
public:
  explicit SeriesZPrime(int scale = 2000, int levels = 30) {
    tail_mean_ = 0.0;
    for (int n = 1; n <= levels; ++n) {
      const int m = static_cast<int>(std::floor(scale / std::ldexp(1.0, n) + 0.5));
      counts_.push_back(m);
      // E[Gamma(2,1)] = 2 and sum_{l > m} (l - 1/2)^-2 = trigamma(m + 1/2).
      tail_mean_ += std::ldexp(1.0, -2 * n) * 2.0 / (M_PI * M_PI) * 2.0 * boost::math::trigamma(m + 0.5);
    }
    // Levels beyond the last carry mean sum_{n > levels} 2 / 4^n.
    tail_mean_ += 2.0 / 3.0 * std::ldexp(1.0, -2 * levels);
  }
  double operator()(hexact::RngStream& rng) const {
    double s = 0.0;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      double level = 0.0;
      for (int l = 1; l <= counts_[i]; ++l) {
        const double w = l - 0.5;
        level += (exp1(rng) + exp1(rng)) / (w * w);
      }
      s += std::ldexp(level, -2 * static_cast<int>(i + 1));
    }
    return 2.0 / (M_PI * M_PI) * s + tail_mean_;
  }

private:
  std::vector<int> counts_;
  double tail_mean_;
};

}  // namespace brute
