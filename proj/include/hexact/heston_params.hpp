#pragma once

namespace hexact {

// Heston model dS = mu S dt + sqrt(V) S dW2', dV = kappa (theta - V) dt + sigma sqrt(V) dW1
// with corr(dW1, dW2') = rho, observed over [0, t].
struct HestonParams {
  double kappa = 0.0;
  double theta = 0.0;
  double sigma = 0.0;
  double rho = 0.0;
  double mu = 0.0;  // drift, equal to the risk-free rate r
  double v0 = 0.0;
  double s0 = 100.0;
  double t = 1.0;

  // Throws InvalidArgument naming the first violated invariant.
  void validate() const;
  // Degrees of freedom 4 kappa theta / sigma^2.
  [[nodiscard]] double delta() const { return 4 * kappa * theta / (sigma * sigma); }
};

}  // namespace hexact
