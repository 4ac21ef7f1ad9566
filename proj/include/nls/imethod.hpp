#pragma once

#include <vector>

#include "nls/evolve.hpp"
#include "nls/spectral.hpp"

namespace nls {

// m_N(xi) = m(|xi|/N): 1 below N, (N/|xi|)^{1-s} above 2N, with a monotone
// C^2 quintic blend in log|xi| on [N, 2N].
struct IMultiplierSpec {
  double N = 8.0;
  double s = 0.1;
};

double i_multiplier(double rho, double s);  // m as a function of rho = |xi|/N

ComplexField apply_I(const ComplexField& f, const IMultiplierSpec& spec);
ComplexField apply_J(const ComplexField& f, const IMultiplierSpec& spec);

double sobolev_norm(const ComplexField& f, double s);  // ||f||_{H^s}

struct NormEquivalence {
  double lhs = 0.0;  // ||f||_{H^s}
  double mid = 0.0;  // ||I_N <D> f||_{L^2}
  double rhs = 0.0;  // N^{1-s} ||f||_{H^s}
};

NormEquivalence norm_equivalence(const ComplexField& f, const IMultiplierSpec& spec);

double modified_energy(const ComplexField& f, const IMultiplierSpec& spec);
void modified_momentum(const ComplexField& f, const IMultiplierSpec& spec,
                       double out[2]);

// Xi = (lambda^2/2) ||grad J_N a0||_2^2
double xi_quantity(const ComplexField& a0, double lambda,
                   const IMultiplierSpec& spec);

struct AlmostConservationPolicy {
  double s = 0.1;
  double delta = 0.05;  // N(t) = lambda^{-(1+delta)}
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double ci95_lo = 0.0, ci95_hi = 0.0;
  double r2 = 0.0;
  int n = 0;
  bool valid = false;
};

FitResult fit_loglinear(const std::vector<double>& x, const std::vector<double>& y);

struct AlmostConservationRow {
  double t = 0.0, lambda = 0.0, N = 0.0;
  double energy_mod = 0.0;   // E(I_N a)
  double xi_over_l2 = 0.0;   // Xi(t)/lambda^2
  double combo = 0.0;        // |E(I_N a) + Xi/lambda^2|
  double momentum = 0.0;     // |P(I_N a)|
};

struct AlmostConservationReport {
  std::vector<AlmostConservationRow> rows;
  FitResult energy_fit;    // log|combo| vs log(1/lambda); target slope < 2
  FitResult momentum_fit;  // log|P| vs log(1/lambda); target slope < 1
  bool sufficient_range = false;
  std::string note;
};

struct AcSample {
  double t = 0.0;
  double lambda = 0.0;
  const ComplexField* a = nullptr;
};

AlmostConservationReport almost_conservation_report(
    const std::vector<AcSample>& samples, const ComplexField& a0,
    const AlmostConservationPolicy& policy);

}  // namespace nls
