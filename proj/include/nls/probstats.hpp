#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nls/randomize.hpp"
#include "nls/spectral.hpp"

namespace nls {

struct Observable {
  std::string name;
  std::function<double(const RandomSample&)> fn;
};

struct EnsembleConfig {
  int n_samples = 200;
  std::uint64_t seed_base = 1;
  RandomDataSpec spec;
  Grid2D grid;
  int threads = 1;
};

struct EnsembleResult {
  std::vector<std::string> names;
  // values[i][j]: observable j on sample i; NaN marks a recorded failure.
  std::vector<std::vector<double>> values;
  std::vector<std::uint64_t> seeds;
};

// Deterministic in (config, observables): sample i uses seed_base + i and
// results are identical under any thread count.
EnsembleResult run_ensemble(const EnsembleConfig& config,
                            const std::vector<Observable>& observables);

// Discrete L^q_t L^r_x norm of e^{it Laplacian} f over the window, using
// Gauss-Legendre nodes in time.
double strichartz_norm(const ComplexField& f, double q, double r, double t0,
                       double t1, int n_times = 64);

struct TailFit {
  std::vector<double> K;
  std::vector<double> p_hat;       // empirical exceedance
  double C2 = 0.0, c2 = 0.0, r2_2 = 0.0;     // log p vs K^2
  double C23 = 0.0, c23 = 0.0, r2_23 = 0.0;  // log p vs K^{2/3}
  std::string best;                 // "K^2" or "K^{2/3}" or "degenerate"
  bool degenerate = false;
};

TailFit tail_fit(const std::vector<double>& samples, const std::vector<double>& K_grid,
                 int min_exceed = 5);

// max_n <n>^{-eps} |g_n| over the lattice [-K_max, K_max]^2, sampled across
// seeds, then tail-fitted.
TailFit linf_gaussian_check(int n_samples, std::uint64_t seed_base, int K_max,
                            double eps, const std::vector<double>& K_grid);

struct BilinearRow {
  double N = 0.0, M = 0.0;
  double ratio = 0.0;  // ||F_N F_M|| / ((M/N)^{1/2} ||P_N f1|| ||P_M f2||)
};

// Sharp-annulus dyadic projection |xi| in [N, 2N).
ComplexField project_annulus(const ComplexField& f, double N);

std::vector<BilinearRow> bilinear_ratio_scan(const ComplexField& f1,
                                             const ComplexField& f2,
                                             const std::vector<double>& N_list,
                                             const std::vector<double>& M_list,
                                             double t0, double t1, int n_times);

// rho-th moment growth of |sum c_n g_n|: fitted exponent of ||.||_rho in rho.
double moment_growth_exponent(const std::vector<cplx>& coeffs, int n_samples,
                              std::uint64_t seed_base,
                              const std::vector<int>& rhos);

}  // namespace nls
