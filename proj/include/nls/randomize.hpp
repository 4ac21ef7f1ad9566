#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nls/spectral.hpp"

namespace nls {

// Unit-cube frequency window: translates psi(xi - k), k in Z^2, form an exact
// partition of unity. The 1D factor ramps across [1/2 - h, 1/2 + h] with
// h = overlap/2 using a polynomial smoothstep of the given order.
struct Window {
  int order = 5;        // 1 (linear), 3, 5, 7
  double overlap = 0.5;  // transition width parameter in (0, 1]

  double psi1(double xi) const;           // 1D factor
  double psi(double xi1, double xi2) const { return psi1(xi1) * psi1(xi2); }
};

Window make_window(int smoothstep_order, double overlap);

// Fourier-amplitude profile {f_k} on the lattice [-K_max, K_max]^2 with the
// paper-style decay |f_k| <= C/|k| and normalization sum |f_k|^2 = 1.
struct RandomDataSpec {
  Window window;
  std::string shape;  // "pure-inverse" | "log-corrected" | "log-corrected-1"
  int K_max = 8;
  bool normalized = true;
  std::vector<double> amplitudes;  // row-major over (kx + K_max, ky + K_max)
  double decay_constant = 0.0;     // C = max_{k != 0} |f_k| |k|

  int side() const { return 2 * K_max + 1; }
  double amp(int kx, int ky) const {
    return amplitudes[static_cast<std::size_t>(kx + K_max) * side() +
                      (ky + K_max)];
  }
  double l2_sum() const;
};

RandomDataSpec make_profile(const std::string& shape, int K_max,
                            bool normalize = true, Window window = {});

std::string serialize_spec(const RandomDataSpec& spec, const Grid2D& grid);
RandomDataSpec parse_spec(const std::string& text);

// P_k f: multiplier psi(xi - k).
ComplexField project_unit(const ComplexField& f, int kx, int ky,
                          Window window = {});

// ||P_k f||_{r2} / ||P_k f||_{r1} on discrete Lebesgue norms.
double bernstein_ratio(const ComplexField& f, int kx, int ky, double r1,
                       double r2, Window window = {});

struct RandomSample {
  std::uint64_t seed = 0;
  std::vector<cplx> gaussians;  // g_k, same layout as spec amplitudes
  ComplexField field;           // realized f^omega, physical space
};

// Deterministic in (spec, seed); the k-th Gaussian is a pure function of
// (seed, k), so assembly order is immaterial.
RandomSample sample(const RandomDataSpec& spec, const Grid2D& grid,
                    std::uint64_t seed);

// Deterministic expectation of ||f^omega||_2^2 on this grid.
double nu_deterministic(const RandomDataSpec& spec, const Grid2D& grid);

}  // namespace nls
