#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace nls {

using cplx = std::complex<double>;

// Periodic grid on [-L, L)^2 with n points per dimension (n a power of two).
// Wavenumbers xi_j = (pi/L) j for j in {-n/2, ..., n/2-1}, stored in FFT
// index order (0, 1, ..., n/2-1, -n/2, ..., -1).
struct Grid2D {
  int n = 0;
  double half_width = 0.0;  // L
  double dx = 0.0;
  std::vector<double> x;    // physical coordinates, x[m] = -L + m dx
  std::vector<double> xi;   // wavenumber for FFT index

  static Grid2D make(int n, double L);

  double cell_area() const { return dx * dx; }
  double xi_max() const { return M_PI / half_width * (n / 2); }
  bool same(const Grid2D& o) const { return n == o.n && half_width == o.half_width; }
};

enum class Space { Physical, Spectral };

class ComplexField {
 public:
  ComplexField() = default;
  ComplexField(Grid2D grid, Space space)
      : grid_(std::move(grid)),
        space_(space),
        v_(static_cast<std::size_t>(grid_.n) * grid_.n, cplx{0.0, 0.0}) {}

  const Grid2D& grid() const { return grid_; }
  Space space() const { return space_; }
  std::size_t size() const { return v_.size(); }

  cplx& at(int i, int j) { return v_[static_cast<std::size_t>(i) * grid_.n + j]; }
  const cplx& at(int i, int j) const {
    return v_[static_cast<std::size_t>(i) * grid_.n + j];
  }
  std::vector<cplx>& values() { return v_; }
  const std::vector<cplx>& values() const { return v_; }

 private:
  Grid2D grid_;
  Space space_ = Space::Physical;
  std::vector<cplx> v_;
};

// Unitary FFT: Plancherel holds exactly in exact arithmetic, so the L2 norm
// agrees between spaces.
ComplexField transform(const ComplexField& f);
ComplexField to_space(const ComplexField& f, Space s);

// Pointwise spectral multiplier m(xi); result returned in physical space.
// Throws if m is non-finite at any grid wavenumber.
ComplexField apply_multiplier(const ComplexField& f,
                              const std::function<cplx(double, double)>& m);

// e^{i t Laplacian} via the multiplier e^{-i |xi|^2 t}.
ComplexField free_propagate(const ComplexField& f, double t);

// Real L2 pairing (f, g) = Re int f conj(g), rectangle rule.
double pair_real(const ComplexField& f, const ComplexField& g);

double l2_norm_sq(const ComplexField& f);
double l2_norm(const ComplexField& f);

// Discrete L^p norm in physical space; p = infinity gives the max modulus.
double lp_norm(const ComplexField& f, double p);

// Fraction of |u|^2 mass in the frame |x|_inf > frac * L.
double boundary_mass_fraction(const ComplexField& f, double frac = 0.9);

// Gradient norm squared int |grad u|^2 by spectral differentiation.
double grad_norm_sq(const ComplexField& f);

ComplexField operator+(const ComplexField& a, const ComplexField& b);
ComplexField operator-(const ComplexField& a, const ComplexField& b);
ComplexField operator*(cplx s, const ComplexField& a);

// Binary container: fixed little-endian header {magic "NLSF", version u32,
// endian marker u32 = 0x01020304, n u32, space u8, pad, L f64} then row-major
// complex doubles (re, im).
void write_field(const std::string& path, const ComplexField& f);
ComplexField read_field(const std::string& path);

}  // namespace nls
