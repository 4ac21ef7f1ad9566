#include "nls/randomize.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nls/rng.hpp"

namespace nls {

namespace {

double smoothstep(int order, double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  switch (order) {
    case 1:
      return u;
    case 3:
      return u * u * (3.0 - 2.0 * u);
    case 5:
      return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
    case 7:
      return u * u * u * u * (35.0 + u * (-84.0 + u * (70.0 - 20.0 * u)));
    default:
      throw std::invalid_argument("smoothstep order must be 1, 3, 5 or 7");
  }
}

}  // namespace

double Window::psi1(double xi) const {
  const double h = overlap / 2.0;
  const double lo = 0.5 - h, hi = 0.5 + h;
  const double a = std::abs(xi);
  if (a <= lo) return 1.0;
  if (a >= hi) return 0.0;
  return 1.0 - smoothstep(order, (a - lo) / (2.0 * h));
}

Window make_window(int smoothstep_order, double overlap) {
  if (!(overlap > 0.0 && overlap <= 1.0))
    throw std::invalid_argument("make_window: overlap in (0, 1] required");
  smoothstep(smoothstep_order, 0.5);  // validates the order
  return Window{smoothstep_order, overlap};
}

double RandomDataSpec::l2_sum() const {
  double s = 0.0;
  for (double a : amplitudes) s += a * a;
  return s;
}

RandomDataSpec make_profile(const std::string& shape, int K_max, bool normalize,
                            Window window) {
  if (K_max < 4) throw std::invalid_argument("make_profile: K_max >= 4 required");
  RandomDataSpec spec;
  spec.window = window;
  spec.shape = shape;
  spec.K_max = K_max;
  spec.normalized = normalize;
  const int side = spec.side();
  spec.amplitudes.assign(static_cast<std::size_t>(side) * side, 0.0);
  for (int kx = -K_max; kx <= K_max; ++kx) {
    for (int ky = -K_max; ky <= K_max; ++ky) {
      const double m = std::max(
          std::hypot(static_cast<double>(kx), static_cast<double>(ky)), 1.0);
      double v = 0.0;
      if (shape == "pure-inverse")
        v = 1.0 / m;
      else if (shape == "log-corrected")
        v = 1.0 / (m * std::pow(std::log(1.0 + m), 2));
      else if (shape == "log-corrected-1")
        v = 1.0 / (m * std::log(1.0 + m));
      else
        throw std::invalid_argument("make_profile: unknown shape " + shape);
      spec.amplitudes[static_cast<std::size_t>(kx + K_max) * side + (ky + K_max)] =
          v;
    }
  }
  if (normalize) {
    const double z = std::sqrt(spec.l2_sum());
    for (double& a : spec.amplitudes) a /= z;
  }
  double C = 0.0;
  for (int kx = -K_max; kx <= K_max; ++kx)
    for (int ky = -K_max; ky <= K_max; ++ky) {
      if (kx == 0 && ky == 0) continue;
      const double k = std::hypot(static_cast<double>(kx), static_cast<double>(ky));
      C = std::max(C, spec.amp(kx, ky) * k);
    }
  spec.decay_constant = C;
  return spec;
}

ComplexField project_unit(const ComplexField& f, int kx, int ky, Window window) {
  const Grid2D& g = f.grid();
  const double kmag = std::hypot(static_cast<double>(kx), static_cast<double>(ky));
  if (g.xi_max() < kmag + 2.0)
    throw std::invalid_argument("project_unit: k outside resolvable range");
  return apply_multiplier(f, [kx, ky, window](double x1, double x2) {
    return cplx{window.psi(x1 - kx, x2 - ky), 0.0};
  });
}

double bernstein_ratio(const ComplexField& f, int kx, int ky, double r1,
                       double r2, Window window) {
  if (!(r1 >= 1.0) || !(r2 >= r1))
    throw std::invalid_argument("bernstein_ratio: need 1 <= r1 <= r2");
  ComplexField pk = project_unit(f, kx, ky, window);
  const double den = lp_norm(pk, r1);
  if (den == 0.0) throw std::runtime_error("bernstein_ratio: zero denominator");
  return lp_norm(pk, r2) / den;
}

RandomSample sample(const RandomDataSpec& spec, const Grid2D& grid,
                    std::uint64_t seed) {
  const int K = spec.K_max;
  if (grid.xi_max() < K + 1.0)
    throw std::invalid_argument("sample: grid does not resolve K_max");
  RandomSample out;
  out.seed = seed;
  const int side = spec.side();
  out.gaussians.resize(static_cast<std::size_t>(side) * side);
  for (int kx = -K; kx <= K; ++kx)
    for (int ky = -K; ky <= K; ++ky)
      out.gaussians[static_cast<std::size_t>(kx + K) * side + (ky + K)] =
          rng::complex_gaussian(seed, kx, ky, 0);

  ComplexField spec_field(grid, Space::Spectral);
  // Continuum-FT-consistent bin amplitude: c_j = fhat(xi_j) / (n dx^2).
  const double scale = 1.0 / (grid.n * grid.cell_area());
  const double hw = 0.5 + spec.window.overlap / 2.0;
  for (int i = 0; i < grid.n; ++i) {
    const double x1 = grid.xi[i];
    for (int j = 0; j < grid.n; ++j) {
      const double x2 = grid.xi[j];
      cplx acc{0.0, 0.0};
      const int kx_lo = static_cast<int>(std::ceil(x1 - hw));
      const int kx_hi = static_cast<int>(std::floor(x1 + hw));
      const int ky_lo = static_cast<int>(std::ceil(x2 - hw));
      const int ky_hi = static_cast<int>(std::floor(x2 + hw));
      for (int kx = std::max(kx_lo, -K); kx <= std::min(kx_hi, K); ++kx) {
        const double w1 = spec.window.psi1(x1 - kx);
        if (w1 == 0.0) continue;
        for (int ky = std::max(ky_lo, -K); ky <= std::min(ky_hi, K); ++ky) {
          const double w = w1 * spec.window.psi1(x2 - ky);
          if (w == 0.0) continue;
          acc += out.gaussians[static_cast<std::size_t>(kx + K) * side + (ky + K)] *
                 (spec.amp(kx, ky) * w);
        }
      }
      spec_field.at(i, j) = acc * scale;
    }
  }
  out.field = transform(spec_field);
  return out;
}

double nu_deterministic(const RandomDataSpec& spec, const Grid2D& grid) {
  const int K = spec.K_max;
  const double scale = 1.0 / (grid.n * grid.cell_area());
  const double hw = 0.5 + spec.window.overlap / 2.0;
  double nu = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    const double x1 = grid.xi[i];
    for (int j = 0; j < grid.n; ++j) {
      const double x2 = grid.xi[j];
      double acc = 0.0;
      const int kx_lo = static_cast<int>(std::ceil(x1 - hw));
      const int kx_hi = static_cast<int>(std::floor(x1 + hw));
      const int ky_lo = static_cast<int>(std::ceil(x2 - hw));
      const int ky_hi = static_cast<int>(std::floor(x2 + hw));
      for (int kx = std::max(kx_lo, -K); kx <= std::min(kx_hi, K); ++kx) {
        const double w1 = spec.window.psi1(x1 - kx);
        if (w1 == 0.0) continue;
        for (int ky = std::max(ky_lo, -K); ky <= std::min(ky_hi, K); ++ky) {
          const double w = w1 * spec.window.psi1(x2 - ky);
          const double fa = spec.amp(kx, ky) * w;
          acc += fa * fa;
        }
      }
      nu += acc;
    }
  }
  return nu * scale * scale * grid.cell_area();
}

std::string serialize_spec(const RandomDataSpec& spec, const Grid2D& grid) {
  std::ostringstream os;
  os.precision(17);
  os << "window_order " << spec.window.order << "\n";
  os << "window_overlap " << spec.window.overlap << "\n";
  os << "shape " << spec.shape << "\n";
  os << "K_max " << spec.K_max << "\n";
  os << "normalized " << (spec.normalized ? 1 : 0) << "\n";
  os << "decay_constant " << spec.decay_constant << "\n";
  os << "nu " << nu_deterministic(spec, grid) << "\n";
  return os.str();
}

RandomDataSpec parse_spec(const std::string& text) {
  std::istringstream is(text);
  std::string key;
  int order = 5, K_max = 8, norm = 1;
  double overlap = 0.5;
  std::string shape = "log-corrected";
  while (is >> key) {
    if (key == "window_order")
      is >> order;
    else if (key == "window_overlap")
      is >> overlap;
    else if (key == "shape")
      is >> shape;
    else if (key == "K_max")
      is >> K_max;
    else if (key == "normalized")
      is >> norm;
    else {
      std::string skip;
      is >> skip;
    }
  }
  return make_profile(shape, K_max, norm != 0, make_window(order, overlap));
}

}  // namespace nls
