#include "nls/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>

namespace nls {

namespace {

bool is_pow2(int n) { return n >= 1 && (n & (n - 1)) == 0; }

// Plan cache keyed by n. Plans are created once under a lock and then executed
// concurrently via the new-array interface (safe on distinct arrays).
struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

PlanPair& plans_for(int n) {
  static std::map<int, PlanPair> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cplx> a(static_cast<std::size_t>(n) * n), b(a.size());
  PlanPair p;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p.fwd = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(a.data()),
                           reinterpret_cast<fftw_complex*>(b.data()), FFTW_FORWARD,
                           flags);
  p.bwd = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(a.data()),
                           reinterpret_cast<fftw_complex*>(b.data()), FFTW_BACKWARD,
                           flags);
  return cache.emplace(n, p).first->second;
}

}  // namespace

Grid2D Grid2D::make(int n, double L) {
  if (!is_pow2(n) || n < 8)
    throw std::invalid_argument("Grid2D: n must be a power of two, n >= 8");
  if (!(L > 0.0)) throw std::invalid_argument("Grid2D: L must be positive");
  Grid2D g;
  g.n = n;
  g.half_width = L;
  g.dx = 2.0 * L / n;
  g.x.resize(n);
  g.xi.resize(n);
  for (int m = 0; m < n; ++m) g.x[m] = -L + m * g.dx;
  for (int j = 0; j < n; ++j) {
    const int jj = (j < n / 2) ? j : j - n;
    g.xi[j] = M_PI / L * jj;
  }
  return g;
}

ComplexField transform(const ComplexField& f) {
  const int n = f.grid().n;
  ComplexField out(f.grid(),
                   f.space() == Space::Physical ? Space::Spectral : Space::Physical);
  PlanPair& p = plans_for(n);
  auto* in_ptr = reinterpret_cast<fftw_complex*>(
      const_cast<cplx*>(f.values().data()));
  auto* out_ptr = reinterpret_cast<fftw_complex*>(out.values().data());
  if (f.space() == Space::Physical)
    fftw_execute_dft(p.fwd, in_ptr, out_ptr);
  else
    fftw_execute_dft(p.bwd, in_ptr, out_ptr);
  const double scale = 1.0 / n;  // unitary split: 1/n each way in 2D
  for (auto& v : out.values()) v *= scale;
  return out;
}

ComplexField to_space(const ComplexField& f, Space s) {
  if (f.space() == s) return f;
  return transform(f);
}

ComplexField apply_multiplier(const ComplexField& f,
                              const std::function<cplx(double, double)>& m) {
  ComplexField spec = to_space(f, Space::Spectral);
  const Grid2D& g = spec.grid();
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      const cplx mv = m(g.xi[i], g.xi[j]);
      if (!std::isfinite(mv.real()) || !std::isfinite(mv.imag()))
        throw std::runtime_error("apply_multiplier: non-finite multiplier value");
      spec.at(i, j) *= mv;
    }
  }
  return transform(spec);
}

ComplexField free_propagate(const ComplexField& f, double t) {
  ComplexField spec = to_space(f, Space::Spectral);
  const Grid2D& g = spec.grid();
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      const double k2 = g.xi[i] * g.xi[i] + g.xi[j] * g.xi[j];
      spec.at(i, j) *= std::polar(1.0, -k2 * t);
    }
  }
  if (f.space() == Space::Spectral) return spec;
  return transform(spec);
}

double pair_real(const ComplexField& f, const ComplexField& g) {
  if (!f.grid().same(g.grid())) throw std::invalid_argument("pair_real: grid mismatch");
  if (f.space() != g.space()) throw std::invalid_argument("pair_real: space mismatch");
  double s = 0.0;
  const auto& a = f.values();
  const auto& b = g.values();
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  return s * f.grid().cell_area();
}

double l2_norm_sq(const ComplexField& f) {
  double s = 0.0;
  for (const auto& v : f.values()) s += std::norm(v);
  return s * f.grid().cell_area();
}

double l2_norm(const ComplexField& f) { return std::sqrt(l2_norm_sq(f)); }

double lp_norm(const ComplexField& f, double p) {
  if (f.space() != Space::Physical)
    throw std::invalid_argument("lp_norm: physical space required");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : f.values()) m = std::max(m, std::abs(v));
    return m;
  }
  if (p < 1.0) throw std::invalid_argument("lp_norm: p >= 1 required");
  double s = 0.0;
  for (const auto& v : f.values()) s += std::pow(std::abs(v), p);
  return std::pow(s * f.grid().cell_area(), 1.0 / p);
}

double boundary_mass_fraction(const ComplexField& f, double frac) {
  const ComplexField phys = to_space(f, Space::Physical);
  const Grid2D& g = phys.grid();
  const double cut = frac * g.half_width;
  double outer = 0.0, total = 0.0;
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      const double m = std::norm(phys.at(i, j));
      total += m;
      if (std::abs(g.x[i]) > cut || std::abs(g.x[j]) > cut) outer += m;
    }
  }
  return total > 0.0 ? outer / total : 0.0;
}

double grad_norm_sq(const ComplexField& f) {
  ComplexField spec = to_space(f, Space::Spectral);
  const Grid2D& g = spec.grid();
  double s = 0.0;
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      const double k2 = g.xi[i] * g.xi[i] + g.xi[j] * g.xi[j];
      s += k2 * std::norm(spec.at(i, j));
    }
  }
  return s * g.cell_area();
}

ComplexField operator+(const ComplexField& a, const ComplexField& b) {
  if (!a.grid().same(b.grid()) || a.space() != b.space())
    throw std::invalid_argument("field +: mismatch");
  ComplexField out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] += b.values()[i];
  return out;
}

ComplexField operator-(const ComplexField& a, const ComplexField& b) {
  if (!a.grid().same(b.grid()) || a.space() != b.space())
    throw std::invalid_argument("field -: mismatch");
  ComplexField out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] -= b.values()[i];
  return out;
}

ComplexField operator*(cplx s, const ComplexField& a) {
  ComplexField out = a;
  for (auto& v : out.values()) v *= s;
  return out;
}

void write_field(const std::string& path, const ComplexField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_field: cannot open " + path);
  const char magic[4] = {'N', 'L', 'S', 'F'};
  const std::uint32_t version = 1;
  const std::uint32_t endian = 0x01020304u;
  const std::uint32_t n = static_cast<std::uint32_t>(f.grid().n);
  const std::uint8_t space = f.space() == Space::Physical ? 0 : 1;
  const std::uint8_t pad[3] = {0, 0, 0};
  const double L = f.grid().half_width;
  os.write(magic, 4);
  os.write(reinterpret_cast<const char*>(&version), 4);
  os.write(reinterpret_cast<const char*>(&endian), 4);
  os.write(reinterpret_cast<const char*>(&n), 4);
  os.write(reinterpret_cast<const char*>(&space), 1);
  os.write(reinterpret_cast<const char*>(pad), 3);
  os.write(reinterpret_cast<const char*>(&L), 8);
  os.write(reinterpret_cast<const char*>(f.values().data()),
           static_cast<std::streamsize>(f.values().size() * sizeof(cplx)));
  if (!os) throw std::runtime_error("write_field: write failed for " + path);
}

ComplexField read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_field: cannot open " + path);
  char magic[4];
  std::uint32_t version = 0, endian = 0, n = 0;
  std::uint8_t space = 0, pad[3];
  double L = 0.0;
  is.read(magic, 4);
  is.read(reinterpret_cast<char*>(&version), 4);
  is.read(reinterpret_cast<char*>(&endian), 4);
  is.read(reinterpret_cast<char*>(&n), 4);
  is.read(reinterpret_cast<char*>(&space), 1);
  is.read(reinterpret_cast<char*>(pad), 3);
  is.read(reinterpret_cast<char*>(&L), 8);
  if (!is || std::memcmp(magic, "NLSF", 4) != 0)
    throw std::runtime_error("read_field: bad header in " + path);
  if (endian != 0x01020304u)
    throw std::runtime_error("read_field: endianness mismatch in " + path);
  ComplexField f(Grid2D::make(static_cast<int>(n), L),
                 space == 0 ? Space::Physical : Space::Spectral);
  is.read(reinterpret_cast<char*>(f.values().data()),
          static_cast<std::streamsize>(f.values().size() * sizeof(cplx)));
  if (!is) throw std::runtime_error("read_field: truncated data in " + path);
  return f;
}

}  // namespace nls
