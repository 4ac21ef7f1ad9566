#include "nls/cheb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nls {

namespace {

// Barycentric differentiation matrices (Welfert's formulas), built in long
// double: exact entries of the interpolant's derivative matrices, avoiding
// the error compounding of D*D.
void lobatto_diff_matrices(int N, std::vector<long double>& x,
                           std::vector<long double>& D,
                           std::vector<long double>& D2) {
  const int m = N + 1;
  x.resize(m);
  std::vector<long double> w(m);
  for (int j = 0; j < m; ++j) {
    x[j] = cosl(M_PIl * j / N);
    w[j] = (j % 2 == 0) ? 1.0L : -1.0L;
    if (j == 0 || j == N) w[j] *= 0.5L;
  }
  D.assign(static_cast<std::size_t>(m) * m, 0.0L);
  D2.assign(static_cast<std::size_t>(m) * m, 0.0L);
  auto at = [m](std::vector<long double>& M, int i, int j) -> long double& {
    return M[static_cast<std::size_t>(i) * m + j];
  };
  for (int i = 0; i < m; ++i) {
    long double rowsum = 0.0L;
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      at(D, i, j) = (w[j] / w[i]) / (x[i] - x[j]);
      rowsum += at(D, i, j);
    }
    at(D, i, i) = -rowsum;
  }
  for (int i = 0; i < m; ++i) {
    long double rowsum = 0.0L;
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      at(D2, i, j) = 2.0L * at(D, i, j) * (at(D, i, i) - 1.0L / (x[i] - x[j]));
      rowsum += at(D2, i, j);
    }
    at(D2, i, i) = -rowsum;
  }
}

}  // namespace

ChebGrid ChebGrid::make(int N, double R) { return make_ab(N, 0.0, R); }

ChebGrid ChebGrid::make_ab(int N, double lo, double hi) {
  if (N < 4 || !(hi > lo)) throw std::invalid_argument("ChebGrid: N >= 4, hi > lo");
  ChebGrid g;
  g.lo = lo;
  g.R = hi;
  const double len = hi - lo;
  const int m = N + 1;
  std::vector<long double> x, Dl, D2l;
  lobatto_diff_matrices(N, x, Dl, D2l);
  // r = lo + len (1 - x) / 2, so d/dr = (-2/len) d/dx.
  g.r.resize(m);
  for (int j = 0; j < m; ++j)
    g.r[j] = static_cast<double>(lo + len * (1.0L - x[j]) / 2.0L);
  g.r.front() = lo;
  g.r.back() = hi;
  g.D.resize(m, m);
  g.D2.resize(m, m);
  const long double s1 = -2.0L / len,
                    s2 = 4.0L / (static_cast<long double>(len) * len);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      g.D(i, j) = static_cast<double>(s1 * Dl[static_cast<std::size_t>(i) * m + j]);
      g.D2(i, j) = static_cast<double>(s2 * D2l[static_cast<std::size_t>(i) * m + j]);
    }

  // Clenshaw-Curtis weights on [-1, 1], then scale by |dr/dx| = len/2.
  g.w.assign(m, 0.0);
  for (int j = 0; j < m; ++j) {
    double s = 1.0;
    for (int k = 1; k <= N / 2; ++k) {
      const double bk = (2 * k == N) ? 1.0 : 2.0;
      s -= bk * std::cos(2.0 * k * M_PI * j / N) / (4.0 * k * k - 1.0);
    }
    double wj = 2.0 * s / N;
    if (j == 0 || j == N) wj *= 0.5;
    g.w[j] = wj * len / 2.0;
  }
  return g;
}

void ChebGrid::derivs_highprec(const std::vector<double>& f, std::vector<double>& d1,
                               std::vector<double>& d2) const {
  const int N = size() - 1;
  const int m = N + 1;
  std::vector<long double> x, Dl, D2l;
  lobatto_diff_matrices(N, x, Dl, D2l);
  d1.assign(m, 0.0);
  d2.assign(m, 0.0);
  const long double len = static_cast<long double>(R) - lo;
  const long double s1 = -2.0L / len, s2 = 4.0L / (len * len);
  for (int i = 0; i < m; ++i) {
    long double a1 = 0.0L, a2 = 0.0L;
    for (int j = 0; j < m; ++j) {
      const long double fj = f[j];
      a1 += Dl[static_cast<std::size_t>(i) * m + j] * fj;
      a2 += D2l[static_cast<std::size_t>(i) * m + j] * fj;
    }
    d1[i] = static_cast<double>(s1 * a1);
    d2[i] = static_cast<double>(s2 * a2);
  }
}

double ChebGrid::eval(const std::vector<double>& f, double rq) const {
  const int m = size();
  // Barycentric weights for Lobatto nodes: (-1)^j, halved at the ends.
  double num = 0.0, den = 0.0;
  for (int j = 0; j < m; ++j) {
    const double d = rq - r[j];
    if (std::abs(d) < 1e-14) return f[j];
    double wj = (j % 2 == 0) ? 1.0 : -1.0;
    if (j == 0 || j == m - 1) wj *= 0.5;
    const double t = wj / d;
    num += t * f[j];
    den += t;
  }
  return num / den;
}

double ChebGrid::integrate(const std::vector<double>& f) const {
  double s = 0.0;
  for (int j = 0; j < size(); ++j) s += w[j] * f[j];
  return s;
}

void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration from the Chebyshev-based initial guess.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = a + (b - a) * 0.5 * (1.0 - x);
    weights[i] = (b - a) / ((1.0 - x * x) * pp * pp);
  }
}

double segmented_integral(const std::function<double(double)>& f, double a, double b,
                          std::vector<double> breakpoints, int pts_per_segment,
                          int subdivisions) {
  breakpoints.push_back(a);
  breakpoints.push_back(b);
  std::sort(breakpoints.begin(), breakpoints.end());
  std::vector<double> pts;
  for (double p : breakpoints)
    if (p >= a && p <= b && (pts.empty() || p > pts.back() + 1e-14)) pts.push_back(p);

  double total = 0.0;
  std::vector<double> xs, ws;
  for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
    const double lo = pts[s], hi = pts[s + 1];
    for (int d = 0; d < subdivisions; ++d) {
      const double u0 = lo + (hi - lo) * d / subdivisions;
      const double u1 = lo + (hi - lo) * (d + 1) / subdivisions;
      gauss_legendre(pts_per_segment, u0, u1, xs, ws);
      for (int i = 0; i < pts_per_segment; ++i) total += ws[i] * f(xs[i]);
    }
  }
  return total;
}

}  // namespace nls
