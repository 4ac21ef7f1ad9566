#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace nls {

// Chebyshev-Lobatto collocation on [lo, R], nodes stored ascending.
struct ChebGrid {
  double lo = 0.0;
  double R = 1.0;
  std::vector<double> r;        // N+1 nodes
  Eigen::MatrixXd D;            // first-derivative matrix d/dr
  Eigen::MatrixXd D2;           // second-derivative matrix
  std::vector<double> w;        // Clenshaw-Curtis weights for int_lo^R f(r) dr

  static ChebGrid make(int N, double R);                 // on [0, R]
  static ChebGrid make_ab(int N, double lo, double hi);  // on [lo, hi]
  int size() const { return static_cast<int>(r.size()); }

  // Barycentric evaluation of the interpolating polynomial through (r, f).
  double eval(const std::vector<double>& f, double rq) const;

  double integrate(const std::vector<double>& f) const;

  // First/second derivative of the interpolant at the nodes, accumulated in
  // long double; used where residuals must be resolved near roundoff.
  void derivs_highprec(const std::vector<double>& f, std::vector<double>& d1,
                       std::vector<double>& d2) const;
};

// Gauss-Legendre nodes/weights on [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights);

// Integral of f over [a, b] split at interior breakpoints, Gauss-Legendre per
// segment. Breakpoints outside (a, b) are ignored.
double segmented_integral(const std::function<double(double)>& f, double a, double b,
                          std::vector<double> breakpoints, int pts_per_segment = 64,
                          int subdivisions = 8);

}  // namespace nls
