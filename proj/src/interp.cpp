#include "nls/interp.hpp"

#include <algorithm>
#include <cmath>

namespace nls {

namespace {

// Tridiagonal solve for natural-spline second derivatives.
std::vector<double> spline_moments(const std::vector<double>& x,
                                   const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> m(n, 0.0);
  if (n < 3) return m;
  std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x[i] - x[i - 1];
    const double h1 = x[i + 1] - x[i];
    a[i] = h0;
    b[i] = 2.0 * (h0 + h1);
    c[i] = h1;
    d[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
  }
  for (std::size_t i = 2; i + 1 < n; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m[i] = (d[i] - c[i] * (i + 2 < n ? m[i + 1] : 0.0)) / b[i];
    if (i == 1) break;
  }
  return m;
}

double eval_piece(double t, double h, double y0, double y1, double m0, double m1) {
  const double u = t / h;
  return y0 * (1.0 - u) + y1 * u +
         ((1.0 - u) * ((1.0 - u) * (1.0 - u) - 1.0) * m0 + u * (u * u - 1.0) * m1) *
             h * h / 6.0;
}

double eval_piece_deriv(double t, double h, double y0, double y1, double m0,
                        double m1) {
  const double u = t / h;
  return (y1 - y0) / h +
         h / 6.0 * ((3.0 * u * u - 6.0 * u + 2.0) * m0 + (3.0 * u * u - 1.0) * m1);
}

}  // namespace

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size() || x_.size() < 2)
    throw std::invalid_argument("CubicSpline: need >= 2 matching nodes");
  for (std::size_t i = 1; i < x_.size(); ++i)
    if (!(x_[i] > x_[i - 1]))
      throw std::invalid_argument("CubicSpline: nodes must be increasing");
  m_ = spline_moments(x_, y_);
}

std::size_t CubicSpline::locate(double xq) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), xq);
  std::size_t i = static_cast<std::size_t>(it - x_.begin());
  if (i == 0) i = 1;
  if (i >= x_.size()) i = x_.size() - 1;
  return i - 1;
}

double CubicSpline::operator()(double xq) const {
  if (xq <= x_.front()) return y_.front();
  if (xq >= x_.back()) return y_.back();
  const std::size_t i = locate(xq);
  return eval_piece(xq - x_[i], x_[i + 1] - x_[i], y_[i], y_[i + 1], m_[i], m_[i + 1]);
}

double CubicSpline::derivative(double xq) const {
  if (xq <= x_.front() || xq >= x_.back()) return 0.0;
  const std::size_t i = locate(xq);
  return eval_piece_deriv(xq - x_[i], x_[i + 1] - x_[i], y_[i], y_[i + 1], m_[i],
                          m_[i + 1]);
}

UniformSpline::UniformSpline(double x0, double dx, std::vector<double> y)
    : x0_(x0), dx_(dx), y_(std::move(y)) {
  if (y_.size() < 2 || dx_ <= 0.0)
    throw std::invalid_argument("UniformSpline: bad nodes");
  std::vector<double> x(y_.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = x0_ + dx_ * static_cast<double>(i);
  m_ = spline_moments(x, y_);
}

double UniformSpline::operator()(double xq) const {
  const double s = (xq - x0_) / dx_;
  if (s <= 0.0) return y_.front();
  if (s >= static_cast<double>(y_.size() - 1)) return y_.back();
  const std::size_t i = static_cast<std::size_t>(s);
  return eval_piece(xq - (x0_ + dx_ * static_cast<double>(i)), dx_, y_[i], y_[i + 1],
                    m_[i], m_[i + 1]);
}

double UniformSpline::derivative(double xq) const {
  const double s = (xq - x0_) / dx_;
  if (s <= 0.0 || s >= static_cast<double>(y_.size() - 1)) return 0.0;
  const std::size_t i = static_cast<std::size_t>(s);
  return eval_piece_deriv(xq - (x0_ + dx_ * static_cast<double>(i)), dx_, y_[i],
                          y_[i + 1], m_[i], m_[i + 1]);
}

}  // namespace nls
