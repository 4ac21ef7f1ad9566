#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace nls {

// Natural cubic spline on strictly increasing nodes. Evaluation outside the
// node range clamps to the boundary value (profiles are extended by their
// boundary value, typically 0).
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);

  double operator()(double xq) const;
  double derivative(double xq) const;
  bool empty() const { return x_.empty(); }
  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

 private:
  std::vector<double> x_, y_, m_;  // m_: second derivatives at nodes
  std::size_t locate(double xq) const;
};

// Uniform-grid cubic spline wrapper used on hot paths (O(1) interval lookup).
class UniformSpline {
 public:
  UniformSpline() = default;
  UniformSpline(double x0, double dx, std::vector<double> y);

  double operator()(double xq) const;
  double derivative(double xq) const;
  bool empty() const { return y_.empty(); }
  double x_max() const { return x0_ + dx_ * static_cast<double>(y_.size() - 1); }

 private:
  double x0_ = 0.0, dx_ = 1.0;
  std::vector<double> y_, m_;
};

}  // namespace nls
