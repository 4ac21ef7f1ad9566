#include "nls/imethod.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nls {

double i_multiplier(double rho, double s) {
  if (rho <= 1.0) return 1.0;
  if (rho >= 2.0) return std::pow(rho, s - 1.0);
  // Quintic Hermite in u = log(rho) on [0, ln 2] for log m, matching value and
  // two derivatives at both ends: (0,0,0) and (-(1-s)ln2, -(1-s), 0).
  const double u1 = std::log(2.0);
  const double tau = std::log(rho) / u1;
  const double t3 = tau * tau * tau;
  const double H3 = t3 * (10.0 + tau * (-15.0 + 6.0 * tau));
  const double H4 = t3 * (-4.0 + tau * (7.0 - 3.0 * tau));
  const double h = -(1.0 - s) * u1 * H3 - (1.0 - s) * u1 * H4;
  return std::exp(h);
}

namespace {

ComplexField apply_m(const ComplexField& f, const IMultiplierSpec& spec,
                     bool complement) {
  if (!(spec.N >= 1.0) || !(spec.s > 0.0 && spec.s < 1.0))
    throw std::invalid_argument("I-multiplier: need N >= 1 and s in (0,1)");
  if (f.grid().xi_max() < 2.0 * spec.N)
    throw std::invalid_argument("I-multiplier: grid does not resolve 2N");
  const double N = spec.N, s = spec.s;
  return apply_multiplier(f, [N, s, complement](double x1, double x2) {
    const double m = i_multiplier(std::hypot(x1, x2) / N, s);
    return cplx{complement ? 1.0 - m : m, 0.0};
  });
}

}  // namespace

ComplexField apply_I(const ComplexField& f, const IMultiplierSpec& spec) {
  return apply_m(f, spec, false);
}

ComplexField apply_J(const ComplexField& f, const IMultiplierSpec& spec) {
  return apply_m(f, spec, true);
}

double sobolev_norm(const ComplexField& f, double s) {
  ComplexField spec = to_space(f, Space::Spectral);
  const Grid2D& g = spec.grid();
  double acc = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const double k2 = g.xi[i] * g.xi[i] + g.xi[j] * g.xi[j];
      acc += std::pow(1.0 + k2, s) * std::norm(spec.at(i, j));
    }
  return std::sqrt(acc * g.cell_area());
}

NormEquivalence norm_equivalence(const ComplexField& f,
                                 const IMultiplierSpec& spec) {
  NormEquivalence out;
  out.lhs = sobolev_norm(f, spec.s);
  ComplexField sf = to_space(f, Space::Spectral);
  const Grid2D& g = sf.grid();
  double acc = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const double k2 = g.xi[i] * g.xi[i] + g.xi[j] * g.xi[j];
      const double m = i_multiplier(std::sqrt(k2) / spec.N, spec.s);
      acc += m * m * (1.0 + k2) * std::norm(sf.at(i, j));
    }
  out.mid = std::sqrt(acc * g.cell_area());
  out.rhs = std::pow(spec.N, 1.0 - spec.s) * out.lhs;
  return out;
}

double modified_energy(const ComplexField& f, const IMultiplierSpec& spec) {
  return conserved(apply_I(f, spec)).energy;
}

void modified_momentum(const ComplexField& f, const IMultiplierSpec& spec,
                       double out[2]) {
  Conserved c = conserved(apply_I(f, spec));
  out[0] = c.momentum[0];
  out[1] = c.momentum[1];
}

double xi_quantity(const ComplexField& a0, double lambda,
                   const IMultiplierSpec& spec) {
  ComplexField j = apply_J(a0, spec);
  return 0.5 * lambda * lambda * grad_norm_sq(j);
}

FitResult fit_loglinear(const std::vector<double>& x, const std::vector<double>& y) {
  FitResult r;
  r.n = static_cast<int>(x.size());
  if (x.size() != y.size() || x.size() < 3) return r;
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (den <= 0.0) return r;
  r.slope = (n * sxy - sx * sy) / den;
  r.intercept = (sy - r.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double ymean = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double fit = r.intercept + r.slope * x[i];
    ss_res += (y[i] - fit) * (y[i] - fit);
    ss_tot += (y[i] - ymean) * (y[i] - ymean);
  }
  r.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  if (x.size() > 2) {
    const double sigma2 = ss_res / (n - 2.0);
    r.stderr_slope = std::sqrt(n * sigma2 / den);
    r.ci95_lo = r.slope - 1.96 * r.stderr_slope;
    r.ci95_hi = r.slope + 1.96 * r.stderr_slope;
  }
  r.valid = true;
  return r;
}

AlmostConservationReport almost_conservation_report(
    const std::vector<AcSample>& samples, const ComplexField& a0,
    const AlmostConservationPolicy& policy) {
  AlmostConservationReport rep;
  std::vector<double> xs, ye, yp;
  for (const auto& s : samples) {
    AlmostConservationRow row;
    row.t = s.t;
    row.lambda = s.lambda;
    row.N = std::pow(s.lambda, -(1.0 + policy.delta));
    IMultiplierSpec spec{row.N, policy.s};
    const double ximax = s.a->grid().xi_max();
    if (2.0 * row.N > ximax) {
      // Under-resolved filter threshold: freeze N at the resolvable cap.
      row.N = ximax / 2.0;
      spec.N = row.N;
    }
    row.energy_mod = modified_energy(*s.a, spec);
    row.xi_over_l2 = xi_quantity(a0, s.lambda, spec) / (s.lambda * s.lambda);
    row.combo = std::abs(row.energy_mod + row.xi_over_l2);
    double p[2];
    modified_momentum(*s.a, spec, p);
    row.momentum = std::hypot(p[0], p[1]);
    rep.rows.push_back(row);
    if (row.combo > 0.0 && row.momentum > 0.0) {
      xs.push_back(std::log(1.0 / s.lambda));
      ye.push_back(std::log(row.combo));
      yp.push_back(std::log(row.momentum));
    }
  }
  if (xs.size() < 6 ||
      *std::max_element(xs.begin(), xs.end()) -
              *std::min_element(xs.begin(), xs.end()) <
          0.2) {
    rep.sufficient_range = false;
    rep.note = "insufficient dynamic range in lambda; fit skipped";
    return rep;
  }
  rep.sufficient_range = true;
  rep.energy_fit = fit_loglinear(xs, ye);
  rep.momentum_fit = fit_loglinear(xs, yp);
  return rep;
}

}  // namespace nls
