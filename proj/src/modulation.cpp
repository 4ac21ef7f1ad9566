#include "nls/modulation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nls {

namespace {

constexpr int kRhoNodes = 2048;

double sstep(double u) { return u * u * u * (10.0 + u * (-15.0 + 6.0 * u)); }
double sstep_d1(double u) { return 30.0 * u * u * (1.0 - u) * (1.0 - u); }
double sstep_d2(double u) { return 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u); }

}  // namespace

double QbInterp::Assembled::cutoff(double r) const {
  if (r <= Rb_minus) return 1.0;
  if (r >= R_b) return 0.0;
  return 1.0 - sstep((r - Rb_minus) / (R_b - Rb_minus));
}
double QbInterp::Assembled::cutoff_d1(double r) const {
  if (r <= Rb_minus || r >= R_b) return 0.0;
  const double w = R_b - Rb_minus;
  return -sstep_d1((r - Rb_minus) / w) / w;
}
double QbInterp::Assembled::cutoff_d2(double r) const {
  if (r <= Rb_minus || r >= R_b) return 0.0;
  const double w = R_b - Rb_minus;
  return -sstep_d2((r - Rb_minus) / w) / (w * w);
}

void QbInterp::Assembled::eval(double r, cplx& qt, cplx& lam_qt,
                               cplx& lam2_qt) const {
  if (r >= R_b) {
    qt = lam_qt = lam2_qt = cplx{0.0, 0.0};
    return;
  }
  const double rho = r / R_b;
  const double p = P(rho);
  const double pp = Pp(rho) / R_b;
  const double ppp = Ppp(rho) / (R_b * R_b);
  const double ph = cutoff(r), ph1 = cutoff_d1(r), ph2 = cutoff_d2(r);
  const double W = ph * p;
  const double W1 = ph1 * p + ph * pp;
  const double W2 = ph2 * p + 2.0 * ph1 * pp + ph * ppp;
  const double th1 = b * r / 2.0, th2 = b / 2.0;
  const cplx phase = std::polar(1.0, -b * r * r / 4.0);
  qt = W * phase;
  const cplx d1 = cplx(W1, -th1 * W) * phase;
  const cplx d2 = cplx(W2 - th1 * th1 * W, -th2 * W - 2.0 * th1 * W1) * phase;
  lam_qt = qt + r * d1;
  lam2_qt = qt + 3.0 * r * d1 + r * r * d2;
}

cplx QbInterp::Assembled::qtilde(double r) const {
  cplx qt, l1, l2;
  eval(r, qt, l1, l2);
  return qt;
}

QbInterp::QbInterp(QbFamily& family, double b_lo, double b_hi, double db)
    : ground_(family.ground()), b_lo_(b_lo), b_hi_(b_hi), db_(db) {
  eta_ = family.params().eta;
  for (double b = b_lo; b <= b_hi + 1e-12; b += db) {
    const QbSolution& sol = family.at(std::min(b, b_hi));
    bs_.push_back(sol.b);
    std::vector<double> P(kRhoNodes + 1), Pp(kRhoNodes + 1), Ppp(kRhoNodes + 1);
    for (int i = 0; i <= kRhoNodes; ++i) {
      const double r = sol.R_b * i / kRhoNodes;
      P[i] = sol.P_at(r);
      Pp[i] = sol.Pr_at(r) * sol.R_b;        // dP/d(rho)
      Ppp[i] = sol.Prr_at(r) * sol.R_b * sol.R_b;
    }
    Pn_.push_back(std::move(P));
    Ppn_.push_back(std::move(Pp));
    Pppn_.push_back(std::move(Ppp));
  }
}

QbInterp::Assembled QbInterp::assemble(double b) const {
  if (b < bs_.front() - 1e-12 || b > bs_.back() + 1e-12)
    throw std::runtime_error("QbInterp: b outside the solved profile range: " +
                             std::to_string(b));
  // 4-point Lagrange window around b.
  int i1 = static_cast<int>((b - bs_.front()) / db_);
  i1 = std::clamp(i1, 0, static_cast<int>(bs_.size()) - 2);
  int i0 = std::clamp(i1 - 1, 0, static_cast<int>(bs_.size()) - 4);
  double wts[4];
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int c = 0; c < 4; ++c) {
      if (c == a) continue;
      w *= (b - bs_[i0 + c]) / (bs_[i0 + a] - bs_[i0 + c]);
    }
    wts[a] = w;
  }

  Assembled out;
  out.b = b;
  out.eta = eta_;
  out.R_b = 2.0 * std::sqrt(1.0 - eta_) / b;
  out.Rb_minus = std::sqrt(1.0 - eta_) * out.R_b;
  std::vector<double> P(kRhoNodes + 1, 0.0), Pp(kRhoNodes + 1, 0.0),
      Ppp(kRhoNodes + 1, 0.0);
  for (int a = 0; a < 4; ++a) {
    for (int i = 0; i <= kRhoNodes; ++i) {
      P[i] += wts[a] * Pn_[i0 + a][i];
      Pp[i] += wts[a] * Ppn_[i0 + a][i];
      Ppp[i] += wts[a] * Pppn_[i0 + a][i];
    }
  }
  const double drho = 1.0 / kRhoNodes;
  out.P = UniformSpline(0.0, drho, std::move(P));
  out.Pp = UniformSpline(0.0, drho, std::move(Pp));
  out.Ppp = UniformSpline(0.0, drho, std::move(Ppp));

  // Radial constants by segmented quadrature.
  auto qmass = [&out](double r) { return std::norm(out.qtilde(r)) * 2 * M_PI * r; };
  out.qt_mass = segmented_integral(qmass, 0.0, out.R_b, {out.Rb_minus}, 48, 4);
  auto ymass = [&out](double r) {
    return r * r * std::norm(out.qtilde(r)) * 2 * M_PI * r;
  };
  out.y2_mass = segmented_integral(ymass, 0.0, out.R_b, {out.Rb_minus}, 48, 4);
  out.const_c1 = out.y2_mass;
  auto c3f = [&out](double r) {
    cplx qt, l1, l2;
    out.eval(r, qt, l1, l2);
    return -std::imag(qt * std::conj(l1)) * 2 * M_PI * r;
  };
  out.const_c3 = segmented_integral(c3f, 0.0, out.R_b, {out.Rb_minus}, 48, 4);
  auto c4f = [&out](double r) {
    cplx qt, l1, l2;
    out.eval(r, qt, l1, l2);
    return -std::imag(qt * std::conj(l2)) * 2 * M_PI * r;
  };
  out.const_c4 = segmented_integral(c4f, 0.0, out.R_b, {out.Rb_minus}, 48, 4);
  // Weight norms for residual scaling: |y|^2 Qt, y Qt, i Lam Qt, i Lam^2 Qt.
  auto wnorm = [&out](int k) {
    auto f = [&out, k](double r) {
      cplx qt, l1, l2;
      out.eval(r, qt, l1, l2);
      double v = 0.0;
      if (k == 0) v = std::norm(qt) * r * r * r * r;
      else if (k == 1 || k == 2) v = std::norm(qt) * r * r / 2.0;
      else if (k == 3) v = std::norm(l1);
      else v = std::norm(l2);
      return v * 2 * M_PI * r;
    };
    return std::sqrt(segmented_integral(f, 0.0, out.R_b, {out.Rb_minus}, 48, 4));
  };
  for (int k = 0; k < 5; ++k) out.w_norms[k] = wnorm(k);
  return out;
}

const QbInterp::Assembled& QbInterp::at(double b) {
  auto it = cache_.find(b);
  if (it != cache_.end()) return it->second;
  if (cache_.size() > 256) cache_.clear();
  return cache_.emplace(b, assemble(b)).first->second;
}

namespace {

// One pass over the grid: the five orthogonality conditions plus the complex
// cross-pairing <lambda a e^{i gamma} (scaled), Qtilde> used for ||eps||^2.
struct ConditionPass {
  double C[5] = {0, 0, 0, 0, 0};
  cplx cross{0.0, 0.0};
};

ConditionPass evaluate_conditions(const ComplexField& field, double lambda,
                                  double b, double x0, double x1, double gamma,
                                  const QbInterp::Assembled& qb) {
  ConditionPass out;
  const Grid2D& g = field.grid();
  const double R_supp = qb.R_b * lambda;
  const cplx eig = std::polar(1.0, gamma);
  double acc[5] = {0, 0, 0, 0, 0};
  cplx cross{0.0, 0.0};
  for (int i = 0; i < g.n; ++i) {
    const double dx0 = g.x[i] - x0;
    if (std::abs(dx0) > R_supp) continue;
    for (int j = 0; j < g.n; ++j) {
      const double dx1 = g.x[j] - x1;
      const double rr = std::hypot(dx0, dx1);
      if (rr >= R_supp) continue;
      const double ry = rr / lambda;
      cplx qt, l1, l2;
      qb.eval(ry, qt, l1, l2);
      const cplx av = field.at(i, j) * eig;
      // Re[a e^{i gamma} conj(W_k(y))]
      const cplx aqt = av * std::conj(qt);
      acc[0] += ry * ry * aqt.real();
      acc[1] += (dx0 / lambda) * aqt.real();
      acc[2] += (dx1 / lambda) * aqt.real();
      acc[3] += std::real(av * std::conj(cplx(0.0, 1.0) * l1));
      acc[4] += std::real(av * std::conj(cplx(0.0, 1.0) * l2));
      cross += av * std::conj(qt);
    }
  }
  const double meas = g.cell_area() / lambda;  // (1/lambda) dx'
  out.C[0] = acc[0] * meas - qb.const_c1;
  out.C[1] = acc[1] * meas;
  out.C[2] = acc[2] * meas;
  out.C[3] = acc[3] * meas - qb.const_c3;
  out.C[4] = acc[4] * meas - qb.const_c4;
  out.cross = cross * meas;
  return out;
}

}  // namespace

ModulationState initial_guess(const ComplexField& field, QbInterp& interp,
                              double grad_norm_Q) {
  ModulationState st;
  st.lambda = grad_norm_Q / std::sqrt(grad_norm_sq(field));
  const Grid2D& g = field.grid();
  double m = 0.0, cx = 0.0, cy = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const double w = std::norm(field.at(i, j));
      m += w;
      cx += w * g.x[i];
      cy += w * g.x[j];
    }
  st.xc[0] = cx / m;
  st.xc[1] = cy / m;
  st.b = 0.05;
  const auto& qb = interp.at(st.b);
  cplx inner{0.0, 0.0};
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const double r = std::hypot(g.x[i] - st.xc[0], g.x[j] - st.xc[1]) / st.lambda;
      if (r >= qb.R_b) continue;
      inner += field.at(i, j) * std::conj(qb.qtilde(r) / st.lambda);
    }
  st.gamma = -std::arg(inner);
  return st;
}

ModulationState decompose(const ComplexField& field, const ModulationState& guess,
                          QbInterp& interp, const ModulationParams& par) {
  ModulationState st = guess;
  const double field_l2 = l2_norm(field);
  const double b_margin = 1e-4;

  auto clampp = [&](double* p) {
    p[0] = std::max(p[0], 1e-6);
    p[1] = std::clamp(p[1], interp.b_lo() + b_margin, interp.b_hi() - b_margin);
  };

  double p[5] = {st.lambda, st.b, st.xc[0], st.xc[1], st.gamma};
  clampp(p);

  auto conditions_at = [&](const double* q, double* C, cplx* cross = nullptr) {
    const auto& qb = interp.at(q[1]);
    ConditionPass cp = evaluate_conditions(field, q[0], q[1], q[2], q[3], q[4], qb);
    double scale_norm = 0.0;
    for (int k = 0; k < 5; ++k) {
      C[k] = cp.C[k];
      scale_norm += cp.C[k] * cp.C[k] / (qb.w_norms[k] * qb.w_norms[k]);
    }
    if (cross) *cross = cp.cross;
    return std::sqrt(scale_norm);
  };

  double C[5];
  double rn = conditions_at(p, C);
  bool converged = false;
  int it = 0;
  for (; it < par.max_iter; ++it) {
    const auto& qb = interp.at(p[1]);
    double tol = par.tol_rel * std::max(field_l2, 1.0);
    bool small = true;
    for (int k = 0; k < 5; ++k)
      if (std::abs(C[k]) > tol * qb.w_norms[k]) small = false;
    if (small) {
      converged = true;
      break;
    }
    // Finite-difference Jacobian.
    Eigen::MatrixXd J(5, 5);
    for (int col = 0; col < 5; ++col) {
      double q[5] = {p[0], p[1], p[2], p[3], p[4]};
      const double scale_ref =
          (col == 0) ? p[0] : (col == 1 ? std::max(p[1], 0.05) : 1.0);
      const double h = par.fd_rel * std::max(std::abs(p[col]), 0.1 * scale_ref);
      q[col] += h;
      if (col == 1)
        q[1] = std::min(q[1], interp.b_hi() - b_margin / 2);
      double Ch[5];
      conditions_at(q, Ch);
      for (int row = 0; row < 5; ++row) J(row, col) = (Ch[row] - C[row]) / (q[col] - p[col]);
    }
    Eigen::VectorXd rhs(5);
    for (int k = 0; k < 5; ++k) rhs[k] = -C[k];
    Eigen::VectorXd dp = J.fullPivLu().solve(rhs);
    if (!dp.allFinite()) break;
    double stepf = 1.0;
    bool moved = false;
    for (int half = 0; half <= par.max_halvings; ++half) {
      double q[5];
      for (int k = 0; k < 5; ++k) q[k] = p[k] + stepf * dp[k];
      clampp(q);
      double Ct[5];
      const double rt = conditions_at(q, Ct);
      if (rt < rn) {
        for (int k = 0; k < 5; ++k) {
          p[k] = q[k];
          C[k] = Ct[k];
        }
        rn = rt;
        moved = true;
        break;
      }
      stepf *= 0.5;
    }
    if (!moved) break;
  }

  st.lambda = p[0];
  st.b = p[1];
  st.xc[0] = p[2];
  st.xc[1] = p[3];
  st.gamma = std::remainder(p[4], 2.0 * M_PI);
  cplx cross;
  conditions_at(p, C, &cross);
  for (int k = 0; k < 5; ++k) st.residuals[k] = C[k];
  st.converged = converged;
  st.iterations = it;
  const auto& qb = interp.at(st.b);
  const double eps_sq = l2_norm_sq(field) + qb.qt_mass - 2.0 * cross.real();
  st.eps_l2 = std::sqrt(std::max(eps_sq, 0.0));
  if (!converged) {
    double best = 0.0;
    for (int k = 0; k < 5; ++k) best = std::max(best, std::abs(C[k]));
    throw std::runtime_error("decompose: Newton did not converge (best residual " +
                             std::to_string(best) + ")");
  }
  return st;
}

ComplexField eps_field(const ComplexField& field, const ModulationState& st,
                       QbInterp& interp) {
  const auto& qb = interp.at(st.b);
  const Grid2D& g = field.grid();
  ComplexField out(g, Space::Physical);
  const cplx eig = std::polar(st.lambda, st.gamma);
  for (int i = 0; i < g.n; ++i) {
    const double dx0 = g.x[i] - st.xc[0];
    for (int j = 0; j < g.n; ++j) {
      const double r = std::hypot(dx0, g.x[j] - st.xc[1]) / st.lambda;
      out.at(i, j) = eig * field.at(i, j) - qb.qtilde(r);
    }
  }
  return out;
}

double eps_exp_weighted_mass(const ComplexField& field, const ModulationState& st,
                             QbInterp& interp) {
  const auto& qb = interp.at(st.b);
  const Grid2D& g = field.grid();
  const cplx eig = std::polar(st.lambda, st.gamma);
  double acc = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const double dx0 = g.x[i] - st.xc[0];
    for (int j = 0; j < g.n; ++j) {
      const double r = std::hypot(dx0, g.x[j] - st.xc[1]) / st.lambda;
      const cplx e = eig * field.at(i, j) - qb.qtilde(r);
      acc += std::norm(e) * std::exp(-r);
    }
  }
  // dy = dx / lambda^2
  return acc * g.cell_area() / (st.lambda * st.lambda);
}

double eps_pairing(const ComplexField& field, const ModulationState& st,
                   QbInterp& interp, const std::function<cplx(double)>& W,
                   double support_radius) {
  const auto& qb = interp.at(st.b);
  const Grid2D& g = field.grid();
  const cplx eig = std::polar(st.lambda, st.gamma);
  double acc = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const double dx0 = g.x[i] - st.xc[0];
    for (int j = 0; j < g.n; ++j) {
      const double r = std::hypot(dx0, g.x[j] - st.xc[1]) / st.lambda;
      if (r >= support_radius) continue;
      const cplx e = eig * field.at(i, j) - qb.qtilde(r);
      acc += std::real(e * std::conj(W(r)));
    }
  }
  return acc * g.cell_area() / (st.lambda * st.lambda);
}

void ZetaF1Table::add(const ZetaSolution& zeta, double a) {
  ZetaF1Entry e;
  e.b = zeta.b;
  e.zt = make_zeta_tilde(zeta, a);
  auto f = [&e](double r) {
    const cplx z = e.zt.value(r);
    const cplx zp = e.zt.deriv(r);
    return std::imag(r * zp * std::conj(z)) * 2.0 * M_PI * r;
  };
  e.im_y_grad =
      0.5 * segmented_integral(f, 0.0, 2.0 * e.zt.A, {e.zt.A}, 48, 6);
  entries_.push_back(std::move(e));
}

const ZetaF1Entry* ZetaF1Table::nearest(double b) const {
  const ZetaF1Entry* best = nullptr;
  double dist = 1e300;
  for (const auto& e : entries_) {
    const double d = std::abs(e.b - b);
    if (d < dist) {
      dist = d;
      best = &e;
    }
  }
  return best;
}

double lyapunov_f1(const ComplexField& field, const ModulationState& st,
                   QbInterp& interp, const ZetaF1Table* zeta_table) {
  const auto& qb = interp.at(st.b);
  double f1 = st.b / 4.0 * qb.y2_mass;
  if (zeta_table && !zeta_table->empty() && st.b > 0.0) {
    const ZetaF1Entry* e = zeta_table->nearest(st.b);
    f1 += e->im_y_grad;
    // (eps2, Lambda Re zt) - (eps1, Lambda Im zt) = Re<eps, i Lambda zt>,
    // truncated to the grid frame.
    auto W = [e](double r) {
      const cplx z = e->zt.value(r);
      const cplx zp = e->zt.deriv(r);
      return cplx(0.0, 1.0) * (z + r * zp);
    };
    f1 += eps_pairing(field, st, interp, W, 2.0 * e->zt.A);
  }
  return f1;
}

ModulationSeries build_series(const std::vector<double>& times,
                              const std::vector<const ComplexField*>& fields,
                              QbInterp& interp, const SeriesOptions& opt,
                              const ZetaF1Table* zeta_table) {
  ModulationSeries out;
  if (times.size() != fields.size() || times.empty())
    throw std::invalid_argument("build_series: mismatched inputs");
  ModulationState prev;
  bool have_prev = false;
  double s_acc = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    ModulationState guess =
        have_prev ? prev
                  : initial_guess(*fields[i], interp,
                                  std::sqrt(interp.ground().grad_norm_sq));
    ModulationState st;
    try {
      st = decompose(*fields[i], guess, interp);
    } catch (const std::exception& e) {
      out.truncated = true;
      out.truncation_reason = e.what();
      break;
    }
    // Continuous lift of gamma.
    if (have_prev) {
      double gg = st.gamma;
      while (gg - prev.gamma > M_PI) gg -= 2.0 * M_PI;
      while (gg - prev.gamma < -M_PI) gg += 2.0 * M_PI;
      st.gamma = gg;
    }
    FrameRecord fr;
    fr.t = times[i];
    if (i > 0 && !out.frames.empty()) {
      const FrameRecord& pf = out.frames.back();
      const double dt = times[i] - pf.t;
      s_acc += dt * 0.5 *
               (1.0 / (pf.state.lambda * pf.state.lambda) +
                1.0 / (st.lambda * st.lambda));
    }
    fr.s = s_acc;
    fr.state = st;
    fr.exp_mass = eps_exp_weighted_mass(*fields[i], st, interp);
    {
      ComplexField eps = eps_field(*fields[i], st, interp);
      const double Nx = std::pow(st.lambda, -(1.0 + opt.imethod.delta));
      IMultiplierSpec ispec{std::min(Nx, fields[i]->grid().xi_max() / 2.0),
                            opt.imethod.s};
      ComplexField ieps = apply_I(eps, ispec);
      fr.grad_ieps = std::sqrt(grad_norm_sq(ieps));
    }
    if (opt.with_f1) fr.f1 = lyapunov_f1(*fields[i], st, interp, zeta_table);
    out.frames.push_back(fr);
    prev = st;
    have_prev = true;
  }
  // Derivatives in s by non-uniform centered differences.
  const std::size_t n = out.frames.size();
  for (std::size_t i = 0; i < n; ++i) {
    auto deriv = [&](auto getter) {
      if (n < 2) return 0.0;
      if (i == 0)
        return (getter(1) - getter(0)) / (out.frames[1].s - out.frames[0].s);
      if (i + 1 == n)
        return (getter(i) - getter(i - 1)) /
               (out.frames[i].s - out.frames[i - 1].s);
      const double s0 = out.frames[i - 1].s, s1 = out.frames[i].s,
                   s2 = out.frames[i + 1].s;
      const double f0 = getter(i - 1), f1v = getter(i), f2 = getter(i + 1);
      return f0 * (s1 - s2) / ((s0 - s1) * (s0 - s2)) +
             f1v * (2.0 * s1 - s0 - s2) / ((s1 - s0) * (s1 - s2)) +
             f2 * (s1 - s0) / ((s2 - s0) * (s2 - s1));
    };
    out.frames[i].b_s = deriv([&](std::size_t k) { return out.frames[k].state.b; });
    const double dl =
        deriv([&](std::size_t k) { return out.frames[k].state.lambda; });
    out.frames[i].lam_s_over_lam = dl / out.frames[i].state.lambda;
  }
  return out;
}

LogLogReport fit_loglog(const std::vector<double>& times,
                        const std::vector<double>& lambdas, double t_lo,
                        double t_hi) {
  std::vector<double> ts, ls;
  for (std::size_t i = 0; i < times.size(); ++i)
    if (times[i] >= t_lo && times[i] <= t_hi) {
      ts.push_back(times[i]);
      ls.push_back(lambdas[i]);
    }
  LogLogReport rep;
  if (ts.size() < 20) return rep;
  const double t_max = *std::max_element(ts.begin(), ts.end());

  auto fit_model = [&](auto phi, double T_hi_cap) {
    LogLogFit best;
    auto sse_at = [&](double T) {
      double num = 0.0, den = 0.0, l2 = 0.0;
      for (std::size_t i = 0; i < ts.size(); ++i) {
        const double ph = phi(T - ts[i]);
        num += ls[i] * ph;
        den += ph * ph;
        l2 += ls[i] * ls[i];
      }
      if (den <= 0.0) return std::pair<double, double>(1e300, 1.0);
      const double c = num / den;
      double sse = 0.0;
      for (std::size_t i = 0; i < ts.size(); ++i) {
        const double d = ls[i] - c * phi(T - ts[i]);
        sse += d * d;
      }
      return std::pair<double, double>(sse / l2, c);
    };
    // Golden-section over T.
    double a = t_max + 1e-9, bb = t_max + T_hi_cap;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c1 = bb - gr * (bb - a), c2 = a + gr * (bb - a);
    double f1v = sse_at(c1).first, f2v = sse_at(c2).first;
    for (int it = 0; it < 200; ++it) {
      if (f1v < f2v) {
        bb = c2;
        c2 = c1;
        f2v = f1v;
        c1 = bb - gr * (bb - a);
        f1v = sse_at(c1).first;
      } else {
        a = c1;
        c1 = c2;
        f1v = f2v;
        c2 = a + gr * (bb - a);
        f2v = sse_at(c2).first;
      }
      if (bb - a < 1e-12 * std::max(1.0, std::abs(t_max))) break;
    }
    const double T = 0.5 * (a + bb);
    auto [sse, c] = sse_at(T);
    best.T = T;
    best.c = c;
    best.residual = std::sqrt(sse);
    best.valid = true;
    return best;
  };

  auto phi_loglog = [](double dt) {
    if (!(dt > 0.0)) return 0.0;
    const double il = std::abs(std::log(dt));
    if (il <= 1.0) return 0.0;  // outside the ln|ln| domain
    return std::sqrt(dt / std::log(il));
  };
  auto phi_sqrt = [](double dt) { return dt > 0.0 ? std::sqrt(dt) : 0.0; };

  rep.loglog = fit_model(phi_loglog, 0.36);
  rep.sqrt_law = fit_model(phi_sqrt, 2.0);
  return rep;
}

VirialReport virial_check(const ModulationSeries& series,
                          const std::function<double(double)>& gamma_of_b,
                          double C, double eta) {
  VirialReport rep;
  std::size_t bad = 0;
  for (const auto& fr : series.frames) {
    VirialRow row;
    row.s = fr.s;
    row.b = fr.state.b;
    row.b_s = fr.b_s;
    row.gamma_power = std::pow(gamma_of_b(fr.state.b), 1.0 - C * eta);
    row.margin = fr.b_s + row.gamma_power;
    if (row.margin < 0.0) ++bad;
    rep.rows.push_back(row);
  }
  rep.violation_fraction =
      rep.rows.empty() ? 0.0 : static_cast<double>(bad) / rep.rows.size();
  return rep;
}

}  // namespace nls
