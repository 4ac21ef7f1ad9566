#include "nls/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nls {

namespace {

// Quintic smoothstep and derivatives on [0, 1].
double sstep(double u) { return u * u * u * (10.0 + u * (-15.0 + 6.0 * u)); }
double sstep_d1(double u) { return 30.0 * u * u * (1.0 - u) * (1.0 - u); }
double sstep_d2(double u) { return 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u); }

// Down-ramp from 1 to 0 across [lo, hi].
double ramp(double r, double lo, double hi) {
  if (r <= lo) return 1.0;
  if (r >= hi) return 0.0;
  return 1.0 - sstep((r - lo) / (hi - lo));
}
double ramp_d1(double r, double lo, double hi) {
  if (r <= lo || r >= hi) return 0.0;
  const double w = hi - lo;
  return -sstep_d1((r - lo) / w) / w;
}
double ramp_d2(double r, double lo, double hi) {
  if (r <= lo || r >= hi) return 0.0;
  const double w = hi - lo;
  return -sstep_d2((r - lo) / w) / (w * w);
}

cplx bary_eval_c(const ChebGrid& g, const std::vector<cplx>& f, double rq) {
  const int m = g.size();
  cplx num{0.0, 0.0};
  double den = 0.0;
  for (int j = 0; j < m; ++j) {
    const double d = rq - g.r[j];
    if (std::abs(d) < 1e-14) return f[j];
    double wj = (j % 2 == 0) ? 1.0 : -1.0;
    if (j == 0 || j == m - 1) wj *= 0.5;
    const double t = wj / d;
    num += t * f[j];
    den += t;
  }
  return num / den;
}

}  // namespace

// ---------------------------------------------------------------------------
// RadialProfile plumbing
// ---------------------------------------------------------------------------

void RadialProfile::finalize() {
  std::vector<double> re(values.size()), im(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    re[i] = values[i].real();
    im[i] = values[i].imag();
  }
  re_interp = CubicSpline(nodes, re);
  im_interp = CubicSpline(nodes, im);
}

cplx RadialProfile::eval(double r) const {
  if (r >= r_max) return {0.0, 0.0};
  return {re_interp(r), im_interp(r)};
}

std::string profile_content_hash(const RadialProfile& p) {
  // FNV-1a over the node/value bytes; stable across runs.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t nbytes) {
    const auto* b = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < nbytes; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  mix(p.nodes.data(), p.nodes.size() * sizeof(double));
  mix(p.values.data(), p.values.size() * sizeof(cplx));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_profile(const std::string& path, const RadialProfile& p) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_profile: cannot open " + path);
  os.precision(17);
  os << "# nlslab radial profile v1\n";
  os << "kind " << static_cast<int>(p.kind) << "\n";
  os << "b " << p.b << "\neta " << p.eta << "\na " << p.a << "\n";
  os << "r_max " << p.r_max << "\nnodes " << p.nodes.size() << "\n";
  os << "hash " << profile_content_hash(p) << "\n";
  for (std::size_t i = 0; i < p.nodes.size(); ++i)
    os << p.nodes[i] << " " << p.values[i].real() << " " << p.values[i].imag()
       << "\n";
}

RadialProfile read_profile(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_profile: cannot open " + path);
  std::string line, key;
  std::getline(is, line);
  RadialProfile p;
  std::size_t n = 0;
  std::string stored_hash;
  while (is >> key) {
    if (key == "kind") {
      int k;
      is >> k;
      p.kind = static_cast<ProfileKind>(k);
    } else if (key == "b")
      is >> p.b;
    else if (key == "eta")
      is >> p.eta;
    else if (key == "a")
      is >> p.a;
    else if (key == "r_max")
      is >> p.r_max;
    else if (key == "nodes")
      is >> n;
    else if (key == "hash") {
      is >> stored_hash;
      break;
    } else
      throw std::runtime_error("read_profile: unknown key " + key);
  }
  p.nodes.resize(n);
  p.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double r, re, im;
    if (!(is >> r >> re >> im))
      throw std::runtime_error("read_profile: truncated data in " + path);
    p.nodes[i] = r;
    p.values[i] = {re, im};
  }
  if (profile_content_hash(p) != stored_hash)
    throw std::runtime_error("read_profile: content hash mismatch in " + path);
  p.finalize();
  return p;
}

// ---------------------------------------------------------------------------
// Ground state
// ---------------------------------------------------------------------------

namespace {

// Coarse RK4 shooting used only to seed Newton. Returns a sampled table of
// the bisection-converged profile; beyond the trusted radius the profile is
// continued by exponential decay.
struct ShootTable {
  std::vector<double> r, q;
  double valid_to = 0.0;
  double eval(double rq) const {
    if (rq >= valid_to) {
      const double qv = q.back();
      return qv * std::exp(-(rq - valid_to));
    }
    const double h = r[1] - r[0];
    const std::size_t i =
        std::min(static_cast<std::size_t>(rq / h), r.size() - 2);
    const double u = (rq - r[i]) / h;
    return q[i] * (1.0 - u) + q[i + 1] * u;
  }
};

ShootTable shoot_ground_state(double r_end) {
  const double h = 2e-3;
  auto integrate = [&](double A, std::vector<double>* out) {
    // Series start at r0 = h: Q = A + (A - A^3) r^2 / 4.
    double r = h;
    double Q = A + (A - A * A * A) * r * r / 4.0;
    double V = (A - A * A * A) * r / 2.0;
    if (out) {
      out->push_back(A);
      out->push_back(Q);
    }
    auto f = [](double r, double Q, double V, double& dQ, double& dV) {
      dQ = V;
      dV = -V / r + Q - Q * Q * Q;
    };
    int status = 0;  // 0 live, +1 diverged up, -1 crossed zero
    double stop_r = r_end;
    while (r < r_end) {
      double k1q, k1v, k2q, k2v, k3q, k3v, k4q, k4v;
      f(r, Q, V, k1q, k1v);
      f(r + h / 2, Q + h / 2 * k1q, V + h / 2 * k1v, k2q, k2v);
      f(r + h / 2, Q + h / 2 * k2q, V + h / 2 * k2v, k3q, k3v);
      f(r + h, Q + h * k3q, V + h * k3v, k4q, k4v);
      Q += h / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q);
      V += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
      r += h;
      if (out) out->push_back(Q);
      if (Q < 0.0) {
        status = -1;
        stop_r = r;
        break;
      }
      if (Q > 0.0 && V > 0.0) {
        status = +1;
        stop_r = r;
        break;
      }
    }
    return std::pair<int, double>(status, stop_r);
  };

  double lo = 2.0, hi = 2.4;  // lo turns back up, hi crosses zero
  for (int it = 0; it < 70; ++it) {
    const double mid = 0.5 * (lo + hi);
    const int status = integrate(mid, nullptr).first;
    if (status >= 0)
      lo = mid;
    else
      hi = mid;
  }
  const double A = 0.5 * (lo + hi);
  ShootTable t;
  auto res = integrate(A, &t.q);
  t.r.resize(t.q.size());
  for (std::size_t i = 0; i < t.q.size(); ++i) t.r[i] = i * h;
  // Trust the table until shortly before the trajectory leaves the profile.
  double vt = res.second - 1.0;
  vt = std::max(2.0, std::min(vt, r_end));
  const std::size_t keep = static_cast<std::size_t>(vt / h);
  t.r.resize(keep);
  t.q.resize(keep);
  t.valid_to = t.r.back();
  return t;
}

}  // namespace

GroundState solve_ground_state_full(const GroundStateParams& p) {
  if (!(p.tol > 0.0)) throw std::invalid_argument("ground state: tol > 0 required");
  GroundState gs;
  gs.grid = ChebGrid::make(p.N, p.R);
  const ChebGrid& g = gs.grid;
  const int m = g.size();

  ShootTable seed = shoot_ground_state(std::min(p.R, 14.0));
  Eigen::VectorXd Q(m);
  for (int i = 0; i < m; ++i) Q[i] = seed.eval(g.r[i]);

  // High-precision residual: the reported quantity and the Newton target.
  auto residual_hp = [&](const Eigen::VectorXd& q) {
    std::vector<double> f(q.data(), q.data() + m), d1, d2;
    g.derivs_highprec(f, d1, d2);
    Eigen::VectorXd F(m);
    for (int i = 1; i < m - 1; ++i)
      F[i] = d2[i] + d1[i] / g.r[i] - q[i] + q[i] * q[i] * q[i];
    F[0] = d1[0];  // Q'(0) = 0
    // Robin decay condition matching Q ~ r^{-1/2} e^{-r}.
    F[m - 1] = d1[m - 1] + (1.0 + 0.5 / g.r[m - 1]) * q[m - 1];
    return F;
  };

  double fn = residual_hp(Q).lpNorm<Eigen::Infinity>();
  for (int it = 0; it < p.max_newton && fn > p.tol * 0.3; ++it) {
    Eigen::MatrixXd J = g.D2;
    for (int i = 0; i < m; ++i) {
      if (i == 0 || i == m - 1) continue;
      J.row(i) += g.D.row(i) / g.r[i];
      J(i, i) += -1.0 + 3.0 * Q[i] * Q[i];
    }
    J.row(0) = g.D.row(0);
    J.row(m - 1) = g.D.row(m - 1);
    J(m - 1, m - 1) += 1.0 + 0.5 / g.r[m - 1];
    Eigen::VectorXd F = residual_hp(Q);
    Eigen::VectorXd dq = J.partialPivLu().solve(F);
    double step = 1.0;
    for (int half = 0; half < 8; ++half) {
      Eigen::VectorXd trial = Q - step * dq;
      const double ft = residual_hp(trial).lpNorm<Eigen::Infinity>();
      if (ft < fn || fn < 1e-13) {
        Q = trial;
        fn = ft;
        break;
      }
      step *= 0.5;
      if (half == 7) {
        Q = trial;
        fn = ft;
      }
    }
  }
  if (!(fn < p.tol)) {
    char msg[128];
    std::snprintf(msg, sizeof msg,
                  "ground state: Newton residual %.3e did not reach %.1e", fn,
                  p.tol);
    throw std::runtime_error(msg);
  }

  gs.Q.assign(Q.data(), Q.data() + m);
  Eigen::VectorXd Qr = g.D * Q;
  gs.Qr.assign(Qr.data(), Qr.data() + m);
  gs.Q0 = gs.Q[0];

  for (int i = 0; i < m; ++i) {
    if (gs.Q[i] <= 0.0 && g.r[i] < p.R * 0.999)
      throw std::runtime_error("ground state: positivity lost at r=" +
                               std::to_string(g.r[i]));
  }

  std::vector<double> f(m);
  auto radint = [&](auto fn_val) {
    for (int i = 0; i < m; ++i) f[i] = fn_val(i) * 2.0 * M_PI * g.r[i];
    return g.integrate(f);
  };
  gs.mass = radint([&](int i) { return gs.Q[i] * gs.Q[i]; });
  gs.grad_norm_sq = radint([&](int i) { return gs.Qr[i] * gs.Qr[i]; });
  gs.y_mass = radint([&](int i) { return g.r[i] * g.r[i] * gs.Q[i] * gs.Q[i]; });
  const double quartic = radint([&](int i) { return std::pow(gs.Q[i], 4); });
  gs.energy = 0.5 * gs.grad_norm_sq - 0.25 * quartic;

  {
    std::vector<double> fq(Q.data(), Q.data() + m), d1, d2;
    g.derivs_highprec(fq, d1, d2);
    double res_inf = std::abs(2.0 * d2[0] - Q[0] + std::pow(Q[0], 3));
    for (int i = 1; i < m - 1; ++i)
      res_inf = std::max(res_inf,
                         std::abs(d2[i] + d1[i] / g.r[i] - Q[i] + std::pow(Q[i], 3)));
    gs.residual_inf = res_inf;
  }
  return gs;
}

double GroundState::eval(double r) const {
  if (r >= grid.R) return Q.back() * std::exp(-(r - grid.R));
  return grid.eval(Q, r);
}

double GroundState::eval_deriv(double r) const {
  if (r >= grid.R) return -Q.back() * std::exp(-(r - grid.R));
  return grid.eval(Qr, r);
}

RadialProfile solve_ground_state(double tol) {
  GroundStateParams p;
  p.tol = tol;
  GroundState gs = solve_ground_state_full(p);
  RadialProfile rp;
  rp.kind = ProfileKind::Q;
  rp.r_max = gs.grid.R;
  rp.nodes = gs.grid.r;
  rp.values.resize(gs.Q.size());
  for (std::size_t i = 0; i < gs.Q.size(); ++i) rp.values[i] = {gs.Q[i], 0.0};
  rp.finalize();
  return rp;
}

// ---------------------------------------------------------------------------
// Q_b family
// ---------------------------------------------------------------------------

double QbSolution::cutoff(double r) const { return ramp(r, Rb_minus, R_b); }
double QbSolution::cutoff_d1(double r) const { return ramp_d1(r, Rb_minus, R_b); }
double QbSolution::cutoff_d2(double r) const { return ramp_d2(r, Rb_minus, R_b); }

double QbSolution::P_at(double r) const {
  if (r >= R_b) return 0.0;
  return grid.eval(P, r);
}
double QbSolution::Pr_at(double r) const {
  if (r >= R_b) return 0.0;
  return grid.eval(Pr, r);
}
double QbSolution::Prr_at(double r) const {
  if (r >= R_b) return 0.0;
  return grid.eval(Prr, r);
}

cplx QbSolution::Qb(double r) const {
  return P_at(r) * std::polar(1.0, -b * r * r / 4.0);
}

cplx QbSolution::Qb_prime(double r) const {
  const cplx ph = std::polar(1.0, -b * r * r / 4.0);
  return (P_at(r) * cplx(0.0, -b * r / 2.0) + Pr_at(r)) * ph;
}

cplx QbSolution::Qb_tilde(double r) const { return cutoff(r) * Qb(r); }

cplx QbSolution::Qb_tilde_prime(double r) const {
  return cutoff_d1(r) * Qb(r) + cutoff(r) * Qb_prime(r);
}

cplx QbSolution::Psi_b(double r) const {
  // Psi_b = -[2 phi' Qb' + (phi'' + phi'/r) Qb + i b r phi' Qb
  //          + (phi^3 - phi) |Qb|^2 Qb]; exact where Q_b solves its ODE, so
  // the support is exactly the cutoff transition.
  const double ph1 = cutoff_d1(r);
  if (ph1 == 0.0) return {0.0, 0.0};
  const double ph = cutoff(r), ph2 = cutoff_d2(r);
  const cplx q = Qb(r), qp = Qb_prime(r);
  const double P3 = ph * ph * ph - ph;
  cplx lhs = 2.0 * ph1 * qp + (ph2 + ph1 / r) * q + cplx(0.0, b * r) * ph1 * q +
             P3 * std::norm(q) * q;
  return -lhs;
}

QbFamily::QbFamily(const GroundState& ground, QbParams params)
    : ground_(ground), params_(params) {
  if (!(params_.eta > 0.0 && params_.eta <= 0.1))
    throw std::invalid_argument("QbFamily: 0 < eta <= 0.1 required");
}

std::vector<double> QbFamily::solved_bs() const {
  std::vector<double> out;
  for (const auto& [b, s] : cache_) out.push_back(b);
  return out;
}

QbSolution QbFamily::solve_at(double b, const QbSolution* init) {
  QbSolution sol;
  sol.b = b;
  sol.eta = params_.eta;
  sol.R_b = 2.0 * std::sqrt(1.0 - params_.eta) / b;
  sol.Rb_minus = std::sqrt(1.0 - params_.eta) * sol.R_b;
  int N = params_.N;
  if (N == 0) N = std::max(192, std::min(768, static_cast<int>(2.5 * sol.R_b)));
  sol.grid = ChebGrid::make(N, sol.R_b);
  const ChebGrid& g = sol.grid;
  const int m = g.size();

  Eigen::VectorXd P(m);
  for (int i = 0; i < m; ++i)
    P[i] = init ? init->P_at(g.r[i]) : ground_.eval(g.r[i]);
  P[m - 1] = 0.0;

  auto residual = [&](const Eigen::VectorXd& q) {
    std::vector<double> f(q.data(), q.data() + m), d1, d2;
    g.derivs_highprec(f, d1, d2);
    Eigen::VectorXd F(m);
    for (int i = 1; i < m - 1; ++i) {
      const double r = g.r[i];
      F[i] = d2[i] + d1[i] / r + (-1.0 + b * b * r * r / 4.0) * q[i] +
             q[i] * q[i] * q[i];
    }
    F[0] = d1[0];
    F[m - 1] = q[m - 1];
    return F;
  };

  double fn = residual(P).lpNorm<Eigen::Infinity>();
  bool converged = fn < params_.newton_tol;
  int stalls = 0;
  for (int it = 0; it < params_.max_newton && !converged; ++it) {
    Eigen::MatrixXd J = g.D2;
    for (int i = 1; i < m - 1; ++i) {
      const double r = g.r[i];
      J.row(i) += g.D.row(i) / r;
      J(i, i) += -1.0 + b * b * r * r / 4.0 + 3.0 * P[i] * P[i];
    }
    J.row(0) = g.D.row(0);
    J.row(m - 1).setZero();
    J(m - 1, m - 1) = 1.0;
    Eigen::VectorXd F = residual(P);
    Eigen::VectorXd dp = J.partialPivLu().solve(F);
    if (!dp.allFinite()) break;
    const double prev = fn;
    double step = 1.0;
    bool moved = false;
    for (int half = 0; half < 8; ++half) {
      Eigen::VectorXd trial = P - step * dp;
      const double ft = residual(trial).lpNorm<Eigen::Infinity>();
      if (ft < fn) {
        P = trial;
        fn = ft;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    // Quadratic convergence bottoms out on the differentiation-matrix
    // roundoff floor; accept once improvement stops below a loose cap.
    if (!moved) {
      converged = fn < 1e-7;
      break;
    }
    converged = fn < params_.newton_tol;
    if (!converged && fn > 0.25 * prev) {
      if (++stalls >= 2 && fn < 1e-7) converged = true;
    } else {
      stalls = 0;
    }
  }
  if (!converged) {
    char msg[128];
    std::snprintf(msg, sizeof msg, "Qb Newton stalled at b=%.4f residual=%.3e", b,
                  fn);
    throw std::runtime_error(msg);
  }

  for (int i = 0; i < m - 1; ++i) {
    if (P[i] < -1e-10)
      throw std::runtime_error("Qb positivity violated at b=" + std::to_string(b) +
                               ", first sign change near r=" +
                               std::to_string(g.r[i]));
  }

  sol.P.assign(P.data(), P.data() + m);
  Eigen::VectorXd Pr = g.D * P, Prr = g.D2 * P;
  sol.Pr.assign(Pr.data(), Pr.data() + m);
  sol.Prr.assign(Prr.data(), Prr.data() + m);
  return sol;
}

const QbSolution& QbFamily::at(double b) {
  if (!(b > 0.0 && b <= 0.3))
    throw std::invalid_argument("QbFamily::at: 0 < b <= 0.3 required");
  auto it = cache_.find(b);
  if (it != cache_.end()) return it->second;

  // Closest solved value below b, if any.
  const QbSolution* current = nullptr;
  double bs = 0.0;
  for (auto& [bk, sol] : cache_) {
    if (bk < b) {
      current = &sol;
      bs = bk;
    }
  }

  double step = params_.db;
  while (bs < b) {
    const double bn = (b - bs <= step * (1.0 + 1e-9)) ? b : bs + step;
    try {
      QbSolution sol = solve_at(bn, current);
      auto [pos, ok] = cache_.emplace(bn, std::move(sol));
      current = &pos->second;
      bs = bn;
    } catch (const std::runtime_error&) {
      step *= 0.5;
      if (step < params_.db_floor)
        throw std::runtime_error(
            "Qb continuation stalled; last good b=" + std::to_string(bs));
    }
  }
  return cache_.at(b);
}

RadialProfile to_profile(const QbSolution& qb) {
  RadialProfile rp;
  rp.kind = ProfileKind::Qb;
  rp.b = qb.b;
  rp.eta = qb.eta;
  rp.r_max = qb.R_b;
  rp.nodes = qb.grid.r;
  rp.values.resize(rp.nodes.size());
  for (std::size_t i = 0; i < rp.nodes.size(); ++i)
    rp.values[i] = qb.P[i] * std::polar(1.0, -qb.b * rp.nodes[i] * rp.nodes[i] / 4.0);
  rp.finalize();
  return rp;
}

std::pair<RadialProfile, RadialProfile> make_Qb_tilde(const QbSolution& qb) {
  RadialProfile qt, psi;
  qt.kind = ProfileKind::QbTilde;
  psi.kind = ProfileKind::PsiB;
  qt.b = psi.b = qb.b;
  qt.eta = psi.eta = qb.eta;
  qt.r_max = psi.r_max = qb.R_b;
  qt.nodes = psi.nodes = qb.grid.r;
  qt.values.resize(qt.nodes.size());
  psi.values.resize(qt.nodes.size());
  for (std::size_t i = 0; i < qt.nodes.size(); ++i) {
    qt.values[i] = qb.Qb_tilde(qt.nodes[i]);
    psi.values[i] = qb.Psi_b(qt.nodes[i]);
  }
  qt.finalize();
  psi.finalize();
  return {std::move(qt), std::move(psi)};
}

// ---------------------------------------------------------------------------
// zeta_b
// ---------------------------------------------------------------------------

cplx ZetaSolution::zeta(double r) const {
  for (const auto& g : patches) {
    const std::size_t k = &g - patches.data();
    if (r <= g.R || k + 1 == patches.size())
      return bary_eval_c(g, Zp[k], std::min(r, g.R));
  }
  return {0.0, 0.0};
}

cplx ZetaSolution::zeta_prime(double r) const {
  for (const auto& g : patches) {
    const std::size_t k = &g - patches.data();
    if (r <= g.R || k + 1 == patches.size())
      return bary_eval_c(g, Zrp[k], std::min(r, g.R));
  }
  return {0.0, 0.0};
}

ZetaSolution solve_zeta_b(const QbSolution& qb, ZetaParams p) {
  const double b = qb.b;
  double R = p.R_solve;
  if (R <= 0.0) R = 20.0 / b;
  if (R < 10.0 / b) throw std::invalid_argument("solve_zeta_b: R_solve >= 10/b");

  ZetaSolution zs;
  zs.b = b;
  zs.R_solve = R;
  int N1 = p.N1;
  if (N1 == 0)
    N1 = std::max(96, std::min(256, static_cast<int>(8.0 * qb.Rb_minus)));
  zs.patches.push_back(ChebGrid::make_ab(N1, 0.0, qb.Rb_minus));
  zs.patches.push_back(ChebGrid::make_ab(p.N2, qb.Rb_minus, qb.R_b));
  zs.patches.push_back(ChebGrid::make_ab(p.N3, qb.R_b, R));

  std::vector<int> offset;
  int M = 0;
  for (const auto& g : zs.patches) {
    offset.push_back(M);
    M += g.size();
  }

  Eigen::MatrixXcd A(M, M);
  A.setZero();
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(M);

  for (std::size_t k = 0; k < zs.patches.size(); ++k) {
    const ChebGrid& g = zs.patches[k];
    const int o = offset[k], m = g.size();
    for (int i = 1; i < m - 1; ++i) {
      const double r = g.r[i];
      for (int j = 0; j < m; ++j)
        A(o + i, o + j) = g.D2(i, j) + cplx(1.0 / r, b * r) * g.D(i, j);
      A(o + i, o + i) += cplx(-1.0, b);
      rhs[o + i] = qb.Psi_b(r);
    }
  }
  // Regularity at the origin.
  for (int j = 0; j < zs.patches[0].size(); ++j) A(0, j) = zs.patches[0].D(0, j);
  rhs[0] = 0.0;
  // C^1 interface matching between consecutive patches.
  for (std::size_t k = 0; k + 1 < zs.patches.size(); ++k) {
    const ChebGrid& gl = zs.patches[k];
    const ChebGrid& gr = zs.patches[k + 1];
    const int ol = offset[k], orr = offset[k + 1];
    const int last = gl.size() - 1;
    A.row(ol + last).setZero();
    A(ol + last, ol + last) = 1.0;
    A(ol + last, orr) = -1.0;
    rhs[ol + last] = 0.0;
    A.row(orr).setZero();
    for (int j = 0; j < gl.size(); ++j) A(orr, ol + j) = gl.D(last, j);
    for (int j = 0; j < gr.size(); ++j) A(orr, orr + j) -= gr.D(0, j);
    rhs[orr] = 0.0;
  }
  // Outgoing WKB radiation condition at R (amplitude + phase first order).
  {
    const ChebGrid& g3 = zs.patches.back();
    const int o = offset.back(), last = g3.size() - 1;
    const double q0sq = b * b * R * R / 4.0 - 1.0;
    const double q0 = std::sqrt(q0sq);
    const double q0p = b * b * R / (4.0 * q0);
    const cplx mu = cplx(-0.5 / R - q0p / (2.0 * q0), q0 - b * R / 2.0);
    A.row(o + last).setZero();
    for (int j = 0; j < g3.size(); ++j) A(o + last, o + j) = g3.D(last, j);
    A(o + last, o + last) -= mu;
    rhs[o + last] = 0.0;
  }

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  Eigen::VectorXcd Z = lu.solve(rhs);
  const double rres = (A * Z - rhs).norm() / rhs.norm();
  zs.residual = rres;
  if (!(rres < 1e-7) || !Z.allFinite()) {
    std::ostringstream msg;
    msg << "solve_zeta_b: ill-conditioned solve at b=" << b
        << " (relative residual " << rres
        << ", condition estimate ~" << rres / 2.2e-16 << ")";
    throw std::runtime_error(msg.str());
  }
  for (std::size_t k = 0; k < zs.patches.size(); ++k) {
    const ChebGrid& g = zs.patches[k];
    const int o = offset[k], m = g.size();
    Eigen::VectorXcd zk = Z.segment(o, m);
    Eigen::VectorXcd zrk = g.D * zk;
    zs.Zp.emplace_back(zk.data(), zk.data() + m);
    zs.Zrp.emplace_back(zrk.data(), zrk.data() + m);
  }

  // Self-contained Psi_b table for downstream truncation residuals.
  zs.psi_lo = qb.Rb_minus;
  zs.psi_hi = qb.R_b;
  const int nt = 4096;
  std::vector<double> pre(nt), pim(nt);
  const double dr = (zs.psi_hi - zs.psi_lo) / (nt - 1);
  for (int i = 0; i < nt; ++i) {
    const cplx v = qb.Psi_b(zs.psi_lo + i * dr);
    pre[i] = v.real();
    pim[i] = v.imag();
  }
  zs.psi_re = UniformSpline(zs.psi_lo, dr, std::move(pre));
  zs.psi_im = UniformSpline(zs.psi_lo, dr, std::move(pim));
  return zs;
}

cplx ZetaSolution::Psi_b(double r) const {
  if (r <= psi_lo || r >= psi_hi) return {0.0, 0.0};
  return {psi_re(r), psi_im(r)};
}

double compute_Gamma_b(const ZetaSolution& zeta, const GammaParams& gp) {
  const double lo = gp.window_lo * zeta.R_solve, hi = gp.window_hi * zeta.R_solve;
  std::vector<double> vals;
  const ChebGrid& g3 = zeta.patches.back();
  const auto& Z3 = zeta.Zp.back();
  for (std::size_t i = 0; i < g3.r.size(); ++i) {
    const double r = g3.r[i];
    if (r >= lo && r <= hi) vals.push_back(r * r * std::norm(Z3[i]));
  }
  if (vals.size() < 8) throw std::runtime_error("compute_Gamma_b: empty window");
  std::sort(vals.begin(), vals.end());
  const double med = vals[vals.size() / 2];
  const double var = (vals.back() - vals.front()) / med;
  if (!(var < gp.plateau_tol)) {
    std::ostringstream msg;
    msg << "compute_Gamma_b: no plateau at b=" << zeta.b << " (variation " << var
        << ")";
    throw std::runtime_error(msg.str());
  }
  if (gp.check_bracket) {
    const double lg = std::log(med);
    const double lo_b = -(1.0 + gp.C * gp.eta) * M_PI / zeta.b;
    const double hi_b = -(1.0 - gp.C * gp.eta) * M_PI / zeta.b;
    if (!(lg >= lo_b && lg <= hi_b)) {
      std::ostringstream msg;
      msg << "compute_Gamma_b: bracket violated at b=" << zeta.b
          << ": log Gamma=" << lg << " not in [" << lo_b << ", " << hi_b << "]";
      throw std::runtime_error(msg.str());
    }
  }
  return med;
}

// ---------------------------------------------------------------------------
// zeta_tilde
// ---------------------------------------------------------------------------

double ZetaTilde::cutoff(double r) const { return ramp(r, A, 2.0 * A); }
double ZetaTilde::cutoff_d1(double r) const { return ramp_d1(r, A, 2.0 * A); }
double ZetaTilde::cutoff_d2(double r) const { return ramp_d2(r, A, 2.0 * A); }

cplx ZetaTilde::value(double r) const {
  const double ps = cutoff(r);
  return ps == 0.0 ? cplx{0.0, 0.0} : ps * zeta->zeta(r);
}

cplx ZetaTilde::deriv(double r) const {
  const double ps = cutoff(r);
  if (ps == 0.0) return {0.0, 0.0};
  return cutoff_d1(r) * zeta->zeta(r) + ps * zeta->zeta_prime(r);
}

cplx ZetaTilde::F_b(double r) const {
  // F_b = (psi - 1) Psi_b + 2 psi' zeta' + (psi'' + psi'/r) zeta
  //       + i b r psi' zeta
  const double ps = cutoff(r), p1 = cutoff_d1(r);
  cplx out = (ps - 1.0) * zeta->Psi_b(r);
  if (p1 != 0.0) {
    const cplx z = zeta->zeta(r), zp = zeta->zeta_prime(r);
    out += 2.0 * p1 * zp + (cutoff_d2(r) + p1 / r) * z + cplx(0.0, b * r) * p1 * z;
  }
  return out;
}

double ZetaTilde::mass() const {
  auto f = [this](double r) { return std::norm(value(r)) * 2.0 * M_PI * r; };
  return segmented_integral(f, 0.0, 2.0 * A, {A, zeta->psi_lo, zeta->psi_hi});
}

double ZetaTilde::grad_norm_sq() const {
  auto f = [this](double r) { return std::norm(deriv(r)) * 2.0 * M_PI * r; };
  return segmented_integral(f, 0.0, 2.0 * A, {A, zeta->psi_lo, zeta->psi_hi});
}

double ZetaTilde::flux() const {
  // -Re(zeta_tilde, Lambda F_b) = +Re(Lambda zeta_tilde, F_b) exactly, since
  // (f, Lambda g) + (Lambda f, g) = 0 for compactly supported fields in 2D.
  auto f = [this](double r) {
    const cplx lz = value(r) + r * deriv(r);
    const cplx fb = F_b(r);
    return (lz.real() * fb.real() + lz.imag() * fb.imag()) * 2.0 * M_PI * r;
  };
  const double lo = std::min(A, zeta->psi_lo);
  return segmented_integral(f, lo, 2.0 * A, {A, zeta->psi_lo, zeta->psi_hi});
}

ZetaTilde make_zeta_tilde(const ZetaSolution& zeta, double a) {
  if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("make_zeta_tilde: bad a");
  ZetaTilde zt;
  zt.b = zeta.b;
  zt.a = a;
  zt.A = std::exp(a * M_PI / zeta.b);
  zt.zeta = &zeta;
  if (2.0 * zt.A > zeta.R_solve)
    throw std::invalid_argument("make_zeta_tilde: A exceeds solved domain");
  return zt;
}

std::pair<RadialProfile, RadialProfile> zeta_tilde_profiles(const ZetaTilde& zt) {
  RadialProfile zp, fp;
  zp.kind = ProfileKind::ZetaTilde;
  fp.kind = ProfileKind::FB;
  zp.b = fp.b = zt.b;
  zp.a = fp.a = zt.a;
  zp.r_max = fp.r_max = 2.0 * zt.A;
  for (const auto& g : zt.zeta->patches) {
    for (double r : g.r) {
      if (r > 2.0 * zt.A + 1e-12) break;
      if (!zp.nodes.empty() && r <= zp.nodes.back()) continue;
      zp.nodes.push_back(r);
      zp.values.push_back(zt.value(r));
      fp.nodes.push_back(r);
      fp.values.push_back(zt.F_b(r));
    }
  }
  zp.finalize();
  fp.finalize();
  return {std::move(zp), std::move(fp)};
}

double zeta_domain_for(double b, double a) {
  return std::max(20.0 / b, 2.6 * std::exp(a * M_PI / b));
}

double theta_weight(double r) {
  if (r < 0.0) throw std::invalid_argument("theta_weight: r >= 0 required");
  if (r <= 2.0)
    return 0.5 * r * std::sqrt(1.0 - r * r / 4.0) + std::asin(r / 2.0);
  return M_PI / 4.0 * r;
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

double qb_tilde_mass(const QbSolution& qb) {
  auto f = [&qb](double r) {
    const double w = qb.cutoff(r) * qb.P_at(r);
    return w * w * 2.0 * M_PI * r;
  };
  return segmented_integral(f, 0.0, qb.R_b, {qb.Rb_minus});
}

double qb_tilde_y_mass(const QbSolution& qb) {
  auto f = [&qb](double r) {
    const double w = qb.cutoff(r) * qb.P_at(r);
    return r * r * w * w * 2.0 * M_PI * r;
  };
  return segmented_integral(f, 0.0, qb.R_b, {qb.Rb_minus});
}

double qb_tilde_energy(const QbSolution& qb) {
  // |grad Qtilde|^2 = (phi' P + phi P')^2 + (b r / 2)^2 (phi P)^2
  auto fk = [&qb](double r) {
    const double W = qb.cutoff(r) * qb.P_at(r);
    const double Wp = qb.cutoff_d1(r) * qb.P_at(r) + qb.cutoff(r) * qb.Pr_at(r);
    const double g2 = Wp * Wp + std::pow(qb.b * r / 2.0, 2) * W * W;
    return g2 * 2.0 * M_PI * r;
  };
  auto fp = [&qb](double r) {
    const double W = qb.cutoff(r) * qb.P_at(r);
    return W * W * W * W * 2.0 * M_PI * r;
  };
  const double kin = segmented_integral(fk, 0.0, qb.R_b, {qb.Rb_minus});
  const double quart = segmented_integral(fp, 0.0, qb.R_b, {qb.Rb_minus});
  return 0.5 * kin - 0.25 * quart;
}

ProfileDiagnostics profile_diagnostics(const QbSolution& qb, const ZetaSolution& zeta,
                                       const GroundState& ground, double a,
                                       const GammaParams& gp) {
  ProfileDiagnostics d;
  d.mass = qb_tilde_mass(qb);
  d.energy = qb_tilde_energy(qb);
  d.y_mass = qb_tilde_y_mass(qb);
  d.mass_excess = d.mass - ground.mass;
  d.gamma_b = compute_Gamma_b(zeta, gp);
  ZetaTilde zt = make_zeta_tilde(zeta, a);
  d.flux = zt.flux();
  d.zeta_tilde_mass = zt.mass();
  d.zeta_tilde_grad_sq = zt.grad_norm_sq();

  // Momentum by direct 2D sampling; vanishes by radial symmetry.
  const int n = 256;
  Grid2D grid = Grid2D::make(n, 1.15 * qb.R_b);
  ComplexField fld =
      sample_radial(grid, [&qb](double r) { return qb.Qb_tilde(r); }, 1.0, 0.0, 0.0,
                    0.0);
  ComplexField spec = transform(fld);
  double px = 0.0, py = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double m2 = std::norm(spec.at(i, j));
      px -= grid.xi[i] * m2;
      py -= grid.xi[j] * m2;
    }
  d.momentum[0] = px * grid.cell_area();
  d.momentum[1] = py * grid.cell_area();
  return d;
}

ComplexField sample_radial(const Grid2D& grid,
                           const std::function<cplx(double)>& f, double lambda,
                           double xc0, double xc1, double gamma) {
  ComplexField out(grid, Space::Physical);
  const cplx ph = std::polar(1.0 / lambda, -gamma);
  for (int i = 0; i < grid.n; ++i) {
    const double dx0 = grid.x[i] - xc0;
    for (int j = 0; j < grid.n; ++j) {
      const double dx1 = grid.x[j] - xc1;
      const double r = std::hypot(dx0, dx1) / lambda;
      out.at(i, j) = ph * f(r);
    }
  }
  return out;
}

}  // namespace nls
