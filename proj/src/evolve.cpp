#include "nls/evolve.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nls {

namespace {

void phase_rotate(ComplexField& u, double dt_half) {
  for (auto& v : u.values()) {
    const double a2 = std::norm(v);
    v *= std::polar(1.0, a2 * dt_half);
  }
}

// Linear flow combined with the 2/3-rule mask.
ComplexField linear_flow(const ComplexField& u, double dt, bool dealias) {
  ComplexField spec = transform(u);
  const Grid2D& g = spec.grid();
  const double cut = 2.0 / 3.0 * g.xi_max();
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      if (dealias && (std::abs(g.xi[i]) > cut || std::abs(g.xi[j]) > cut)) {
        spec.at(i, j) = 0.0;
        continue;
      }
      const double k2 = g.xi[i] * g.xi[i] + g.xi[j] * g.xi[j];
      spec.at(i, j) *= std::polar(1.0, -k2 * dt);
    }
  }
  return transform(spec);
}

bool all_finite(const ComplexField& u) {
  for (const auto& v : u.values())
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

}  // namespace

std::string to_string(StopEvent e) {
  switch (e) {
    case StopEvent::Completed:
      return "completed";
    case StopEvent::BlowupStop:
      return "blowup-stop";
    case StopEvent::BoundaryAbort:
      return "boundary-abort";
    case StopEvent::MaxSteps:
      return "max-steps";
    case StopEvent::NonFinite:
      return "non-finite";
  }
  return "unknown";
}

ComplexField step(const ComplexField& u, double dt, bool dealias) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt > 0 required");
  if (u.space() != Space::Physical)
    throw std::invalid_argument("step: physical-space field required");
  ComplexField w = u;
  phase_rotate(w, dt / 2.0);
  w = linear_flow(w, dt, dealias);
  phase_rotate(w, dt / 2.0);
  if (!all_finite(w)) throw std::runtime_error("step: non-finite values produced");
  return w;
}

Conserved conserved(const ComplexField& u) {
  Conserved c;
  const ComplexField phys = to_space(u, Space::Physical);
  const ComplexField spec = transform(phys);
  const Grid2D& g = spec.grid();
  double quartic = 0.0;
  for (const auto& v : phys.values()) quartic += std::norm(v) * std::norm(v);
  quartic *= g.cell_area();
  double mass = 0.0, px = 0.0, py = 0.0, kinetic = 0.0;
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      const double m2 = std::norm(spec.at(i, j));
      const double k2 = g.xi[i] * g.xi[i] + g.xi[j] * g.xi[j];
      mass += m2;
      kinetic += k2 * m2;
      px -= g.xi[i] * m2;
      py -= g.xi[j] * m2;
    }
  }
  c.mass = mass * g.cell_area();
  c.momentum[0] = px * g.cell_area();
  c.momentum[1] = py * g.cell_area();
  c.energy = 0.5 * kinetic * g.cell_area() - 0.25 * quartic;
  return c;
}

void energy_split(const ComplexField& u, double& kinetic, double& quartic) {
  const ComplexField phys = to_space(u, Space::Physical);
  quartic = 0.0;
  for (const auto& v : phys.values()) quartic += std::norm(v) * std::norm(v);
  quartic *= phys.grid().cell_area();
  kinetic = grad_norm_sq(phys);
}

double lambda_estimate(const ComplexField& u, double grad_norm_Q) {
  const double gn = std::sqrt(grad_norm_sq(u));
  if (gn == 0.0) return std::numeric_limits<double>::infinity();
  return grad_norm_Q / gn;
}

Trajectory evolve_adaptive(const ComplexField& u0, const SolverConfig& config) {
  if (!all_finite(u0)) throw std::invalid_argument("evolve: non-finite input");
  Trajectory traj;
  ComplexField u = to_space(u0, Space::Physical);
  const double dx = u.grid().dx;
  double t = 0.0;
  long accepted = 0;

  auto record = [&](double lam) {
    TrajectorySample s;
    s.t = t;
    s.c = conserved(u);
    s.lambda_est = lam;
    traj.series.push_back(s);
  };
  auto snapshot = [&]() {
    traj.snap_times.push_back(t);
    traj.snapshots.push_back(u);
  };

  double lam = lambda_estimate(u, config.grad_norm_Q);
  record(lam);
  snapshot();

  while (true) {
    if (t >= config.t_end) {
      traj.event = StopEvent::Completed;
      break;
    }
    if (accepted >= config.max_steps) {
      traj.event = StopEvent::MaxSteps;
      break;
    }
    lam = lambda_estimate(u, config.grad_norm_Q);
    if (lam < config.lambda_floor_factor * dx) {
      traj.event = StopEvent::BlowupStop;
      traj.event_detail = "lambda_est below resolution floor";
      break;
    }
    const double bm = boundary_mass_fraction(u);
    if (bm > config.boundary_mass_cap) {
      traj.event = StopEvent::BoundaryAbort;
      traj.event_detail = "boundary mass fraction " + std::to_string(bm);
      break;
    }
    double dt = config.fixed_dt > 0.0 ? config.fixed_dt
                                      : config.dt_safety * lam * lam;
    if (t + dt > config.t_end) dt = config.t_end - t;
    if (!(dt > 0.0)) {
      traj.event = StopEvent::Completed;
      break;
    }
    try {
      u = step(u, dt, config.dealias);
    } catch (const std::runtime_error& e) {
      traj.event = StopEvent::NonFinite;
      traj.event_detail = e.what();
      break;
    }
    t += dt;
    ++accepted;
    record(lambda_estimate(u, config.grad_norm_Q));
    if (accepted % config.snapshot_stride == 0) snapshot();
  }
  if (traj.snap_times.empty() || traj.snap_times.back() != t) snapshot();
  return traj;
}

ComplexField exact_S(double t, const Grid2D& grid,
                     const std::function<double(double)>& Q) {
  if (t == 0.0) throw std::invalid_argument("exact_S: t must be nonzero");
  ComplexField out(grid, Space::Physical);
  const double inv_t = 1.0 / t;
  for (int i = 0; i < grid.n; ++i) {
    const double x1 = grid.x[i];
    for (int j = 0; j < grid.n; ++j) {
      const double x2 = grid.x[j];
      const double r2 = x1 * x1 + x2 * x2;
      const double q = Q(std::sqrt(r2) * std::abs(inv_t));
      out.at(i, j) = inv_t * q * std::polar(1.0, -inv_t + r2 * inv_t / 4.0);
    }
  }
  return out;
}

ForcedTrajectory forced_difference_evolve(const ComplexField& a0,
                                          const ComplexField& f_sample,
                                          const SolverConfig& config) {
  ForcedTrajectory out;
  out.a0 = to_space(a0, Space::Physical);
  ComplexField u0 = out.a0 + to_space(f_sample, Space::Physical);
  out.u_traj = evolve_adaptive(u0, config);

  const ComplexField f_spec = to_space(f_sample, Space::Spectral);
  for (std::size_t k = 0; k < out.u_traj.snapshots.size(); ++k) {
    const double t = out.u_traj.snap_times[k];
    ComplexField F = free_propagate(f_spec, t);
    F = to_space(F, Space::Physical);
    ComplexField a = out.u_traj.snapshots[k] - F;
    ForcedSnapshot fs;
    fs.t = t;
    fs.mass_a = l2_norm_sq(a);
    // d/dt M(a) = -2 Im int conj(a) (|u|^2 u - |a|^2 a)
    double rate = 0.0;
    const ComplexField& u = out.u_traj.snapshots[k];
    for (std::size_t i = 0; i < a.size(); ++i) {
      const cplx av = a.values()[i];
      const cplx uv = u.values()[i];
      const cplx force = std::norm(uv) * uv - std::norm(av) * av;
      rate -= 2.0 * std::imag(std::conj(av) * force);
    }
    fs.forcing_rate = rate * a.grid().cell_area();
    out.a_series.push_back(fs);
    out.a_snapshots.push_back(std::move(a));
  }
  return out;
}

}  // namespace nls
