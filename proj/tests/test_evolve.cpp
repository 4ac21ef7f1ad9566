#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nls/evolve.hpp"
#include "nls/profiles.hpp"
#include "nls/rng.hpp"

using namespace nls;

namespace {

GroundState& ground() {
  static GroundState gs = solve_ground_state_full();
  return gs;
}

ComplexField plane_wave(const Grid2D& g, double A, double k1, double k2) {
  ComplexField f(g, Space::Physical);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      f.at(i, j) = A * std::polar(1.0, k1 * g.x[i] + k2 * g.x[j]);
  return f;
}

double rel_l2_err(const ComplexField& a, const ComplexField& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    num += std::norm(a.values()[k] - b.values()[k]);
    den += std::norm(b.values()[k]);
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("step: zero field, per-step mass conservation") {
  Grid2D g = Grid2D::make(64, 4.0);
  ComplexField zero(g, Space::Physical);
  ComplexField z1 = step(zero, 0.01);
  CHECK(l2_norm(z1) == 0.0);

  ComplexField f(g, Space::Physical);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      f.at(i, j) = std::exp(-(g.x[i] * g.x[i] + g.x[j] * g.x[j]));
  const double m0 = l2_norm_sq(f);
  ComplexField f1 = step(f, 0.01);
  CHECK(std::abs(l2_norm_sq(f1) - m0) < 1e-13 * m0);

  CHECK_THROWS_AS(step(f, -0.1), std::invalid_argument);
}

TEST_CASE("step: plane wave closed form over 100 steps") {
  Grid2D g = Grid2D::make(64, M_PI);  // on-grid integer wavenumbers
  const double A = 0.7, k1 = 2.0, k2 = -1.0;
  ComplexField u = plane_wave(g, A, k1, k2);
  const double dt = 1e-3;
  for (int s = 0; s < 100; ++s) u = step(u, dt, /*dealias=*/false);
  const double t = 100 * dt;
  const double phase = (A * A - (k1 * k1 + k2 * k2)) * t;
  ComplexField exact = plane_wave(g, A, k1, k2);
  for (auto& v : exact.values()) v *= std::polar(1.0, phase);
  CHECK(rel_l2_err(u, exact) < 1e-10);
}

TEST_CASE("conserved functionals: homogeneity, symmetry, Townes energy") {
  Grid2D g = Grid2D::make(128, 8.0);
  ComplexField f(g, Space::Physical);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      f.at(i, j) = rng::complex_gaussian(3, i, j, 0) *
                   std::exp(-(g.x[i] * g.x[i] + g.x[j] * g.x[j]) / 4.0);
  Conserved c1 = conserved(f);
  Conserved c2 = conserved(cplx(1.7, 0.0) * f);
  CHECK(c2.mass == doctest::Approx(1.7 * 1.7 * c1.mass).epsilon(1e-12));

  ComplexField re(g, Space::Physical);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      re.at(i, j) = std::exp(-(g.x[i] * g.x[i] + g.x[j] * g.x[j]) / 2.0);
  Conserved cr = conserved(re);
  CHECK(std::abs(cr.momentum[0]) < 1e-12);
  CHECK(std::abs(cr.momentum[1]) < 1e-12);

  // E(Q) ~ 0 after grid sampling
  Grid2D gq = Grid2D::make(256, 12.0);
  ComplexField qf = sample_radial(
      gq, [&](double r) { return cplx{ground().eval(r), 0.0}; }, 1.0, 0.0, 0.0,
      0.0);
  CHECK(std::abs(conserved(qf).energy) < 1e-6);

  // energy split homogeneity: kinetic quadratic, quartic term quartic
  double k1v, q1v, k2v, q2v;
  energy_split(f, k1v, q1v);
  energy_split(cplx(2.0, 0.0) * f, k2v, q2v);
  CHECK(k2v == doctest::Approx(4.0 * k1v).epsilon(1e-12));
  CHECK(q2v == doctest::Approx(16.0 * q1v).epsilon(1e-12));
}

TEST_CASE("exact_S: mass equals the Townes mass at all times; modulus at t=-1") {
  Grid2D g = Grid2D::make(512, 12.0);
  auto Q = [&](double r) { return ground().eval(r); };
  for (double t : {-1.0, -0.5, -0.1}) {
    ComplexField S = exact_S(t, g, Q);
    CHECK(l2_norm_sq(S) == doctest::Approx(ground().mass).epsilon(1e-8));
  }
  ComplexField S1 = exact_S(-1.0, g, Q);
  double err = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      err = std::max(err, std::abs(std::abs(S1.at(i, j)) -
                                   Q(std::hypot(g.x[i], g.x[j]))));
  CHECK(err < 1e-12);
  CHECK_THROWS_AS(exact_S(0.0, g, Q), std::invalid_argument);
}

TEST_CASE("S-solution benchmark: order-2 self convergence") {
  Grid2D g = Grid2D::make(512, 12.0);
  auto Q = [&](double r) { return ground().eval(r); };
  ComplexField u0 = exact_S(-1.0, g, Q);
  ComplexField target = exact_S(-0.5, g, Q);

  auto run = [&](double dt) {
    SolverConfig cfg;
    cfg.fixed_dt = dt;
    cfg.t_end = 0.5;
    cfg.snapshot_stride = 1 << 30;
    cfg.max_steps = 1 << 30;
    Trajectory tr = evolve_adaptive(u0, cfg);
    REQUIRE(tr.event == StopEvent::Completed);
    return rel_l2_err(tr.snapshots.back(), target);
  };
  const double e1 = run(2e-3);
  const double e2 = run(1e-3);
  CHECK(e2 < 1e-5);
  CHECK(e1 / e2 >= 4.0 * 0.9);  // order 2 with 10% slack

  // conservation over the run
  SolverConfig cfg;
  cfg.fixed_dt = 1e-3;
  cfg.t_end = 0.5;
  Trajectory tr = evolve_adaptive(u0, cfg);
  const auto& first = tr.series.front();
  const auto& last = tr.series.back();
  CHECK(std::abs(last.c.mass - first.c.mass) < 1e-10 * first.c.mass);
  CHECK(std::abs(last.c.energy - first.c.energy) < 1e-6);
}

TEST_CASE("time reversal symmetry of the splitting") {
  Grid2D g = Grid2D::make(128, 8.0);
  ComplexField u0(g, Space::Physical);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      u0.at(i, j) = cplx(1.2, 0.4) *
                    std::exp(-(g.x[i] * g.x[i] + g.x[j] * g.x[j]) / 2.0);
  ComplexField u = u0;
  const double dt = 5e-3;
  for (int s = 0; s < 100; ++s) u = step(u, dt, false);
  // backward: conjugate, evolve, conjugate
  for (auto& v : u.values()) v = std::conj(v);
  for (int s = 0; s < 100; ++s) u = step(u, dt, false);
  for (auto& v : u.values()) v = std::conj(v);
  CHECK(rel_l2_err(u, u0) < 1e-9);
}

TEST_CASE("small data: no blowup, tight drift over unit time") {
  Grid2D g = Grid2D::make(128, 8.0);
  const double scale = std::sqrt(0.1 * ground().mass / ground().mass);
  ComplexField u0 = sample_radial(
      g, [&](double r) { return cplx{scale * ground().eval(r), 0.0}; }, 1.0, 0.0,
      0.0, 0.0);
  SolverConfig cfg;
  cfg.t_end = 1.0;
  cfg.dt_safety = 0.01;
  Trajectory tr = evolve_adaptive(u0, cfg);
  CHECK(tr.event == StopEvent::Completed);
  const auto& f = tr.series.front();
  const auto& l = tr.series.back();
  CHECK(std::abs(l.c.mass - f.c.mass) < 1e-8 * f.c.mass);
  CHECK(std::abs(l.c.energy - f.c.energy) < 1e-8 * std::abs(f.c.energy));
  CHECK(std::abs(l.c.momentum[0] - f.c.momentum[0]) < 1e-10);
}

TEST_CASE("supercritical mass: blowup stop in finite time") {
  Grid2D g = Grid2D::make(256, 8.0);
  ComplexField u0 = sample_radial(
      g, [&](double r) { return cplx{1.05 * ground().eval(r), 0.0}; }, 0.8, 0.0,
      0.0, 0.0);
  SolverConfig cfg;
  cfg.dt_safety = 0.02;
  Trajectory tr = evolve_adaptive(u0, cfg);
  CHECK(tr.event == StopEvent::BlowupStop);
}

TEST_CASE("S-solution: blowup stop with T extrapolated near 0") {
  Grid2D g = Grid2D::make(256, 6.0);
  auto Q = [&](double r) { return ground().eval(r); };
  ComplexField u0 = exact_S(-0.5, g, Q);
  SolverConfig cfg;
  cfg.dt_safety = 0.02;
  cfg.max_steps = 400000;
  Trajectory tr = evolve_adaptive(u0, cfg);
  REQUIRE(tr.event == StopEvent::BlowupStop);
  // lambda_est(t) tracks |t| = 0.5 - t_elapsed for S; extrapolate the stop
  const auto& l = tr.series.back();
  const double T_est = l.t + l.lambda_est;  // lambda ~ |t| = T - t with T = 0.5
  CHECK(std::abs(T_est - 0.5) < 0.05);  // within 10% of the blowup horizon
}

TEST_CASE("forced difference evolution") {
  Grid2D g = Grid2D::make(128, 8.0);
  ComplexField a0 = sample_radial(
      g, [&](double r) { return cplx{0.3 * ground().eval(r), 0.0}; }, 1.0, 0.0,
      0.0, 0.0);

  SUBCASE("zero forcing: a == u at every snapshot") {
    ComplexField zero(g, Space::Physical);
    SolverConfig cfg;
    cfg.t_end = 0.05;
    cfg.snapshot_stride = 10;
    ForcedTrajectory ft = forced_difference_evolve(a0, zero, cfg);
    for (std::size_t k = 0; k < ft.a_snapshots.size(); ++k) {
      double err = 0.0;
      for (std::size_t i = 0; i < ft.a_snapshots[k].size(); ++i)
        err = std::max(err, std::abs(ft.a_snapshots[k].values()[i] -
                                     ft.u_traj.snapshots[k].values()[i]));
      CHECK(err < 1e-14);
    }
  }

  SUBCASE("free-evolution mass constant; almost-conservation of M(a)") {
    ComplexField f(g, Space::Physical);
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j)
        f.at(i, j) = 0.05 * rng::complex_gaussian(9, i, j, 0) *
                     std::exp(-(g.x[i] * g.x[i] + g.x[j] * g.x[j]) / 8.0);
    const double fmass = l2_norm_sq(f);
    SolverConfig cfg;
    cfg.t_end = 0.04;
    cfg.fixed_dt = 2e-4;
    cfg.snapshot_stride = 20;
    ForcedTrajectory ft = forced_difference_evolve(a0, f, cfg);
    REQUIRE(ft.a_series.size() >= 3);
    // ||F(t)||_2 = ||f||_2 for all t
    for (std::size_t k = 0; k < ft.u_traj.snap_times.size(); ++k) {
      ComplexField F = free_propagate(f, ft.u_traj.snap_times[k]);
      CHECK(std::abs(l2_norm_sq(F) - fmass) < 1e-12 * fmass);
    }
    // centered finite difference of M(a) vs the forcing pairing, midpoints
    for (std::size_t k = 1; k + 1 < ft.a_series.size(); ++k) {
      const double dMdt = (ft.a_series[k + 1].mass_a - ft.a_series[k - 1].mass_a) /
                          (ft.a_series[k + 1].t - ft.a_series[k - 1].t);
      const double pairing = ft.a_series[k].forcing_rate;
      CHECK(std::abs(dMdt - pairing) < 0.05 * std::abs(pairing));
    }
  }
}
