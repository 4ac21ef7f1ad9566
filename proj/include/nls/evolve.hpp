#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "nls/spectral.hpp"

namespace nls {

struct SolverConfig {
  double dt_safety = 0.02;            // tau: dt = tau * lambda_est^2
  double fixed_dt = 0.0;              // > 0 overrides the adaptive policy
  bool dealias = true;                // 2/3-rule truncation in the linear stage
  long max_steps = 2'000'000;
  double lambda_floor_factor = 4.0;   // stop when lambda_est < factor * dx
  double boundary_mass_cap = 1e-6;    // abort when frame mass exceeds this
  double t_end = std::numeric_limits<double>::infinity();
  int snapshot_stride = 50;           // accepted steps between stored snapshots
  double grad_norm_Q = 3.420657323249437;  // ||grad Q||_2 (Townes), scale proxy
};

enum class StopEvent { Completed, BlowupStop, BoundaryAbort, MaxSteps, NonFinite };

std::string to_string(StopEvent e);

struct Conserved {
  double mass = 0.0;
  double momentum[2] = {0.0, 0.0};
  double energy = 0.0;
};

Conserved conserved(const ComplexField& u);
// Kinetic/quartic split: energy = 0.5 * kinetic - 0.25 * quartic.
void energy_split(const ComplexField& u, double& kinetic, double& quartic);

struct TrajectorySample {
  double t = 0.0;
  Conserved c;
  double lambda_est = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> series;  // one entry per accepted step
  std::vector<double> snap_times;
  std::vector<ComplexField> snapshots;
  StopEvent event = StopEvent::Completed;
  std::string event_detail;
};

// One Strang step: half nonlinear phase, full linear flow, half nonlinear
// phase. Both phase stages preserve |u| pointwise; dealiasing acts in the
// linear stage.
ComplexField step(const ComplexField& u, double dt, bool dealias = true);

double lambda_estimate(const ComplexField& u, double grad_norm_Q);

Trajectory evolve_adaptive(const ComplexField& u0, const SolverConfig& config);

// S(t, x) = (1/t) Q(x/t) e^{-i/t + i|x|^2/(4t)}, the minimal-mass blowup
// solution; Q supplied as a radial evaluator.
ComplexField exact_S(double t, const Grid2D& grid,
                     const std::function<double(double)>& Q);

struct ForcedSnapshot {
  double t = 0.0;
  double mass_a = 0.0;       // ||u - F||_2^2
  double forcing_rate = 0.0; // d/dt M(a) from the pairing with the forcing
};

struct ForcedTrajectory {
  Trajectory u_traj;                  // trajectory of the full solution u
  std::vector<ComplexField> a_snapshots;  // a = u - F at snapshot times
  std::vector<ForcedSnapshot> a_series;
  ComplexField a0;
};

// Evolve u with u(0) = a0 + f, tracking F(t) = e^{it Laplacian} f exactly and
// exposing a = u - F at snapshot times.
ForcedTrajectory forced_difference_evolve(const ComplexField& a0,
                                          const ComplexField& f_sample,
                                          const SolverConfig& config);

}  // namespace nls
