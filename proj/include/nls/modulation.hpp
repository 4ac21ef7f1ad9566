#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nls/imethod.hpp"
#include "nls/profiles.hpp"
#include "nls/spectral.hpp"

namespace nls {

// b-interpolated access to the Q_b family: per-b node arrays are resampled on
// a fixed uniform rho = r/R_b grid, combined by 4-point Lagrange interpolation
// in b, and wrapped in analytic cutoff/phase factors.
class QbInterp {
 public:
  QbInterp(QbFamily& family, double b_lo = 0.03, double b_hi = 0.30,
           double db = 0.015);

  struct Assembled {
    double b = 0.0, eta = 0.0, R_b = 0.0, Rb_minus = 0.0;
    UniformSpline P, Pp, Ppp;  // functions of rho in [0,1]; Pp = dP/d(rho) etc.
    // Radial constants for the orthogonality conditions and diagnostics.
    double qt_mass = 0.0;       // ||Qtilde||_2^2
    double y2_mass = 0.0;       // || |y| Qtilde ||_2^2
    double const_c1 = 0.0;      // Re<Qtilde, |y|^2 Qtilde>
    double const_c3 = 0.0;      // Re<Qtilde, i Lambda Qtilde>
    double const_c4 = 0.0;      // Re<Qtilde, i Lambda^2 Qtilde>
    double w_norms[5] = {0, 0, 0, 0, 0};  // L2 norms of the pairing weights

    double cutoff(double r) const;
    double cutoff_d1(double r) const;
    double cutoff_d2(double r) const;
    // Qtilde, Lambda Qtilde, Lambda^2 Qtilde at radius r (complex).
    void eval(double r, cplx& qt, cplx& lam_qt, cplx& lam2_qt) const;
    cplx qtilde(double r) const;
  };

  const Assembled& at(double b);
  double b_lo() const { return b_lo_; }
  double b_hi() const { return b_hi_; }
  const GroundState& ground() const { return ground_; }

 private:
  const GroundState& ground_;
  double b_lo_, b_hi_, db_;
  double eta_ = 0.0;
  std::vector<double> bs_;
  std::vector<std::vector<double>> Pn_, Ppn_, Pppn_;  // per b, uniform rho grid
  std::map<double, Assembled> cache_;
  Assembled assemble(double b) const;
};

struct ModulationParams {
  double fd_rel = 1e-6;
  int max_iter = 50;
  int max_halvings = 8;
  double tol_rel = 1e-11;  // conditions below tol_rel * ||field|| * ||W_k||
};

struct ModulationState {
  double lambda = 1.0;
  double b = 0.05;
  double xc[2] = {0.0, 0.0};
  double gamma = 0.0;
  double residuals[5] = {0, 0, 0, 0, 0};
  double eps_l2 = 0.0;
  bool converged = false;
  int iterations = 0;
};

ModulationState initial_guess(const ComplexField& field, QbInterp& interp,
                              double grad_norm_Q);

ModulationState decompose(const ComplexField& field, const ModulationState& guess,
                          QbInterp& interp, const ModulationParams& par = {});

// eps on the original grid re-expressed at grid points:
// E(x) = lambda a(x) e^{i gamma} - Qtilde_b((x - xc)/lambda).
ComplexField eps_field(const ComplexField& field, const ModulationState& st,
                       QbInterp& interp);

// int |eps|^2 e^{-|y|} dy in rescaled variables.
double eps_exp_weighted_mass(const ComplexField& field, const ModulationState& st,
                             QbInterp& interp);

// Re<eps, W> for a caller-supplied radial complex weight W(r) in the rescaled
// frame (truncated to the grid frame).
double eps_pairing(const ComplexField& field, const ModulationState& st,
                   QbInterp& interp, const std::function<cplx(double)>& W,
                   double support_radius);

struct FrameRecord {
  double t = 0.0, s = 0.0;
  ModulationState state;
  double b_s = 0.0;             // db/ds
  double lam_s_over_lam = 0.0;  // (dlambda/ds)/lambda
  double grad_ieps = 0.0;       // ||grad I_{N lambda} eps||_2 proxy
  double exp_mass = 0.0;        // int |eps|^2 e^{-|y|}
  double f1 = 0.0;
};

struct ModulationSeries {
  std::vector<FrameRecord> frames;
  bool truncated = false;
  std::string truncation_reason;
};

struct SeriesOptions {
  AlmostConservationPolicy imethod;  // for the grad-eps proxy threshold
  bool with_f1 = true;
};

// zeta_tilde scalars per tabulated b for the f1 functional.
struct ZetaF1Entry {
  double b = 0.0;
  double im_y_grad = 0.0;  // (1/2) Im int y grad zt conj(zt)
  ZetaTilde zt;            // holds pointers into an externally owned solution
};

class ZetaF1Table {
 public:
  void add(const ZetaSolution& zeta, double a);
  const ZetaF1Entry* nearest(double b) const;
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<ZetaF1Entry> entries_;
};

double lyapunov_f1(const ComplexField& field, const ModulationState& st,
                   QbInterp& interp, const ZetaF1Table* zeta_table);

ModulationSeries build_series(const std::vector<double>& times,
                              const std::vector<const ComplexField*>& fields,
                              QbInterp& interp, const SeriesOptions& opt = {},
                              const ZetaF1Table* zeta_table = nullptr);

struct LogLogFit {
  double T = 0.0;
  double c = 1.0;
  double residual = 0.0;  // rms relative misfit
  bool valid = false;
};

struct LogLogReport {
  LogLogFit loglog;    // lambda = c sqrt((T-t)/ln|ln(T-t)|)
  LogLogFit sqrt_law;  // lambda = c sqrt(T-t)
};

LogLogReport fit_loglog(const std::vector<double>& times,
                        const std::vector<double>& lambdas, double t_lo,
                        double t_hi);

struct VirialRow {
  double s = 0.0, b = 0.0, b_s = 0.0, gamma_power = 0.0, margin = 0.0;
};

struct VirialReport {
  std::vector<VirialRow> rows;
  double violation_fraction = 0.0;
};

// Margin b_s + Gamma_b^{1-C eta} per sample; Gamma from the measured law
// interpolated through the solved table.
VirialReport virial_check(const ModulationSeries& series,
                          const std::function<double(double)>& gamma_of_b,
                          double C = 10.0, double eta = 1e-2);

}  // namespace nls
