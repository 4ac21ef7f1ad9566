#include "nls/prepare.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "nls/evolve.hpp"

namespace nls {

namespace {

// Rescaled-frame pairing between two grid fields interpreted in y variables.
// Both fields are samples of functions of y on the same y-grid.
double pair_y(const ComplexField& f, const ComplexField& g) { return pair_real(f, g); }

}  // namespace

PreparedData prepare_a0(const Grid2D& grid, const PrepareConfig& cfg,
                        QbInterp& interp, const GroundState& ground,
                        double gamma_b0) {
  if (!(cfg.b0 > 0.0 && cfg.b0 <= 0.3))
    throw std::invalid_argument("prepare_a0: b0 in (0, 0.3] required");
  if (!(cfg.lambda0 > 0.0)) throw std::invalid_argument("prepare_a0: lambda0 > 0");

  const auto& qb = interp.at(cfg.b0);

  // Work on the rescaled y-grid spanned by the physical grid: y = x / lambda0
  // maps the box to [-L/lambda0, L/lambda0)^2. Build eps0 and project it there,
  // then assemble a0 on the physical grid.
  Grid2D ygrid = Grid2D::make(grid.n, grid.half_width / cfg.lambda0);

  ComplexField eps0(ygrid, Space::Physical);
  if (cfg.eps0.kind == "zero") {
    // stays zero
  } else if (cfg.eps0.kind == "gaussian-bump") {
    for (int i = 0; i < ygrid.n; ++i)
      for (int j = 0; j < ygrid.n; ++j) {
        const double r2 = ygrid.x[i] * ygrid.x[i] + ygrid.x[j] * ygrid.x[j];
        eps0.at(i, j) = cfg.eps0.amplitude *
                        std::exp(-r2 / (2.0 * cfg.eps0.width * cfg.eps0.width));
      }
  } else if (cfg.eps0.kind == "from-file") {
    ComplexField loaded = read_field(cfg.eps0.path);
    if (loaded.grid().n != ygrid.n)
      throw std::invalid_argument("prepare_a0: eps0 file grid mismatch");
    eps0 = ComplexField(ygrid, Space::Physical);
    eps0.values() = to_space(loaded, Space::Physical).values();
  } else {
    throw std::invalid_argument("prepare_a0: unknown eps0 kind " + cfg.eps0.kind);
  }

  // Pairing directions W_k sampled on the y-grid; the five scalar constraints
  // are Re<eps, W_k> = 0.
  std::vector<ComplexField> dirs;
  for (int k = 0; k < 5; ++k) dirs.emplace_back(ygrid, Space::Physical);
  for (int i = 0; i < ygrid.n; ++i) {
    const double y0 = ygrid.x[i];
    for (int j = 0; j < ygrid.n; ++j) {
      const double y1 = ygrid.x[j];
      const double r = std::hypot(y0, y1);
      cplx qt, l1, l2;
      qb.eval(r, qt, l1, l2);
      dirs[0].at(i, j) = r * r * qt;
      dirs[1].at(i, j) = y0 * qt;
      dirs[2].at(i, j) = y1 * qt;
      dirs[3].at(i, j) = cplx(0.0, 1.0) * l1;
      dirs[4].at(i, j) = cplx(0.0, 1.0) * l2;
    }
  }

  PreparedData out{ComplexField(grid, Space::Physical), {}, {0, 0, 0, 0, 0}};

  const double eps_norm = l2_norm(eps0);
  if (eps_norm > 0.0) {
    // Exact linear projection: eps <- eps - sum alpha_j d_j with the Gram
    // system G alpha = c, G_{ij} = Re<d_j, W_i>, c_i = Re<eps, W_i>.
    Eigen::MatrixXd G(5, 5);
    Eigen::VectorXd c(5);
    for (int i = 0; i < 5; ++i) {
      c[i] = pair_y(eps0, dirs[i]);
      for (int j = 0; j < 5; ++j) G(i, j) = pair_y(dirs[j], dirs[i]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
    if (lu.rank() < 5)
      throw std::runtime_error("prepare_a0: degenerate orthogonality projection");
    Eigen::VectorXd alpha = lu.solve(c);
    for (int k = 0; k < 5; ++k)
      eps0 = eps0 - (cplx(alpha[k], 0.0) * dirs[k]);
  }
  for (int k = 0; k < 5; ++k) out.orth_residuals[k] = pair_y(eps0, dirs[k]);

  // Assemble centred: a0(x) = (1/lambda0)(Qtilde + eps0)(x/lambda0), the
  // y-grid being the 1:1 rescaling of the physical grid; then translate to x0
  // by the spectral shift.
  for (int i = 0; i < grid.n; ++i) {
    for (int j = 0; j < grid.n; ++j) {
      const double r = std::hypot(ygrid.x[i], ygrid.x[j]);
      out.a0.at(i, j) = (qb.qtilde(r) + eps0.at(i, j)) / cfg.lambda0;
    }
  }
  if (cfg.x0[0] != 0.0 || cfg.x0[1] != 0.0) {
    out.a0 = apply_multiplier(out.a0, [&cfg](double k1, double k2) {
      return std::polar(1.0, -(k1 * cfg.x0[0] + k2 * cfg.x0[1]));
    });
  }

  Conserved cons = conserved(out.a0);
  out.mass = cons.mass;
  out.energy = cons.energy;
  out.momentum[0] = cons.momentum[0];
  out.momentum[1] = cons.momentum[1];

  auto add_cond = [&](const std::string& name, double value, double bound,
                      bool holds, bool relaxed) {
    out.conditions.push_back({name, value, bound, holds, relaxed});
  };
  add_cond("b0 << 1", cfg.b0, 0.3, cfg.b0 <= 0.3, false);
  {
    const double bound = std::exp(-std::exp(2.0 * M_PI / (3.0 * cfg.b0)));
    const bool holds = cfg.lambda0 <= bound;
    if (!holds && !cfg.desk_scale_override)
      throw std::invalid_argument(
          "prepare_a0: lambda0 violates the asymptotic smallness condition; set "
          "desk_scale_override to acknowledge the regime relaxation");
    add_cond("lambda0 <= exp(-exp(2pi/3b0))", cfg.lambda0, bound, holds, !holds);
  }
  add_cond("||eps0||_2 << 1", l2_norm(eps0), 0.5, l2_norm(eps0) < 0.5, false);
  {
    double ew = 0.0;
    for (int i = 0; i < ygrid.n; ++i)
      for (int j = 0; j < ygrid.n; ++j)
        ew += std::norm(eps0.at(i, j)) *
              std::exp(-std::hypot(ygrid.x[i], ygrid.x[j]));
    ew *= ygrid.cell_area();
    const double h1 = grad_norm_sq(eps0) + ew;
    const double bound = std::pow(gamma_b0, 0.75);
    add_cond("int |grad eps0|^2 + |eps0|^2 e^{-|y|} <= Gamma^{3/4}", h1, bound,
             h1 <= bound, h1 > bound);
  }
  add_cond("lambda0^{1/2} |E(a0)| <= 1", std::sqrt(cfg.lambda0) * std::abs(out.energy),
           1.0, std::sqrt(cfg.lambda0) * std::abs(out.energy) <= 1.0, false);
  {
    const double pm = std::hypot(out.momentum[0], out.momentum[1]);
    add_cond("lambda0^{1/2} |P(a0)| <= 1", std::sqrt(cfg.lambda0) * pm, 1.0,
             std::sqrt(cfg.lambda0) * pm <= 1.0, false);
  }
  {
    const double cap =
        cfg.mass_excess_cap > 0.0 ? cfg.mass_excess_cap : 0.2 * ground.mass;
    const double excess = out.mass - ground.mass;
    add_cond("0 < M(a0) - ||Q||^2 < cap", excess, cap,
             excess > 0.0 && excess < cap, false);
  }
  return out;
}

}  // namespace nls
