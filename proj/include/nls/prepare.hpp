#pragma once

#include <string>
#include <vector>

#include "nls/modulation.hpp"
#include "nls/profiles.hpp"
#include "nls/spectral.hpp"

namespace nls {

struct Eps0Descriptor {
  std::string kind = "zero";  // zero | gaussian-bump | from-file
  double amplitude = 0.0;
  double width = 1.0;
  std::string path;
};

struct PrepareConfig {
  double lambda0 = 0.3;
  double b0 = 0.1;
  double x0[2] = {0.0, 0.0};
  Eps0Descriptor eps0;
  bool desk_scale_override = false;
  double mass_excess_cap = 0.0;  // 0 = default 0.2 ||Q||^2
};

struct ConditionReport {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool holds = false;
  bool desk_scale_relaxed = false;
};

struct PreparedData {
  ComplexField a0;
  std::vector<ConditionReport> conditions;
  double orth_residuals[5] = {0, 0, 0, 0, 0};
  double mass = 0.0;
  double energy = 0.0;
  double momentum[2] = {0.0, 0.0};
};

// Well-prepared data a0 = (1/lambda0)(Qtilde_{b0} + eps0)((x - x0)/lambda0)
// with eps0 projected onto the orthogonality constraints.
PreparedData prepare_a0(const Grid2D& grid, const PrepareConfig& cfg,
                        QbInterp& interp, const GroundState& ground,
                        double gamma_b0);

}  // namespace nls
