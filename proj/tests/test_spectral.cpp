#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "nls/rng.hpp"
#include "nls/spectral.hpp"
#include "oracles.hpp"

using namespace nls;

namespace {

ComplexField random_field(const Grid2D& g, std::uint64_t seed) {
  ComplexField f(g, Space::Physical);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      f.at(i, j) = rng::complex_gaussian(seed, i, j, 0);
  return f;
}

}  // namespace

TEST_CASE("make_grid definitions") {
  Grid2D g = Grid2D::make(8, M_PI);
  CHECK(g.dx == doctest::Approx(M_PI / 4).epsilon(1e-15));
  double xi_min = 1e300, xi_max = -1e300;
  for (double xi : g.xi) {
    xi_min = std::min(xi_min, xi);
    xi_max = std::max(xi_max, xi);
  }
  CHECK(xi_min == doctest::Approx(-4.0));
  CHECK(xi_max == doctest::Approx(3.0));
  CHECK(g.dx * g.n == doctest::Approx(2.0 * M_PI).epsilon(1e-15));

  Grid2D g2 = Grid2D::make(256, 16.0);
  CHECK(g2.xi_max() == doctest::Approx(8.0 * M_PI));

  CHECK_THROWS_AS(Grid2D::make(6, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid2D::make(64, -1.0), std::invalid_argument);
  // conjugate symmetry of the wavenumber array under j -> -j
  for (int j = 1; j < g2.n / 2; ++j)
    CHECK(g2.xi[j] == doctest::Approx(-g2.xi[g2.n - j]).epsilon(1e-15));
}

TEST_CASE("transform round trip and unitarity") {
  Grid2D g = Grid2D::make(64, 4.0);
  ComplexField one(g, Space::Physical);
  for (auto& v : one.values()) v = 1.0;
  ComplexField spec = transform(one);
  // single nonzero coefficient at xi = 0
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      if (i == 0 && j == 0)
        CHECK(std::abs(spec.at(i, j)) > 1.0);
      else
        CHECK(std::abs(spec.at(i, j)) < 1e-12);
    }

  ComplexField f = random_field(g, 7);
  ComplexField back = transform(transform(f));
  double err = 0.0, norm = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    err += std::norm(back.values()[k] - f.values()[k]);
    norm += std::norm(f.values()[k]);
  }
  CHECK(std::sqrt(err / norm) < 1e-13);

  const double n_phys = l2_norm(f);
  const double n_spec = l2_norm(transform(f));
  CHECK(std::abs(n_phys - n_spec) < 1e-12 * n_phys);
}

TEST_CASE("apply_multiplier identity, projector idempotence, linearity") {
  Grid2D g = Grid2D::make(64, 4.0);
  ComplexField f = random_field(g, 3);
  ComplexField id = apply_multiplier(f, [](double, double) { return cplx{1.0, 0.0}; });
  double err = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k)
    err = std::max(err, std::abs(id.values()[k] - f.values()[k]));
  CHECK(err < 1e-13 * lp_norm(f, INFINITY));

  auto proj = [](double x1, double x2) {
    return cplx{std::hypot(x1, x2) <= 10.0 ? 1.0 : 0.0, 0.0};
  };
  ComplexField p1 = apply_multiplier(f, proj);
  ComplexField p2 = apply_multiplier(p1, proj);
  err = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k)
    err = std::max(err, std::abs(p2.values()[k] - p1.values()[k]));
  CHECK(err < 1e-12);

  // linearity
  ComplexField h = random_field(g, 4);
  ComplexField lhs = apply_multiplier(cplx(2.0, 1.0) * f + h, proj);
  ComplexField rhs = cplx(2.0, 1.0) * apply_multiplier(f, proj) +
                     apply_multiplier(h, proj);
  err = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k)
    err = std::max(err, std::abs(lhs.values()[k] - rhs.values()[k]));
  CHECK(err < 1e-12);

  CHECK_THROWS(apply_multiplier(f, [](double x1, double) {
    return cplx{x1 == 0.0 ? std::numeric_limits<double>::infinity() : 1.0, 0.0};
  }));
}

TEST_CASE("free propagation: Gaussian closed form, unitarity, semigroup") {
  Grid2D g = Grid2D::make(256, 16.0);
  ComplexField g0(g, Space::Physical);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      g0.at(i, j) = std::exp(-(g.x[i] * g.x[i] + g.x[j] * g.x[j]) / 2.0);

  ComplexField gt = free_propagate(g0, 1.0);
  double err = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      err = std::max(err, std::abs(gt.at(i, j) -
                                   oracle::free_gaussian(1.0, g.x[i], g.x[j])));
  CHECK(err < 1e-10);

  // t = 0 identity
  ComplexField same = free_propagate(g0, 0.0);
  for (std::size_t k = 0; k < g0.size(); ++k)
    CHECK(std::abs(same.values()[k] - g0.values()[k]) < 1e-14);

  ComplexField f = random_field(g, 11);
  CHECK(std::abs(l2_norm(free_propagate(f, 0.37)) - l2_norm(f)) <
        1e-12 * l2_norm(f));

  // semigroup
  ComplexField one_shot = free_propagate(f, 0.55);
  ComplexField two_step = free_propagate(free_propagate(f, 0.25), 0.30);
  err = 0.0;
  double norm = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    err += std::norm(one_shot.values()[k] - two_step.values()[k]);
    norm += std::norm(one_shot.values()[k]);
  }
  CHECK(std::sqrt(err / norm) < 1e-12);
}

TEST_CASE("pair_real: norm, orthogonality, symmetry, bilinearity") {
  Grid2D g = Grid2D::make(64, 4.0);
  ComplexField f = random_field(g, 21), h = random_field(g, 22);
  CHECK(pair_real(f, f) == doctest::Approx(l2_norm_sq(f)).epsilon(1e-13));

  ComplexField box(g, Space::Physical), ibox(g, Space::Physical);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      const bool in = std::abs(g.x[i]) < 2.0 && std::abs(g.x[j]) < 2.0;
      box.at(i, j) = in ? 1.0 : 0.0;
      ibox.at(i, j) = in ? cplx{0.0, 1.0} : cplx{0.0, 0.0};
    }
  CHECK(std::abs(pair_real(box, ibox)) < 1e-14);

  CHECK(pair_real(f, h) == doctest::Approx(pair_real(h, f)).epsilon(1e-13));
  const double lhs = pair_real(cplx(2.5, 0.0) * f + h, h);
  CHECK(lhs == doctest::Approx(2.5 * pair_real(f, h) + pair_real(h, h)).epsilon(1e-12));

  Grid2D g2 = Grid2D::make(32, 4.0);
  ComplexField other(g2, Space::Physical);
  CHECK_THROWS_AS(pair_real(f, other), std::invalid_argument);
}

TEST_CASE("pair_real(Q, Q) matches the Townes mass from the shooting oracle") {
  auto oracle = nls::oracle::townes_shooting();
  CHECK(oracle.mass == doctest::Approx(11.7009).epsilon(2e-5));
  GroundState gs = solve_ground_state_full();
  Grid2D g = Grid2D::make(256, 12.0);
  ComplexField qf(g, Space::Physical);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      qf.at(i, j) = gs.eval(std::hypot(g.x[i], g.x[j]));
  CHECK(pair_real(qf, qf) == doctest::Approx(oracle.mass).epsilon(1e-5));
}

TEST_CASE("field container round trip") {
  Grid2D g = Grid2D::make(32, 2.0);
  ComplexField f = random_field(g, 31);
  write_field("/tmp/nls_test_field.nlsf", f);
  ComplexField back = read_field("/tmp/nls_test_field.nlsf");
  REQUIRE(back.grid().n == f.grid().n);
  CHECK(back.grid().half_width == f.grid().half_width);
  CHECK(back.space() == f.space());
  for (std::size_t k = 0; k < f.size(); ++k)
    CHECK(back.values()[k] == f.values()[k]);
  std::remove("/tmp/nls_test_field.nlsf");
}

TEST_CASE("boundary mass fraction") {
  Grid2D g = Grid2D::make(64, 4.0);
  ComplexField centered(g, Space::Physical);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      centered.at(i, j) = std::exp(-(g.x[i] * g.x[i] + g.x[j] * g.x[j]));
  CHECK(boundary_mass_fraction(centered) < 1e-6);
  ComplexField edge(g, Space::Physical);
  edge.at(1, 1) = 1.0;  // near the corner
  CHECK(boundary_mass_fraction(edge) == doctest::Approx(1.0));
}
