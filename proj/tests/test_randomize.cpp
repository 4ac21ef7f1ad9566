#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nls/randomize.hpp"
#include "nls/rng.hpp"

using namespace nls;

TEST_CASE("window: exact partition of unity, nonnegativity, normalization") {
  Window w = make_window(5, 0.5);
  // 10^4 pseudo-random points in [-2, 2]^2
  for (int trial = 0; trial < 10000; ++trial) {
    const double x1 = -2.0 + 4.0 * rng::uniform01(rng::key(5, trial, 0, 0));
    const double x2 = -2.0 + 4.0 * rng::uniform01(rng::key(5, trial, 1, 0));
    double s = 0.0;
    for (int kx = -3; kx <= 3; ++kx)
      for (int ky = -3; ky <= 3; ++ky) s += w.psi(x1 - kx, x2 - ky);
    REQUIRE(std::abs(s - 1.0) < 1e-12);
    REQUIRE(w.psi(x1, x2) >= 0.0);
  }
  CHECK(w.psi(0.0, 0.0) == 1.0);
  // psi(0) + sum_{k != 0} psi(-k) = 1 reduces to psi(0) = 1 here
  double s = w.psi(0.0, 0.0);
  for (int kx = -3; kx <= 3; ++kx)
    for (int ky = -3; ky <= 3; ++ky)
      if (kx != 0 || ky != 0) s += w.psi(-kx, -ky);
  CHECK(s == doctest::Approx(1.0).epsilon(1e-14));

  CHECK_THROWS_AS(make_window(5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_window(5, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(make_window(4, 0.5), std::invalid_argument);
}

TEST_CASE("make_profile: normalization, decay constant, f_0 convention") {
  for (const char* shape : {"pure-inverse", "log-corrected"}) {
    RandomDataSpec spec = make_profile(shape, 12);
    CHECK(spec.l2_sum() == doctest::Approx(1.0).epsilon(1e-12));
    // decay |f_k| |k| <= C for all k != 0
    for (int kx = -12; kx <= 12; ++kx)
      for (int ky = -12; ky <= 12; ++ky) {
        if (kx == 0 && ky == 0) continue;
        const double k = std::hypot((double)kx, (double)ky);
        CHECK(spec.amp(kx, ky) * k <= spec.decay_constant * (1 + 1e-12));
      }
    // |f_0| = C (largest-allowed convention)
    CHECK(spec.amp(0, 0) == doctest::Approx(spec.decay_constant).epsilon(1e-12));
  }
  CHECK_THROWS_AS(make_profile("pure-inverse", 2), std::invalid_argument);
  CHECK_THROWS_AS(make_profile("nonsense", 8), std::invalid_argument);
}

TEST_CASE("H^s divergence proxy grows without bound as K_max doubles") {
  // Direct-summation oracle of sum |k|^{2s} |f_k|^2 for the log-corrected-1
  // shape (exponent 1), unnormalized amplitudes.
  const double s = 0.1;
  double prev = 0.0;
  for (int K : {8, 16, 32, 64}) {
    RandomDataSpec spec = make_profile("log-corrected-1", K, false);
    double acc = 0.0;
    for (int kx = -K; kx <= K; ++kx)
      for (int ky = -K; ky <= K; ++ky) {
        const double k = std::max(std::hypot((double)kx, (double)ky), 1.0);
        acc += std::pow(k, 2 * s) * spec.amp(kx, ky) * spec.amp(kx, ky);
      }
    CHECK(acc > prev * 1.02);  // strictly growing, no saturation
    prev = acc;
  }
}

TEST_CASE("project_unit: reconstruction, pure mode, contraction") {
  Grid2D g = Grid2D::make(128, 4.0 * M_PI);  // integer frequencies on-grid
  // band-limited random field with spectrum inside |xi| <= 4
  ComplexField f(g, Space::Spectral);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (std::hypot(g.xi[i], g.xi[j]) < 4.0)
        f.at(i, j) = rng::complex_gaussian(17, i, j, 0);
  f = transform(f);

  ComplexField sum(g, Space::Physical);
  for (int kx = -6; kx <= 6; ++kx)
    for (int ky = -6; ky <= 6; ++ky) sum = sum + project_unit(f, kx, ky);
  double err = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k)
    err += std::norm(sum.values()[k] - f.values()[k]);
  CHECK(std::sqrt(err) < 1e-11 * l2_norm(f));

  // pure mode at xi = (2, 1) passes through P_{(2,1)} unchanged
  ComplexField mode(g, Space::Physical);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      mode.at(i, j) = std::polar(1.0, 2.0 * g.x[i] + 1.0 * g.x[j]);
  ComplexField pm = project_unit(mode, 2, 1);
  err = 0.0;
  for (std::size_t k = 0; k < mode.size(); ++k)
    err = std::max(err, std::abs(pm.values()[k] - mode.values()[k]));
  CHECK(err < 1e-12);

  CHECK(l2_norm(project_unit(f, 1, 1)) <= l2_norm(f) * (1 + 1e-12));
  CHECK_THROWS_AS(project_unit(f, 1000, 0), std::invalid_argument);
}

TEST_CASE("bernstein ratio: uniformity scan, r1 = r2, modulation invariance") {
  Grid2D g = Grid2D::make(128, 2.0 * M_PI);  // xi_max = 32 resolves the scan
  ComplexField spike(g, Space::Physical);
  spike.at(g.n / 2, g.n / 2) = 1.0;  // delta-like

  double rmin = 1e300, rmax = 0.0;
  for (int kx = -10; kx <= 10; ++kx)
    for (int ky = -10; ky <= 10; ++ky) {
      const double r = bernstein_ratio(spike, kx, ky, 2.0, INFINITY);
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
    }
  CHECK(std::isfinite(rmax));
  CHECK(rmax / rmin <= 3.0);

  CHECK(bernstein_ratio(spike, 0, 0, 4.0, 4.0) == doctest::Approx(1.0));

  // frequency translation is an isometry on every L^p: the ratio of P_0 f
  // equals that of P_k (e^{ik.x} f)
  ComplexField modulated(g, Space::Physical);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      modulated.at(i, j) =
          spike.at(i, j) * std::polar(1.0, 3.0 * g.x[i] + 2.0 * g.x[j]);
  const double r0 = bernstein_ratio(spike, 0, 0, 2.0, 6.0);
  const double r3 = bernstein_ratio(modulated, 3, 2, 2.0, 6.0);
  CHECK(std::abs(r0 - r3) < 1e-10 * r0);

  ComplexField zero(g, Space::Physical);
  CHECK_THROWS_AS(bernstein_ratio(zero, 0, 0, 2.0, 4.0), std::runtime_error);
}

TEST_CASE("sample: determinism, zero spec, linearity in amplitudes") {
  Grid2D g = Grid2D::make(128, 4.0 * M_PI);
  RandomDataSpec spec = make_profile("log-corrected", 8);
  RandomSample s1 = sample(spec, g, 42);
  RandomSample s2 = sample(spec, g, 42);
  REQUIRE(s1.field.size() == s2.field.size());
  for (std::size_t k = 0; k < s1.field.size(); ++k)
    CHECK(s1.field.values()[k] == s2.field.values()[k]);  // bitwise

  RandomDataSpec zero = spec;
  for (double& a : zero.amplitudes) a = 0.0;
  RandomSample sz = sample(zero, g, 42);
  CHECK(l2_norm(sz.field) == 0.0);

  RandomDataSpec half = spec;
  for (double& a : half.amplitudes) a *= 0.5;
  RandomSample sh = sample(half, g, 42);
  for (std::size_t k = 0; k < s1.field.size(); ++k)
    CHECK(std::abs(sh.field.values()[k] - 0.5 * s1.field.values()[k]) < 1e-15);
}

TEST_CASE("ensemble mean of ||f^omega||^2 matches the deterministic nu") {
  Grid2D g = Grid2D::make(64, 4.0 * M_PI);
  RandomDataSpec spec = make_profile("log-corrected", 6);
  const double nu = nu_deterministic(spec, g);
  const int n = 2000;
  double mean = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = l2_norm_sq(sample(spec, g, 1000 + i).field);
    mean += v;
    m2 += v * v;
  }
  mean /= n;
  const double var = m2 / n - mean * mean;
  const double se = std::sqrt(var / n);
  CHECK(std::abs(mean - nu) < 3.0 * se);
}

TEST_CASE("independence proxy: disjoint non-adjacent blocks decorrelate") {
  Grid2D g = Grid2D::make(64, 4.0 * M_PI);
  RandomDataSpec spec = make_profile("pure-inverse", 6);
  const int n = 2000;
  std::vector<double> a(n), b(n);
  for (int i = 0; i < n; ++i) {
    RandomSample s = sample(spec, g, 50000 + i);
    a[i] = l2_norm_sq(project_unit(s.field, 2, 0));
    b[i] = l2_norm_sq(project_unit(s.field, -3, 2));
  }
  double ma = 0, mb = 0;
  for (int i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0, va = 0, vb = 0;
  for (int i = 0; i < n; ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  cov /= n;
  va /= n;
  vb /= n;
  const double se = std::sqrt(va * vb / n);
  CHECK(std::abs(cov) < 3.0 * se);
}

TEST_CASE("spec serialization round trip") {
  Grid2D g = Grid2D::make(64, 4.0 * M_PI);
  RandomDataSpec spec = make_profile("log-corrected", 6, true, make_window(5, 0.8));
  RandomDataSpec back = parse_spec(serialize_spec(spec, g));
  CHECK(back.K_max == spec.K_max);
  CHECK(back.shape == spec.shape);
  CHECK(back.window.order == spec.window.order);
  CHECK(back.window.overlap == spec.window.overlap);
  REQUIRE(back.amplitudes.size() == spec.amplitudes.size());
  for (std::size_t i = 0; i < spec.amplitudes.size(); ++i)
    CHECK(back.amplitudes[i] == doctest::Approx(spec.amplitudes[i]).epsilon(1e-14));
}
