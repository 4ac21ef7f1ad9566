#include "nls/probstats.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "nls/cheb.hpp"
#include "nls/imethod.hpp"
#include "nls/rng.hpp"

namespace nls {

EnsembleResult run_ensemble(const EnsembleConfig& config,
                            const std::vector<Observable>& observables) {
  if (config.n_samples < 1) throw std::invalid_argument("run_ensemble: n_samples");
  EnsembleResult out;
  for (const auto& o : observables) out.names.push_back(o.name);
  out.values.assign(config.n_samples,
                    std::vector<double>(observables.size(),
                                        std::numeric_limits<double>::quiet_NaN()));
  out.seeds.resize(config.n_samples);

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= config.n_samples) return;
      const std::uint64_t seed = config.seed_base + static_cast<std::uint64_t>(i);
      out.seeds[i] = seed;
      RandomSample s = sample(config.spec, config.grid, seed);
      for (std::size_t j = 0; j < observables.size(); ++j) {
        try {
          out.values[i][j] = observables[j].fn(s);
        } catch (const std::exception&) {
          // recorded as NaN, not fatal
        }
      }
    }
  };
  const int nt = std::max(1, config.threads);
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < nt; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return out;
}

double strichartz_norm(const ComplexField& f, double q, double r, double t0,
                       double t1, int n_times) {
  if (!(q >= 2.0 && r >= 2.0)) throw std::invalid_argument("strichartz_norm: q,r >= 2");
  if (!(t1 > t0)) throw std::invalid_argument("strichartz_norm: empty window");
  std::vector<double> ts, ws;
  gauss_legendre(n_times, t0, t1, ts, ws);
  const ComplexField spec = to_space(f, Space::Spectral);
  double acc = 0.0;
  for (int i = 0; i < n_times; ++i) {
    ComplexField Ft = to_space(free_propagate(spec, ts[i]), Space::Physical);
    acc += ws[i] * std::pow(lp_norm(Ft, r), q);
  }
  return std::pow(acc, 1.0 / q);
}

namespace {

void fit_branch(const std::vector<double>& K, const std::vector<double>& logp,
                double power, double& C, double& c, double& r2) {
  std::vector<double> x(K.size());
  for (std::size_t i = 0; i < K.size(); ++i) x[i] = std::pow(K[i], power);
  FitResult fr = fit_loglinear(x, logp);
  c = -fr.slope;
  C = std::exp(fr.intercept);
  r2 = fr.r2;
}

}  // namespace

TailFit tail_fit(const std::vector<double>& samples,
                 const std::vector<double>& K_grid, int min_exceed) {
  if (samples.size() < 100)
    throw std::invalid_argument("tail_fit: need >= 100 samples");
  TailFit out;
  std::vector<double> logp;
  for (double K : K_grid) {
    std::size_t count = 0;
    for (double s : samples)
      if (s > K) ++count;
    if (static_cast<int>(count) < min_exceed) break;  // truncate the grid
    out.K.push_back(K);
    out.p_hat.push_back(static_cast<double>(count) / samples.size());
    logp.push_back(std::log(out.p_hat.back()));
  }
  if (out.K.size() < 3) {
    out.degenerate = true;
    out.best = "degenerate";
    return out;
  }
  // Constant samples (or otherwise flat exceedance) have no tail to fit.
  double pmin = 1e300, pmax = 0.0;
  for (double p : out.p_hat) {
    pmin = std::min(pmin, p);
    pmax = std::max(pmax, p);
  }
  if (pmax - pmin < 1e-12) {
    out.degenerate = true;
    out.best = "degenerate";
    return out;
  }
  fit_branch(out.K, logp, 2.0, out.C2, out.c2, out.r2_2);
  fit_branch(out.K, logp, 2.0 / 3.0, out.C23, out.c23, out.r2_23);
  out.best = out.r2_2 >= out.r2_23 ? "K^2" : "K^{2/3}";
  return out;
}

TailFit linf_gaussian_check(int n_samples, std::uint64_t seed_base, int K_max,
                            double eps, const std::vector<double>& K_grid) {
  std::vector<double> maxima(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    const std::uint64_t seed = seed_base + static_cast<std::uint64_t>(i);
    double m = 0.0;
    for (int kx = -K_max; kx <= K_max; ++kx)
      for (int ky = -K_max; ky <= K_max; ++ky) {
        const double n2 = 1.0 + kx * kx + ky * ky;
        const double w = std::pow(n2, -eps / 2.0);
        m = std::max(m, w * std::abs(rng::complex_gaussian(seed, kx, ky, 0)));
      }
    maxima[i] = m;
  }
  return tail_fit(maxima, K_grid);
}

ComplexField project_annulus(const ComplexField& f, double N) {
  if (f.grid().xi_max() < N)
    throw std::invalid_argument("project_annulus: empty annulus on this grid");
  return apply_multiplier(f, [N](double x1, double x2) {
    const double k = std::hypot(x1, x2);
    return cplx{(k >= N && k < 2.0 * N) ? 1.0 : 0.0, 0.0};
  });
}

std::vector<BilinearRow> bilinear_ratio_scan(const ComplexField& f1,
                                             const ComplexField& f2,
                                             const std::vector<double>& N_list,
                                             const std::vector<double>& M_list,
                                             double t0, double t1, int n_times) {
  std::vector<BilinearRow> rows;
  std::vector<double> ts, ws;
  gauss_legendre(n_times, t0, t1, ts, ws);
  for (double M : M_list) {
    ComplexField pm = project_annulus(f2, M);
    const double nm = l2_norm(pm);
    if (nm == 0.0)
      throw std::runtime_error("bilinear_ratio_scan: zero denominator at M=" +
                               std::to_string(M));
    const ComplexField pm_spec = to_space(pm, Space::Spectral);
    for (double N : N_list) {
      if (M > N) continue;
      ComplexField pn = project_annulus(f1, N);
      const double nn = l2_norm(pn);
      if (nn == 0.0)
        throw std::runtime_error("bilinear_ratio_scan: zero denominator at N=" +
                                 std::to_string(N));
      const ComplexField pn_spec = to_space(pn, Space::Spectral);
      double acc = 0.0;
      for (int i = 0; i < n_times; ++i) {
        ComplexField FN = to_space(free_propagate(pn_spec, ts[i]), Space::Physical);
        ComplexField FM = to_space(free_propagate(pm_spec, ts[i]), Space::Physical);
        double l2 = 0.0;
        for (std::size_t k = 0; k < FN.size(); ++k)
          l2 += std::norm(FN.values()[k] * FM.values()[k]);
        acc += ws[i] * l2 * FN.grid().cell_area();
      }
      BilinearRow row;
      row.N = N;
      row.M = M;
      row.ratio = std::sqrt(acc) / (std::sqrt(M / N) * nn * nm);
      rows.push_back(row);
    }
  }
  return rows;
}

double moment_growth_exponent(const std::vector<cplx>& coeffs, int n_samples,
                              std::uint64_t seed_base,
                              const std::vector<int>& rhos) {
  std::vector<double> sums(n_samples, 0.0);
  for (int i = 0; i < n_samples; ++i) {
    const std::uint64_t seed = seed_base + static_cast<std::uint64_t>(i);
    cplx acc{0.0, 0.0};
    for (std::size_t n = 0; n < coeffs.size(); ++n)
      acc += coeffs[n] * rng::complex_gaussian(seed, static_cast<std::int64_t>(n),
                                               7771, 0);
    sums[i] = std::abs(acc);
  }
  std::vector<double> lx, ly;
  for (int rho : rhos) {
    double m = 0.0;
    for (double s : sums) m += std::pow(s, rho);
    m /= n_samples;
    lx.push_back(std::log(static_cast<double>(rho)));
    ly.push_back(std::log(std::pow(m, 1.0 / rho)));
  }
  return fit_loglinear(lx, ly).slope;
}

}  // namespace nls
