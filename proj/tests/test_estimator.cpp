#include "support.hpp"

#include "waverate/error.hpp"
#include "waverate/estimator.hpp"
#include "waverate/processes.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace waverate;

namespace {

const std::shared_ptr<const Wavelet>&
haar()
{
  static const auto w = Wavelet::make(1);
  return w;
}

const std::shared_ptr<const Wavelet>&
db4()
{
  static const auto w = Wavelet::make(4);
  return w;
}

double
trapezoid_l2(const std::vector<double>& v, double h)
{
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    s += (i == 0 || i + 1 == v.size() ? 0.5 : 1.0) * v[i] * v[i];
  return s * h;
}

} // namespace

TEST_CASE("truncation level")
{
  CHECK(select_jn(1 << 16, 1, 1.0) == 6);
  CHECK(select_jn(1 << 16, 4, 1.0) == 2);
  CHECK(select_jn(1024, 1, 4.0) == 2);
  CHECK(select_jn(1 << 16, 2, 2.0) == select_jn(1 << 16, 4, 1.0));
  for (std::size_t n : { 2u, 100u, 5000u, 1u << 20 })
    CHECK(select_jn(n, 1, 4.0) == select_jn(n, 4, 1.0));
  CHECK_THROWS_AS(select_jn(1, 1, 1.0), PreconditionError);
}

TEST_CASE("estimator configuration checks")
{
  CHECK_THROWS_AS(EstimatorConfig(Wavelet::make(2), AutoLevel{ 1, 4.0 }), ConfigError);
  CHECK_THROWS_AS(EstimatorConfig(db4(), AutoLevel{ 0, 4.0 }), ConfigError);
  CHECK_THROWS_AS(EstimatorConfig(db4(), ManualLevel{ -1 }), ConfigError);
  CHECK_THROWS_AS(EstimatorConfig(db4(), ManualLevel{ 2 }, -1), ConfigError);
  const EstimatorConfig cfg(db4(), AutoLevel{ 4, 1.0 });
  CHECK(cfg.finest_level(1 << 16) == 2);
}

TEST_CASE("haar single point")
{
  const EstimatorConfig cfg(haar(), ManualLevel{ 0 });
  const std::vector<double> sample{ 0.0 };
  const DensityEstimate est = fit(sample, cfg);
  CHECK(est.n == 1);
  CHECK(est.alpha0.at(0) == 1.0);
  REQUIRE(est.beta_levels.size() == 1);
  CHECK(est.beta_levels[0].at(0) == 1.0);
  for (long long k = -5; k <= 5; ++k) {
    if (k == 0)
      continue;
    CHECK(est.alpha0.at(k) == 0.0);
    CHECK(est.beta_levels[0].at(k) == 0.0);
  }
  CHECK(evaluate(est, cfg, 0.25) == 2.0);
  CHECK(evaluate(est, cfg, 0.0) == 2.0);
  CHECK(evaluate(est, cfg, 0.49) == 2.0);
  CHECK(evaluate(est, cfg, 0.5) == 0.0);
  CHECK(evaluate(est, cfg, 0.75) == 0.0);
  CHECK(evaluate(est, cfg, -0.1) == 0.0);
  CHECK(evaluate(est, cfg, 1e6) == 0.0);
  CHECK(estimate_mass(est, cfg) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("coefficient ranges and bounds")
{
  std::mt19937_64 gen(5);
  std::normal_distribution<double> nd(0.0, 3.0);
  std::vector<double> sample(3000);
  for (auto& x : sample)
    x = nd(gen);
  const EstimatorConfig cfg(db4(), ManualLevel{ 3 });
  const DensityEstimate est = fit(sample, cfg);
  const auto& t = cfg.table();
  const double lo = *std::min_element(sample.begin(), sample.end());
  const double hi = *std::max_element(sample.begin(), sample.end());
  CHECK(est.alpha0.k_lo <= std::floor(lo) - t.support_length());
  CHECK(est.alpha0.k_hi >= std::ceil(hi));
  for (double v : est.alpha0.values)
    CHECK(std::abs(v) <= t.sup_abs(WaveletKind::phi) + 1e-12);
  for (const auto& b : est.beta_levels) {
    const double scale = std::sqrt(std::ldexp(1.0, b.level));
    CHECK(b.k_lo <= std::floor(std::ldexp(lo, b.level)) - t.support_hi(WaveletKind::psi));
    CHECK(b.k_hi >= std::ceil(std::ldexp(hi, b.level)) - t.support_lo(WaveletKind::psi));
    for (std::size_t i = 0; i < b.ks.size(); ++i) {
      CHECK(std::isfinite(b.values[i]));
      CHECK(std::abs(b.values[i]) <= scale * t.sup_abs(WaveletKind::psi) + 1e-12);
    }
  }
  // Coefficients outside the stored set are exactly zero: recompute a few
  // directly from the definition.
  for (long long k = est.beta_levels[2].k_lo - 3; k <= est.beta_levels[2].k_hi + 3; k += 7) {
    double acc = 0.0;
    for (double x : sample)
      acc += t.eval(WaveletKind::psi, 2, k, x);
    CHECK(est.beta_levels[2].at(k) == doctest::Approx(acc / sample.size()).epsilon(1e-12));
  }
}

TEST_CASE("standard normal sample")
{
  // A single estimate at this level has a pointwise standard deviation near
  // 0.029, so the average of 16 independent fits is compared instead.
  const EstimatorConfig cfg(db4(), ManualLevel{ 4 });
  double sum = 0.0;
  for (int r = 0; r < 16; ++r) {
    const auto e = sample_innovations(Gaussian{}, 1 << 14, 77 + r);
    const DensityEstimate est = fit(e, cfg);
    sum += evaluate(est, cfg, 0.0);
    CHECK(std::abs(estimate_mass(est, cfg) - 1.0) < 1e-3);
  }
  CHECK(std::abs(sum / 16 - 0.39894) < 0.02);
}

TEST_CASE("mass is one for several configurations")
{
  const auto c = sample_innovations(Cauchy{ 1.0 }, 2000, 1);
  const auto g = sample_innovations(ChiSquared{ 3 }, 2000, 2);
  for (int vm : { 1, 2, 4, 6 })
    for (int j : { 0, 2, 5 }) {
      const EstimatorConfig cfg(Wavelet::make(vm), ManualLevel{ j });
      CHECK(std::abs(estimate_mass(fit(c, cfg), cfg) - 1.0) < 1e-3);
      CHECK(std::abs(estimate_mass(fit(g, cfg), cfg) - 1.0) < 1e-3);
    }
}

TEST_CASE("fit ignores sample order")
{
  auto sample = sample_innovations(Stable{ 1.3, 1.0 }, 4000, 3);
  const EstimatorConfig cfg(db4(), ManualLevel{ 3 });
  const DensityEstimate a = fit(sample, cfg);
  std::mt19937 gen(9);
  std::shuffle(sample.begin(), sample.end(), gen);
  const DensityEstimate b = fit(sample, cfg);
  CHECK(a.alpha0.values == b.alpha0.values);
  for (std::size_t j = 0; j < a.beta_levels.size(); ++j) {
    CHECK(a.beta_levels[j].ks == b.beta_levels[j].ks);
    CHECK(a.beta_levels[j].values == b.beta_levels[j].values);
  }
}

TEST_CASE("adding a level adds its squared coefficients")
{
  const auto sample = sample_innovations(Gaussian{ 0.0, 1.5 }, 3000, 4);
  for (auto w : { haar(), db4() }) {
    const EstimatorConfig c2(w, ManualLevel{ 2 });
    const EstimatorConfig c3(w, ManualLevel{ 3 });
    const DensityEstimate e2 = fit(sample, c2);
    const DensityEstimate e3 = fit(sample, c3);
    const double lo = -12, hi = 12;
    const std::size_t n = (1u << 17) + 1;
    const double h = (hi - lo) / double(n - 1);
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i)
      xs[i] = lo + h * double(i);
    const auto f2 = evaluate_grid(e2, c2, xs);
    const auto f3 = evaluate_grid(e3, c3, xs);
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i)
      d[i] = f3[i] - f2[i];
    CHECK(std::abs(trapezoid_l2(d, h) - e3.beta_levels[3].sum_squares()) < 1e-6);
  }
}

TEST_CASE("grid evaluation")
{
  const EstimatorConfig cfg(haar(), ManualLevel{ 0 });
  const DensityEstimate est = fit(std::vector<double>{ 0.0 }, cfg);
  const std::vector<double> xs{ 0.25, 0.75, 3.0 };
  const auto v = evaluate_grid(est, cfg, xs);
  for (std::size_t i = 0; i < xs.size(); ++i)
    CHECK(v[i] == evaluate(est, cfg, xs[i]));
  CHECK(evaluate_grid(est, cfg, std::vector<double>{}).empty());

  const auto sample = sample_innovations(Gaussian{}, 2000, 8);
  const EstimatorConfig c4(db4(), ManualLevel{ 3 });
  const DensityEstimate e4 = fit(sample, c4);
  std::vector<double> grid;
  for (double x = -4; x <= 4; x += 0.0173)
    grid.push_back(x);
  const auto g = evaluate_grid(e4, c4, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(g[i] == evaluate(e4, c4, grid[i]));
}

TEST_CASE("symmetrized sample gives a symmetric estimate")
{
  auto sample = sample_innovations(Gaussian{}, 1500, 12);
  const std::size_t m = sample.size();
  for (std::size_t i = 0; i < m; ++i)
    sample.push_back(-sample[i]);
  const EstimatorConfig cfg(haar(), ManualLevel{ 4 });
  const DensityEstimate est = fit(sample, cfg);
  // Avoid dyadic points, where the right-continuous steps differ.
  double defect = 0.0;
  for (double x = 0.0013; x < 5.0; x += 0.0371)
    defect = std::max(defect, std::abs(evaluate(est, cfg, x) - evaluate(est, cfg, -x)));
  CHECK(defect < 1e-6);
}

TEST_CASE("invalid samples")
{
  const EstimatorConfig cfg(db4(), ManualLevel{ 1 });
  CHECK_THROWS_AS(fit(std::vector<double>{}, cfg), PreconditionError);
  CHECK_THROWS_AS(fit(std::vector<double>{ 1.0, NAN }, cfg), PreconditionError);
}
