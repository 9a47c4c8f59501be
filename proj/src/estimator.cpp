#include "waverate/estimator.hpp"

#include "waverate/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace waverate {

std::shared_ptr<const Wavelet>
Wavelet::make(int vm, int resolution, int iterations)
{
  auto w = std::make_shared<Wavelet>();
  w->filter = daubechies_filter(vm);
  w->table = cascade(w->filter, resolution, iterations);
  return w;
}

int
select_jn(std::size_t n, int M, double beta)
{
  if (n < 2 || M < 1 || !(beta > 0.0))
    throw PreconditionError("select_jn requires n >= 2, M >= 1 and beta > 0");
  const double smoothness = double(M) * beta;
  return static_cast<int>(std::ceil(std::log2(double(n)) / (2.0 * smoothness + 1.0)));
}

EstimatorConfig::EstimatorConfig(std::shared_ptr<const Wavelet> wavelet,
                                 LevelRule rule,
                                 int k_margin)
  : wavelet_(std::move(wavelet))
  , rule_(rule)
  , k_margin_(k_margin)
{
  std::vector<std::string> problems;
  if (!wavelet_)
    problems.push_back("estimator requires a wavelet");
  if (k_margin_ < 0)
    problems.push_back("k_margin must be >= 0");
  if (const auto* a = std::get_if<AutoLevel>(&rule_)) {
    if (a->M < 1)
      problems.push_back("auto j_n requires M >= 1");
    if (!(a->beta > 0.0))
      problems.push_back("auto j_n requires beta > 0");
    if (wavelet_ && a->M >= 1 && a->beta > 0.0 &&
        double(wavelet_->filter.vm) < std::ceil(a->M * a->beta))
      problems.push_back("wavelet vm >= ceil(M*beta) required (vm=" +
                         std::to_string(wavelet_->filter.vm) + ", M*beta=" +
                         std::to_string(a->M * a->beta) + ")");
  } else if (std::get<ManualLevel>(rule_).j < 0) {
    problems.push_back("manual j_n must be >= 0");
  }
  if (!problems.empty())
    throw ConfigError(std::move(problems));
}

int
EstimatorConfig::finest_level(std::size_t n) const
{
  if (const auto* a = std::get_if<AutoLevel>(&rule_))
    return select_jn(std::max<std::size_t>(n, 2), a->M, a->beta);
  return std::get<ManualLevel>(rule_).j;
}

double
CoefficientBlock::at(long long k) const
{
  const auto it = std::lower_bound(ks.begin(), ks.end(), k);
  if (it == ks.end() || *it != k)
    return 0.0;
  return values[static_cast<std::size_t>(it - ks.begin())];
}

double
CoefficientBlock::sum_squares() const
{
  long double acc = 0.0L;
  for (double v : values)
    acc += static_cast<long double>(v) * v;
  return static_cast<double>(acc);
}

namespace {

// Translations k with 2^j x - k inside [lo, hi].
inline void
covering(double x, int j, double lo, double hi, long long& first, long long& last)
{
  const double y = std::ldexp(x, j);
  first = static_cast<long long>(std::ceil(y - hi));
  last = static_cast<long long>(std::floor(y - lo));
}

CoefficientBlock
accumulate(std::span<const double> sorted,
           const DyadicTable& table,
           WaveletKind kind,
           int level,
           int margin)
{
  const double lo = table.support_lo(kind);
  const double hi = table.support_hi(kind);
  CoefficientBlock block;
  block.level = level;
  std::vector<long double> sums;

  // Sorted input makes the covering ranges monotone, so the tail of `ks`
  // is always contiguous over the current range.
  for (double x : sorted) {
    long long first, last;
    covering(x, level, lo, hi, first, last);
    for (long long k = first; k <= last; ++k) {
      const double v = table.eval(kind, level, k, x);
      if (!block.ks.empty() && k <= block.ks.back()) {
        const auto idx = block.ks.size() - 1 - static_cast<std::size_t>(block.ks.back() - k);
        sums[idx] += v;
      } else {
        block.ks.push_back(k);
        sums.push_back(v);
      }
    }
  }
  const long double n = static_cast<long double>(sorted.size());
  block.values.resize(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i)
    block.values[i] = static_cast<double>(sums[i] / n);

  long long first_lo, last_lo, first_hi, last_hi;
  covering(sorted.front(), level, lo, hi, first_lo, last_lo);
  covering(sorted.back(), level, lo, hi, first_hi, last_hi);
  block.k_lo = first_lo - margin;
  block.k_hi = last_hi + margin;
  return block;
}

double
block_value(const CoefficientBlock& block,
            const DyadicTable& table,
            WaveletKind kind,
            double x)
{
  if (block.ks.empty())
    return 0.0;
  long long first, last;
  covering(x, block.level, table.support_lo(kind), table.support_hi(kind), first, last);
  auto it = std::lower_bound(block.ks.begin(), block.ks.end(), first);
  double acc = 0.0;
  for (; it != block.ks.end() && *it <= last; ++it) {
    const auto idx = static_cast<std::size_t>(it - block.ks.begin());
    acc += block.values[idx] * table.eval(kind, block.level, *it, x);
  }
  return acc;
}

} // namespace

DensityEstimate
fit(std::span<const double> sample, const EstimatorConfig& config)
{
  if (sample.empty())
    throw PreconditionError("fit: sample must be non-empty");
  std::vector<double> sorted(sample.begin(), sample.end());
  for (double x : sorted)
    if (!std::isfinite(x))
      throw PreconditionError("fit: sample contains a non-finite value");
  std::sort(sorted.begin(), sorted.end());

  const DyadicTable& table = config.table();
  DensityEstimate est;
  est.n = sorted.size();
  est.jn = config.finest_level(est.n);
  est.alpha0 = accumulate(sorted, table, WaveletKind::phi, 0, config.k_margin());
  est.beta_levels.reserve(static_cast<std::size_t>(est.jn) + 1);
  for (int j = 0; j <= est.jn; ++j)
    est.beta_levels.push_back(accumulate(sorted, table, WaveletKind::psi, j, config.k_margin()));
  return est;
}

double
evaluate(const DensityEstimate& estimate, const EstimatorConfig& config, double x)
{
  const DyadicTable& table = config.table();
  double acc = block_value(estimate.alpha0, table, WaveletKind::phi, x);
  for (const auto& block : estimate.beta_levels)
    acc += block_value(block, table, WaveletKind::psi, x);
  return acc;
}

std::vector<double>
evaluate_grid(const DensityEstimate& estimate,
              const EstimatorConfig& config,
              std::span<const double> xs)
{
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    out[i] = evaluate(estimate, config, xs[i]);
  return out;
}

double
estimate_mass(const DensityEstimate& estimate, const EstimatorConfig& config)
{
  const DyadicTable& table = config.table();
  const double phi_integral = table.moment(WaveletKind::phi, 0);
  const double psi_integral = table.moment(WaveletKind::psi, 0);
  long double acc = 0.0L;
  for (double a : estimate.alpha0.values)
    acc += a * phi_integral;
  for (const auto& block : estimate.beta_levels) {
    const double scale = 1.0 / std::sqrt(std::ldexp(1.0, block.level));
    for (double b : block.values)
      acc += b * psi_integral * scale;
  }
  return static_cast<double>(acc);
}

} // namespace waverate
