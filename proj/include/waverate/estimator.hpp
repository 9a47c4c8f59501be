#pragma once

#include "waverate/wavelets.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <variant>
#include <vector>

namespace waverate {

//! Filter plus its sampled scaling function and wavelet.
struct Wavelet
{
  FilterPair filter;
  DyadicTable table;

  static std::shared_ptr<const Wavelet> make(int vm, int resolution = 10, int iterations = 12);
};

//! j_n = ceil(log2(n) / (2 M beta + 1)).
int
select_jn(std::size_t n, int M, double beta);

//! Truncation level chosen from (M, beta) and the sample size.
struct AutoLevel
{
  int M = 1;
  double beta = 1.0;
};
//! Fixed truncation level.
struct ManualLevel
{
  int j = 0;
};
using LevelRule = std::variant<AutoLevel, ManualLevel>;

class EstimatorConfig
{
public:
  //! Throws ConfigError when the rule is inconsistent with the wavelet
  //! (auto mode needs vm >= ceil(M beta)).
  EstimatorConfig(std::shared_ptr<const Wavelet> wavelet, LevelRule rule, int k_margin = 1);

  const Wavelet& wavelet() const { return *wavelet_; }
  const DyadicTable& table() const { return wavelet_->table; }
  const LevelRule& rule() const { return rule_; }
  int k_margin() const { return k_margin_; }
  int finest_level(std::size_t n) const;

private:
  std::shared_ptr<const Wavelet> wavelet_;
  LevelRule rule_;
  int k_margin_;
};

//! Coefficients of one family (phi_{0k} or psi_{jk}) at one level, stored
//! sparsely with sorted translation indices.
struct CoefficientBlock
{
  int level = 0;
  long long k_lo = 0; // active range, margin included
  long long k_hi = -1;
  std::vector<long long> ks;
  std::vector<double> values;

  //! Stored coefficient or 0.
  double at(long long k) const;
  double sum_squares() const;
};

struct DensityEstimate
{
  std::size_t n = 0;
  int jn = 0;
  CoefficientBlock alpha0;
  std::vector<CoefficientBlock> beta_levels; // levels 0..jn
};

//! Empirical coefficients alpha_0k = mean phi_0k(X_i), beta_jk = mean psi_jk(X_i)
//! for j = 0..j_n. The sample is sorted internally, so the result does not
//! depend on its order. Throws PreconditionError on an empty or non-finite
//! sample.
DensityEstimate
fit(std::span<const double> sample, const EstimatorConfig& config);

double
evaluate(const DensityEstimate& estimate, const EstimatorConfig& config, double x);

std::vector<double>
evaluate_grid(const DensityEstimate& estimate,
              const EstimatorConfig& config,
              std::span<const double> xs);

//! Integral of the estimate, term by term against the table quadrature.
double
estimate_mass(const DensityEstimate& estimate, const EstimatorConfig& config);

} // namespace waverate
