#pragma once

#include "waverate/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace waverate {

constexpr std::size_t kDefaultTruncation = 100001;

// Coefficient families --------------------------------------------------------

//! a_i = Gamma(i + d) / (Gamma(d) Gamma(i + 1)).
struct Fractional
{
  double d = 0.0;
};
//! a_i = rho^i.
struct Geometric
{
  double rho = 0.0;
};
//! Finite moving average with the given taps.
struct MovingAverage
{
  std::vector<double> taps;
};
//! Arbitrary finite tap list.
struct Custom
{
  std::vector<double> taps;
};

using CoefficientKind = std::variant<Fractional, Geometric, MovingAverage, Custom>;

//! Coefficient sequence a_0, a_1, ... of a causal linear process. Infinite
//! families are truncated after `truncation` terms.
class CoefficientSeq
{
public:
  static CoefficientSeq fractional(double d, std::size_t truncation = kDefaultTruncation);
  static CoefficientSeq geometric(double rho, std::size_t truncation = kDefaultTruncation);
  static CoefficientSeq moving_average(std::vector<double> taps);
  static CoefficientSeq custom(std::vector<double> taps);

  const CoefficientKind& kind() const { return kind_; }
  bool is_finite() const;
  //! T for infinite families, the tap count otherwise.
  std::size_t length() const { return values_->size(); }
  std::size_t truncation() const { return length(); }
  //! Number of non-zero coefficients among the retained terms.
  std::size_t nonzero_count() const;

  //! a_i. Throws OutOfRange for i >= T on infinite families; finite
  //! families return 0 past their last tap.
  double coeff(std::size_t i) const;
  std::span<const double> values() const { return *values_; }

  std::string describe() const;

private:
  CoefficientSeq(CoefficientKind kind, std::vector<double> values);

  CoefficientKind kind_;
  std::shared_ptr<const std::vector<double>> values_;
};

//! sum_{i<T} |a_i|^p with long double accumulation. Requires 0 < gamma <= 1
//! and p >= gamma.
double
sum_abs_pow(const CoefficientSeq& seq, double gamma, double p);

//! Gamma(1 - 2d) / Gamma(1 - d)^2, the closed form of sum a_i^2 for the
//! fractional family.
double
closed_form_A2(double d);

// Innovation distributions ---------------------------------------------------

struct Gaussian
{
  double mu = 0.0;
  double sigma = 1.0;
};
struct Cauchy
{
  double scale = 1.0;
};
//! Symmetric alpha-stable with characteristic function exp(-|scale u|^alpha).
struct Stable
{
  double alpha = 2.0;
  double scale = 1.0;
};
struct ChiSquared
{
  int df = 1;
};
//! Shape k, scale theta.
struct GammaDist
{
  double shape = 1.0;
  double theta = 1.0;
};

using InnovationDist = std::variant<Gaussian, Cauchy, Stable, ChiSquared, GammaDist>;

//! Throws DomainError when parameters are outside their valid ranges.
void
validate(const InnovationDist& dist);

std::string
describe(const InnovationDist& dist);

//! Exponent gamma in E|e^{i l e} - phi(l)|^2 <= c (|l|^{2 gamma} ^ 1)
//! recorded for each family: 1 gaussian, alpha/2 stable (1/2 for Cauchy),
//! 1/2 chi-squared and gamma.
double
condition_gamma(const InnovationDist& dist);

std::vector<double>
sample_innovations(const InnovationDist& dist, std::size_t count, std::uint64_t seed);

//! Fill `out` with i.i.d. draws from `rng`.
void
sample_innovations(const InnovationDist& dist, CounterRng& rng, std::span<double> out);

// Linear process -------------------------------------------------------------

struct ProcessConfig
{
  CoefficientSeq coeffs;
  InnovationDist innovation;
  std::size_t burn_in = 0;

  //! burn_in defaults to the coefficient length.
  ProcessConfig(CoefficientSeq coeffs,
                InnovationDist innovation,
                std::size_t burn_in = 0);
};

struct SamplePath
{
  std::vector<double> values;
  std::uint64_t seed = 0;
  ProcessConfig config;
};

//! X_t = sum_{i<T} a_i e_{t-i} by direct convolution; the first burn_in
//! innovations only feed the memory of the filter.
SamplePath
gen_path(const ProcessConfig& config, std::size_t n, std::uint64_t seed);

//! Same, on an explicit stream.
SamplePath
gen_path(const ProcessConfig& config, std::size_t n, StreamKey key);

} // namespace waverate
