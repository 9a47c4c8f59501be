#pragma once

#include "waverate/chf.hpp"
#include "waverate/estimator.hpp"
#include "waverate/processes.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace waverate {

//! Trapezoid grid on [lo, hi] used for integrated squared errors.
struct QuadratureWindow
{
  double lo = -25.0;
  double hi = 25.0;
  std::size_t grid = (1u << 13) + 1;

  std::vector<double> nodes() const;
  double step() const { return (hi - lo) / double(grid - 1); }
};

//! int (fhat - f)^2 over the window from values tabulated on its nodes.
double
ise(std::span<const double> fhat, std::span<const double> ref, const QuadratureWindow& window);

double
ise(const std::function<double(double)>& fhat,
    const RefDensity& ref,
    const QuadratureWindow& window);

double
ise(const DensityEstimate& estimate,
    const EstimatorConfig& config,
    const RefDensity& ref,
    const QuadratureWindow& window);

//! How to build the estimator for an experiment.
struct EstimatorSpec
{
  int vm = 4;
  int resolution = 10;
  int iterations = 12;
  LevelRule rule = AutoLevel{ 1, 4.0 };
  int k_margin = 1;

  EstimatorConfig build() const;
};

struct ExperimentPlan
{
  std::string name;
  //! A reference scenario name, or "custom" with `process` set.
  std::string scenario;
  std::optional<ProcessConfig> process;
  std::vector<std::size_t> ns;
  int reps = 1;
  std::uint64_t seed = 0;
  EstimatorSpec estimator;
  QuadratureWindow quad;
  //! False when the scenario violates the summability condition of the
  //! convergence theorem; such plans carry no rate bound.
  bool theorem_applies = true;

  //! Throws ConfigError listing every violated invariant.
  void validate() const;
  ProcessConfig resolved_process() const;
  RefDensity reference() const;
};

//! Linear process of a named scenario.
ProcessConfig
scenario_process(std::string_view scenario);

//! Five full-scale (n = 2^16) plans followed by their desk variants
//! (n = 2^14, 10 replications), all with the 8-tap Daubechies wavelet.
std::vector<ExperimentPlan>
scenario_presets();

std::optional<ExperimentPlan>
find_preset(std::string_view name);

struct IseRecord
{
  std::size_t n = 0;
  int rep = 0;
  double ise = 0.0;
};

struct LevelSummary
{
  std::size_t n = 0;
  int reps = 0;
  double mean = 0.0;
  double std_error = 0.0;
};

struct ImseResult
{
  ExperimentPlan plan;
  std::vector<IseRecord> records; // ordered by (n index, rep)
  std::vector<LevelSummary> summary;
  //! Soft monotonicity check: mean ISE may not rise by more than two
  //! standard errors from one n to the next.
  std::vector<std::string> warnings;
};

struct RunOptions
{
  //! 0 selects WAVERATE_THREADS, falling back to the hardware count.
  unsigned threads = 0;
  //! Optional permutation of task indices controlling execution order.
  std::vector<std::size_t> execution_order;
};

unsigned
default_thread_count();

ImseResult
run_imse(const ExperimentPlan& plan, const RunOptions& options = {});

//! Aggregate raw records into per-n means and standard errors.
std::vector<LevelSummary>
summarize(std::span<const IseRecord> records);

struct RateFit
{
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double theoretical_slope = 0.0;
  double deviation = 0.0; // slope - theoretical_slope
  std::vector<std::size_t> used_ns;
  std::optional<std::size_t> excluded_n;
};

//! Least squares on (log2 n, log2 mean ISE). The smallest n is dropped when
//! its relative standard error exceeds 25% and at least three sizes remain.
//! Throws PreconditionError with fewer than three distinct n.
RateFit
fit_rate(std::span<const LevelSummary> summary, int M, double beta);

RateFit
fit_rate(const ImseResult& result, int M, double beta);

//! Estimate whose coefficients are the true alpha_0k and beta_jk of `ref`
//! for j <= jn, over the translations that meet the window.
DensityEstimate
true_coefficients(const RefDensity& ref,
                  const EstimatorConfig& config,
                  int jn,
                  const QuadratureWindow& window);

struct ErrorDecomposition
{
  double i1 = 0.0;   // sum (alpha_hat - alpha)^2
  double i2 = 0.0;   // sum_{j<=jn} (beta_hat - beta)^2
  double i3 = 0.0;   // sum_{jn<j<=j_tail} beta^2
  double ise = 0.0;  // quadrature ISE on the window
  double residual = 0.0;
  double relative_residual = 0.0;
  //! Geometric extrapolation of the levels beyond j_tail.
  double tail_estimate = 0.0;
};

ErrorDecomposition
decompose_error(const DensityEstimate& estimate,
                const EstimatorConfig& config,
                const RefDensity& ref,
                int jn,
                int j_tail,
                const QuadratureWindow& window = {});

struct FigurePanel
{
  std::string scenario;
  std::vector<double> x;
  std::vector<double> fhat;
  std::vector<double> ftrue;
};

//! fig1: gaussian innovations, fig2: cauchy innovations (d = -0.5 and
//! -1.5), fig3: chi-squared MA(4). One path of length n per panel.
std::vector<FigurePanel>
figure_panels(std::string_view name, std::size_t n, std::uint64_t seed, std::size_t points = 601);

} // namespace waverate
