#pragma once

#include "waverate/processes.hpp"

#include <complex>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace waverate {

using Complex = std::complex<double>;

constexpr double kInversionHalfWidth = 50.0;
constexpr std::size_t kInversionGrid = (1u << 16) + 1;

//! Exact characteristic function E exp(i u e).
Complex
innovation_cf(const InnovationDist& dist, double u);

//! 1 - |phi_e(u)|^2 without cancellation at small u.
double
one_minus_modulus_squared(const InnovationDist& dist, double u);

//! prod_{i<T} phi_e(a_i u), evaluated factor by factor; stops once the
//! running modulus drops below 1e-300.
Complex
process_cf(const ProcessConfig& config, double u);

//! A characteristic function together with where it came from.
class CharFn
{
public:
  enum class Provenance
  {
    innovation,
    process
  };

  static CharFn innovation(InnovationDist dist);
  //! For the gaussian, cauchy and stable families the factors combine into
  //! a single exponential of the power sums of |a_i|, which is evaluated
  //! directly; other families use the factor-by-factor product.
  static CharFn process(const ProcessConfig& config);

  Complex operator()(double u) const { return eval_(u); }
  Provenance provenance() const { return provenance_; }
  const std::string& label() const { return label_; }

private:
  CharFn(std::function<Complex(double)> eval, Provenance p, std::string label)
    : eval_(std::move(eval))
    , provenance_(p)
    , label_(std::move(label))
  {}

  std::function<Complex(double)> eval_;
  Provenance provenance_;
  std::string label_;
};

struct InversionResult
{
  double density = 0.0;
  //! Imaginary part of the quadrature; zero for an exact real density.
  double imag_residue = 0.0;
};

//! (1/2pi) int_{-L}^{L} e^{-iux} phi(u) du by the trapezoid rule on `grid`
//! nodes. Throws InsufficientDomain if |phi(+-L)| >= 1e-8.
InversionResult
invert_cf_density(const CharFn& cf,
                  double x,
                  double half_width = kInversionHalfWidth,
                  std::size_t grid = kInversionGrid);

//! Vectorized inversion; phi is evaluated once per node.
std::vector<InversionResult>
invert_cf_density(const CharFn& cf,
                  std::span<const double> xs,
                  double half_width = kInversionHalfWidth,
                  std::size_t grid = kInversionGrid);

class RefDensity
{
public:
  enum class Kind
  {
    closed_form,
    cf_inversion
  };

  RefDensity(std::function<double(double)> f, Kind kind, std::string name)
    : f_(std::move(f))
    , kind_(kind)
    , name_(std::move(name))
  {}

  double operator()(double x) const { return f_(x); }
  std::vector<double> operator()(std::span<const double> xs) const;
  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }

private:
  friend RefDensity inverted_density(const ProcessConfig&, double, std::size_t);

  std::function<double(double)> f_;
  std::function<std::vector<double>(std::span<const double>)> batch_;
  Kind kind_;
  std::string name_;
};

//! Names accepted by reference_density.
const std::vector<std::string>&
reference_scenarios();

//! Closed-form density of a named scenario: gauss_d05, gauss_d15,
//! cauchy_d05, cauchy_d15, chisq_ma4. Throws DomainError otherwise.
RefDensity
reference_density(std::string_view scenario);

//! Density obtained by inverting the process characteristic function.
//! Values are tabulated lazily per call; prefer the span overload of
//! RefDensity for grids.
RefDensity
inverted_density(const ProcessConfig& config,
                 double half_width = kInversionHalfWidth,
                 std::size_t grid = kInversionGrid);

// Integrability and gamma-condition audits -----------------------------------

struct IntegrabilityAudit
{
  double beta = 0.0;
  double half_width = 0.0;
  std::size_t grid = 0;
  double sup = 0.0;          // sup |u^beta phi_e(u)| on [-L, L]
  double sup_half = 0.0;     // same on [-L/2, L/2]
  double integral = 0.0;     // int_{-L}^{L} |u^beta phi_e(u)| du
  double integral_half = 0.0;
  double growth_ratio = 0.0; // integral / integral_half
  bool bounded = false;
  bool integrable = false;
  bool pass = false;
};

constexpr double kDivergenceRatio = 1.05;

//! Numerical check that u^beta phi_e(u) is in L1 and L-infinity.
IntegrabilityAudit
audit_integrability(const InnovationDist& dist,
                    double beta,
                    double half_width = 200.0,
                    std::size_t grid = (1u << 18) + 1);

struct GammaConditionAudit
{
  double gamma = 0.0;
  std::vector<double> lambdas;
  double sup_ratio = 0.0;         // sup r(l) on the supplied grid
  double sup_ratio_refined = 0.0; // sup r(l) after refinement toward 0
  double constant = 0.0;          // empirical c
  bool pass = false;
};

//! r(l) = (1 - |phi_e(l)|^2) / (|l|^{2 gamma} ^ 1) on the grid and on a
//! refinement of it (midpoints plus points geometrically closer to 0).
GammaConditionAudit
audit_gamma_condition(const InnovationDist& dist,
                      double gamma,
                      std::span<const double> lambdas);

//! Log-spaced default grid on [1e-4, 100], symmetric.
std::vector<double>
default_lambda_grid();

} // namespace waverate
