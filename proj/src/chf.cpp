#include "waverate/chf.hpp"

#include "waverate/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace waverate {

namespace {

template<class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};
template<class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

} // namespace

Complex
innovation_cf(const InnovationDist& dist, double u)
{
  return std::visit(
    overloaded{
      [u](const Gaussian& g) {
        return std::exp(Complex(-0.5 * g.sigma * g.sigma * u * u, g.mu * u));
      },
      [u](const Cauchy& c) { return Complex(std::exp(-c.scale * std::fabs(u)), 0.0); },
      [u](const Stable& s) {
        return Complex(std::exp(-std::pow(std::fabs(s.scale * u), s.alpha)), 0.0);
      },
      // Principal branch; 1 - 2iu never crosses the negative real axis.
      [u](const ChiSquared& c) {
        return std::exp(-0.5 * c.df * std::log(Complex(1.0, -2.0 * u)));
      },
      [u](const GammaDist& g) {
        return std::exp(-g.shape * std::log(Complex(1.0, -g.theta * u)));
      },
    },
    dist);
}

double
one_minus_modulus_squared(const InnovationDist& dist, double u)
{
  return std::visit(
    overloaded{
      [u](const Gaussian& g) { return -std::expm1(-g.sigma * g.sigma * u * u); },
      [u](const Cauchy& c) { return -std::expm1(-2.0 * c.scale * std::fabs(u)); },
      [u](const Stable& s) {
        return -std::expm1(-2.0 * std::pow(std::fabs(s.scale * u), s.alpha));
      },
      [u](const ChiSquared& c) {
        return -std::expm1(-0.5 * c.df * std::log1p(4.0 * u * u));
      },
      [u](const GammaDist& g) {
        return -std::expm1(-g.shape * std::log1p(g.theta * g.theta * u * u));
      },
    },
    dist);
}

Complex
process_cf(const ProcessConfig& config, double u)
{
  Complex acc = 1.0;
  for (double a : config.coeffs.values()) {
    acc *= innovation_cf(config.innovation, a * u);
    if (std::abs(acc) < 1e-300)
      break;
  }
  return acc;
}

CharFn
CharFn::innovation(InnovationDist dist)
{
  validate(dist);
  std::string label = describe(dist);
  return CharFn([dist = std::move(dist)](double u) { return innovation_cf(dist, u); },
                Provenance::innovation,
                std::move(label));
}

CharFn
CharFn::process(const ProcessConfig& config)
{
  std::string label = config.coeffs.describe() + " / " + describe(config.innovation);
  const auto a = config.coeffs.values();
  auto power_sum = [&a](double p) {
    long double acc = 0.0L;
    for (double v : a)
      acc += std::pow(std::fabs(static_cast<long double>(v)), static_cast<long double>(p));
    return static_cast<double>(acc);
  };

  if (const auto* g = std::get_if<Gaussian>(&config.innovation)) {
    long double first = 0.0L;
    for (double v : a)
      first += v;
    const double s1 = static_cast<double>(first);
    const double s2 = power_sum(2.0);
    const double mu = g->mu;
    const double var = g->sigma * g->sigma;
    return CharFn(
      [=](double u) { return std::exp(Complex(-0.5 * var * s2 * u * u, mu * s1 * u)); },
      Provenance::process,
      std::move(label));
  }
  if (const auto* c = std::get_if<Cauchy>(&config.innovation)) {
    const double scale = c->scale * power_sum(1.0);
    return CharFn([=](double u) { return Complex(std::exp(-scale * std::fabs(u)), 0.0); },
                  Provenance::process,
                  std::move(label));
  }
  if (const auto* s = std::get_if<Stable>(&config.innovation)) {
    const double alpha = s->alpha;
    const double weight = std::pow(s->scale, alpha) * power_sum(alpha);
    return CharFn(
      [=](double u) {
        return Complex(std::exp(-weight * std::pow(std::fabs(u), alpha)), 0.0);
      },
      Provenance::process,
      std::move(label));
  }
  return CharFn([config](double u) { return process_cf(config, u); },
                Provenance::process,
                std::move(label));
}

namespace {

struct Nodes
{
  std::vector<double> u;
  std::vector<Complex> phi;
  double step = 0.0;
};

Nodes
tabulate_cf(const CharFn& cf, double half_width, std::size_t grid)
{
  if (!(half_width > 0.0) || grid < 3)
    throw PreconditionError("inversion requires L > 0 and at least 3 nodes");
  const double edge = std::max(std::abs(cf(half_width)), std::abs(cf(-half_width)));
  if (!(edge < 1e-8)) {
    std::ostringstream os;
    os << "characteristic function has |phi(+-L)| = " << edge
       << " >= 1e-8 at L = " << half_width << "; enlarge the inversion domain";
    throw InsufficientDomain(os.str(), edge);
  }
  Nodes nodes;
  nodes.step = 2.0 * half_width / double(grid - 1);
  nodes.u.resize(grid);
  nodes.phi.resize(grid);
  for (std::size_t m = 0; m < grid; ++m) {
    nodes.u[m] = -half_width + double(m) * nodes.step;
    const double w = (m == 0 || m + 1 == grid) ? 0.5 : 1.0;
    nodes.phi[m] = w * cf(nodes.u[m]);
  }
  return nodes;
}

InversionResult
invert_on(const Nodes& nodes, double x)
{
  long double re = 0.0L, im = 0.0L;
  for (std::size_t m = 0; m < nodes.u.size(); ++m) {
    const Complex term = nodes.phi[m] * std::polar(1.0, -nodes.u[m] * x);
    re += term.real();
    im += term.imag();
  }
  const double scale = nodes.step / kTwoPi;
  return { static_cast<double>(re) * scale, static_cast<double>(im) * scale };
}

} // namespace

InversionResult
invert_cf_density(const CharFn& cf, double x, double half_width, std::size_t grid)
{
  return invert_on(tabulate_cf(cf, half_width, grid), x);
}

std::vector<InversionResult>
invert_cf_density(const CharFn& cf,
                  std::span<const double> xs,
                  double half_width,
                  std::size_t grid)
{
  std::vector<InversionResult> out;
  out.reserve(xs.size());
  if (xs.empty())
    return out;
  const Nodes nodes = tabulate_cf(cf, half_width, grid);
  for (double x : xs)
    out.push_back(invert_on(nodes, x));
  return out;
}

std::vector<double>
RefDensity::operator()(std::span<const double> xs) const
{
  std::vector<double> out(xs.size());
  if (batch_) {
    out = batch_(xs);
    return out;
  }
  for (std::size_t i = 0; i < xs.size(); ++i)
    out[i] = f_(xs[i]);
  return out;
}

const std::vector<std::string>&
reference_scenarios()
{
  static const std::vector<std::string> names = {
    "gauss_d05", "gauss_d15", "cauchy_d05", "cauchy_d15", "chisq_ma4"
  };
  return names;
}

namespace {

RefDensity
normal_density(double variance, std::string name)
{
  const double norm = 1.0 / std::sqrt(kTwoPi * variance);
  return RefDensity(
    [=](double x) { return norm * std::exp(-x * x / (2.0 * variance)); },
    RefDensity::Kind::closed_form,
    std::move(name));
}

RefDensity
cauchy_density(double scale, std::string name)
{
  return RefDensity(
    [=](double x) {
      const double z = x / scale;
      return 1.0 / (std::numbers::pi * scale * (1.0 + z * z));
    },
    RefDensity::Kind::closed_form,
    std::move(name));
}

} // namespace

RefDensity
reference_density(std::string_view scenario)
{
  if (scenario == "gauss_d05")
    return normal_density(closed_form_A2(-0.5), "gauss_d05");
  if (scenario == "gauss_d15")
    return normal_density(closed_form_A2(-1.5), "gauss_d15");
  if (scenario == "cauchy_d05")
    return cauchy_density(1.99822, "cauchy_d05");
  if (scenario == "cauchy_d15")
    return cauchy_density(3.0, "cauchy_d15");
  if (scenario == "chisq_ma4") {
    // chi-squared with 24 degrees of freedom: gamma(shape 12, scale 2).
    const double log_norm = -12.0 * std::log(2.0) - std::lgamma(12.0);
    return RefDensity(
      [=](double x) {
        if (x <= 0.0)
          return 0.0;
        return std::exp(log_norm + 11.0 * std::log(x) - 0.5 * x);
      },
      RefDensity::Kind::closed_form,
      "chisq_ma4");
  }
  throw DomainError("unknown scenario '" + std::string(scenario) + "'");
}

RefDensity
inverted_density(const ProcessConfig& config, double half_width, std::size_t grid)
{
  const CharFn cf = CharFn::process(config);
  RefDensity ref(
    [=](double x) { return invert_cf_density(cf, x, half_width, grid).density; },
    RefDensity::Kind::cf_inversion,
    "cf_inversion:" + cf.label());
  ref.batch_ = [=](std::span<const double> xs) {
    std::vector<double> out;
    out.reserve(xs.size());
    for (const auto& r : invert_cf_density(cf, xs, half_width, grid))
      out.push_back(r.density);
    return out;
  };
  return ref;
}

// Audits -----------------------------------------------------------------------

IntegrabilityAudit
audit_integrability(const InnovationDist& dist,
                    double beta,
                    double half_width,
                    std::size_t grid)
{
  if (!(beta >= 0.0))
    throw DomainError("audit_integrability: beta must be >= 0");
  if (!(half_width > 0.0))
    throw DomainError("audit_integrability: L must be positive");
  validate(dist);
  // Node count 4m + 1 so that +-L/2 are nodes.
  grid = std::max<std::size_t>(grid, 5);
  grid = ((grid - 1 + 3) / 4) * 4 + 1;

  IntegrabilityAudit out;
  out.beta = beta;
  out.half_width = half_width;
  out.grid = grid;

  const std::size_t centre = (grid - 1) / 2;
  const std::size_t quarter = (grid - 1) / 4;
  const double step = 2.0 * half_width / double(grid - 1);
  long double full = 0.0L, half = 0.0L;
  for (std::size_t m = 0; m < grid; ++m) {
    const double u = -half_width + double(m) * step;
    const double value = std::pow(std::fabs(u), beta) * std::abs(innovation_cf(dist, u));
    const std::size_t dist_from_centre = m > centre ? m - centre : centre - m;
    out.sup = std::max(out.sup, value);
    if (dist_from_centre <= quarter)
      out.sup_half = std::max(out.sup_half, value);
    full += (m == 0 || m + 1 == grid) ? 0.5L * value : value;
    if (dist_from_centre < quarter)
      half += value;
    else if (dist_from_centre == quarter)
      half += 0.5L * value;
  }
  out.integral = static_cast<double>(full) * step;
  out.integral_half = static_cast<double>(half) * step;
  out.growth_ratio = out.integral_half > 0.0 ? out.integral / out.integral_half : 1.0;
  out.bounded = std::isfinite(out.sup) &&
                (out.sup_half > 0.0 ? out.sup / out.sup_half <= kDivergenceRatio
                                    : out.sup == 0.0);
  out.integrable = std::isfinite(out.integral) && out.growth_ratio <= kDivergenceRatio;
  out.pass = out.bounded && out.integrable;
  return out;
}

namespace {

double
gamma_ratio(const InnovationDist& dist, double gamma, double lambda)
{
  const double a = std::fabs(lambda);
  if (a == 0.0)
    return 0.0;
  const double denom = std::min(std::pow(a, 2.0 * gamma), 1.0);
  return one_minus_modulus_squared(dist, lambda) / denom;
}

} // namespace

GammaConditionAudit
audit_gamma_condition(const InnovationDist& dist,
                      double gamma,
                      std::span<const double> lambdas)
{
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw DomainError("audit_gamma_condition: gamma must lie in (0, 1]");
  validate(dist);
  GammaConditionAudit out;
  out.gamma = gamma;
  out.lambdas.assign(lambdas.begin(), lambdas.end());

  std::vector<double> mags;
  for (double l : lambdas) {
    const double r = gamma_ratio(dist, gamma, l);
    out.sup_ratio = std::max(out.sup_ratio, r);
    if (l != 0.0)
      mags.push_back(std::fabs(l));
  }
  std::sort(mags.begin(), mags.end());
  mags.erase(std::unique(mags.begin(), mags.end()), mags.end());

  out.sup_ratio_refined = out.sup_ratio;
  for (std::size_t i = 0; i + 1 < mags.size(); ++i) {
    const double mid = 0.5 * (mags[i] + mags[i + 1]);
    out.sup_ratio_refined = std::max(out.sup_ratio_refined, gamma_ratio(dist, gamma, mid));
  }
  if (!mags.empty()) {
    double l = mags.front();
    for (int k = 0; k < 40; ++k) {
      l *= 0.5;
      out.sup_ratio_refined = std::max(out.sup_ratio_refined, gamma_ratio(dist, gamma, l));
    }
  }
  out.constant = out.sup_ratio_refined;
  out.pass = std::isfinite(out.sup_ratio_refined) && out.sup_ratio > 0.0 &&
             out.sup_ratio_refined <= kDivergenceRatio * out.sup_ratio;
  return out;
}

std::vector<double>
default_lambda_grid()
{
  std::vector<double> out;
  const int count = 401;
  for (int i = 0; i < count; ++i) {
    const double l = std::pow(10.0, -4.0 + 6.0 * i / (count - 1));
    out.push_back(-l);
    out.push_back(l);
  }
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace waverate
