#include "waverate/processes.hpp"

#include "waverate/error.hpp"

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

bool
is_integer(double x)
{
  return std::floor(x) == x;
}

void
check_fractional(double d)
{
  if (!(d < 0.5))
    throw DomainError("fractional requires d < 1/2");
  if (is_integer(d))
    throw DomainError("fractional requires d not an integer");
}

void
check_taps(const std::vector<double>& taps)
{
  if (taps.empty())
    throw DomainError("coefficient taps must be non-empty");
  if (taps.front() == 0.0)
    throw DomainError("a_0 must be non-zero");
  for (double t : taps)
    if (!std::isfinite(t))
      throw DomainError("coefficient taps must be finite");
}

} // namespace

CoefficientSeq::CoefficientSeq(CoefficientKind kind, std::vector<double> values)
  : kind_(std::move(kind))
  , values_(std::make_shared<const std::vector<double>>(std::move(values)))
{}

CoefficientSeq
CoefficientSeq::fractional(double d, std::size_t truncation)
{
  check_fractional(d);
  if (truncation == 0)
    throw DomainError("truncation must be positive");
  std::vector<double> a(truncation);
  long double cur = 1.0L;
  a[0] = 1.0;
  for (std::size_t i = 1; i < truncation; ++i) {
    cur *= (static_cast<long double>(i) - 1.0L + d) / static_cast<long double>(i);
    a[i] = static_cast<double>(cur);
  }
  return CoefficientSeq(Fractional{ d }, std::move(a));
}

CoefficientSeq
CoefficientSeq::geometric(double rho, std::size_t truncation)
{
  if (!(std::fabs(rho) < 1.0))
    throw DomainError("geometric requires |rho| < 1");
  if (truncation == 0)
    throw DomainError("truncation must be positive");
  std::vector<double> a(truncation);
  long double cur = 1.0L;
  for (std::size_t i = 0; i < truncation; ++i) {
    a[i] = static_cast<double>(cur);
    cur *= rho;
  }
  return CoefficientSeq(Geometric{ rho }, std::move(a));
}

CoefficientSeq
CoefficientSeq::moving_average(std::vector<double> taps)
{
  check_taps(taps);
  auto copy = taps;
  return CoefficientSeq(MovingAverage{ std::move(taps) }, std::move(copy));
}

CoefficientSeq
CoefficientSeq::custom(std::vector<double> taps)
{
  check_taps(taps);
  auto copy = taps;
  return CoefficientSeq(Custom{ std::move(taps) }, std::move(copy));
}

bool
CoefficientSeq::is_finite() const
{
  return std::holds_alternative<MovingAverage>(kind_) ||
         std::holds_alternative<Custom>(kind_);
}

std::size_t
CoefficientSeq::nonzero_count() const
{
  std::size_t count = 0;
  for (double v : *values_)
    count += v != 0.0;
  return count;
}

double
CoefficientSeq::coeff(std::size_t i) const
{
  if (i < values_->size())
    return (*values_)[i];
  if (is_finite())
    return 0.0;
  throw OutOfRange("coefficient index " + std::to_string(i) +
                   " beyond truncation " + std::to_string(values_->size()));
}

std::string
CoefficientSeq::describe() const
{
  std::ostringstream os;
  std::visit(overloaded{
               [&](const Fractional& f) { os << "fractional(d=" << f.d << ")"; },
               [&](const Geometric& g) { os << "geometric(rho=" << g.rho << ")"; },
               [&](const MovingAverage& m) { os << "ma(" << m.taps.size() << " taps)"; },
               [&](const Custom& c) { os << "custom(" << c.taps.size() << " taps)"; },
             },
             kind_);
  os << " T=" << length();
  return os.str();
}

double
sum_abs_pow(const CoefficientSeq& seq, double gamma, double p)
{
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw DomainError("sum_abs_pow: gamma must lie in (0, 1]");
  if (!(p >= gamma))
    throw DomainError("sum_abs_pow: p must be >= gamma");
  long double acc = 0.0L;
  for (double a : seq.values())
    acc += std::pow(std::fabs(static_cast<long double>(a)), static_cast<long double>(p));
  return static_cast<double>(acc);
}

double
closed_form_A2(double d)
{
  check_fractional(d);
  if (d == 0.0)
    return 1.0;
  return std::exp(std::lgamma(1.0 - 2.0 * d) - 2.0 * std::lgamma(1.0 - d));
}

// Innovations ----------------------------------------------------------------

void
validate(const InnovationDist& dist)
{
  std::visit(overloaded{
               [](const Gaussian& g) {
                 if (!std::isfinite(g.mu) || !(g.sigma > 0.0) || !std::isfinite(g.sigma))
                   throw DomainError("gaussian requires finite mu and sigma > 0");
               },
               [](const Cauchy& c) {
                 if (!(c.scale > 0.0) || !std::isfinite(c.scale))
                   throw DomainError("cauchy requires scale > 0");
               },
               [](const Stable& s) {
                 if (!(s.alpha > 0.0 && s.alpha <= 2.0))
                   throw DomainError("stable requires 0 < alpha <= 2");
                 if (!(s.scale > 0.0) || !std::isfinite(s.scale))
                   throw DomainError("stable requires scale > 0");
               },
               [](const ChiSquared& c) {
                 if (c.df < 1)
                   throw DomainError("chi_squared requires df >= 1");
               },
               [](const GammaDist& g) {
                 if (!(g.shape > 0.0) || !(g.theta > 0.0) || !std::isfinite(g.shape) ||
                     !std::isfinite(g.theta))
                   throw DomainError("gamma requires shape > 0 and theta > 0");
               },
             },
             dist);
}

std::string
describe(const InnovationDist& dist)
{
  std::ostringstream os;
  std::visit(overloaded{
               [&](const Gaussian& g) { os << "gaussian(" << g.mu << "," << g.sigma << ")"; },
               [&](const Cauchy& c) { os << "cauchy(" << c.scale << ")"; },
               [&](const Stable& s) { os << "stable(" << s.alpha << "," << s.scale << ")"; },
               [&](const ChiSquared& c) { os << "chi_squared(" << c.df << ")"; },
               [&](const GammaDist& g) { os << "gamma(" << g.shape << "," << g.theta << ")"; },
             },
             dist);
  return os.str();
}

double
condition_gamma(const InnovationDist& dist)
{
  return std::visit(overloaded{
                      [](const Gaussian&) { return 1.0; },
                      [](const Cauchy&) { return 0.5; },
                      [](const Stable& s) { return s.alpha / 2.0; },
                      [](const ChiSquared&) { return 0.5; },
                      [](const GammaDist&) { return 0.5; },
                    },
                    dist);
}

namespace {

// Box-Muller, both outputs used.
class NormalSource
{
public:
  explicit NormalSource(CounterRng& rng)
    : rng_(rng)
  {}

  double next()
  {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(rng_.uniform()));
    const double theta = 2.0 * std::numbers::pi * rng_.uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  CounterRng& rng() { return rng_; }

private:
  CounterRng& rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Marsaglia-Tsang with the u^{1/k} boost for shape < 1.
double
gamma_variate(NormalSource& normal, double shape, double theta)
{
  if (shape < 1.0) {
    const double boost = std::pow(normal.rng().uniform(), 1.0 / shape);
    return gamma_variate(normal, shape + 1.0, theta) * boost;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = normal.next();
    double v = 1.0 + c * x;
    if (v <= 0.0)
      continue;
    v = v * v * v;
    const double u = normal.rng().uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v))
      return d * v * theta;
  }
}

// Chambers-Mallows-Stuck, symmetric case.
double
stable_variate(CounterRng& rng, double alpha, double scale)
{
  const double v = std::numbers::pi * (rng.uniform() - 0.5);
  const double w = -std::log(rng.uniform());
  if (alpha == 1.0)
    return scale * std::tan(v);
  const double s = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha);
  const double t = std::pow(std::cos(v - alpha * v) / w, (1.0 - alpha) / alpha);
  return scale * s * t;
}

} // namespace

void
sample_innovations(const InnovationDist& dist, CounterRng& rng, std::span<double> out)
{
  validate(dist);
  NormalSource normal(rng);
  std::visit(overloaded{
               [&](const Gaussian& g) {
                 for (double& x : out)
                   x = g.mu + g.sigma * normal.next();
               },
               [&](const Cauchy& c) {
                 for (double& x : out)
                   x = c.scale * std::tan(std::numbers::pi * (rng.uniform() - 0.5));
               },
               [&](const Stable& s) {
                 for (double& x : out)
                   x = stable_variate(rng, s.alpha, s.scale);
               },
               [&](const ChiSquared& c) {
                 for (double& x : out)
                   x = gamma_variate(normal, c.df / 2.0, 2.0);
               },
               [&](const GammaDist& g) {
                 for (double& x : out)
                   x = gamma_variate(normal, g.shape, g.theta);
               },
             },
             dist);
}

std::vector<double>
sample_innovations(const InnovationDist& dist, std::size_t count, std::uint64_t seed)
{
  if (count == 0)
    throw PreconditionError("sample_innovations: count must be >= 1");
  std::vector<double> out(count);
  CounterRng rng(seed, 0, StreamRole::innovations);
  sample_innovations(dist, rng, out);
  return out;
}

// Linear process -------------------------------------------------------------

ProcessConfig::ProcessConfig(CoefficientSeq coeffs_in,
                             InnovationDist innovation_in,
                             std::size_t burn_in_in)
  : coeffs(std::move(coeffs_in))
  , innovation(std::move(innovation_in))
  , burn_in(burn_in_in == 0 ? coeffs.length() : burn_in_in)
{
  validate(innovation);
  if (burn_in + 1 < coeffs.length())
    throw DomainError("burn_in must cover the truncated memory (burn_in >= T - 1)");
}

namespace {

// out[t] = sum_m rev[m] e[t + m]. Four outputs per pass share coefficient
// loads; the summation order is fixed so results are reproducible.
void
convolve(std::span<const double> rev, const double* e, double* out, std::size_t n)
{
  const std::size_t len = rev.size();
  std::size_t t = 0;
  for (; t + 4 <= n; t += 4) {
    double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
    const double* base = e + t;
    for (std::size_t m = 0; m < len; ++m) {
      const double c = rev[m];
      a0 += c * base[m];
      a1 += c * base[m + 1];
      a2 += c * base[m + 2];
      a3 += c * base[m + 3];
    }
    out[t] = a0;
    out[t + 1] = a1;
    out[t + 2] = a2;
    out[t + 3] = a3;
  }
  for (; t < n; ++t) {
    double acc = 0.0;
    for (std::size_t m = 0; m < len; ++m)
      acc += rev[m] * e[t + m];
    out[t] = acc;
  }
}

} // namespace

SamplePath
gen_path(const ProcessConfig& config, std::size_t n, StreamKey key)
{
  if (n == 0)
    throw PreconditionError("gen_path: n must be >= 1");
  const auto a = config.coeffs.values();
  const std::size_t len = a.size();
  std::vector<double> eps(config.burn_in + n);
  CounterRng rng(key);
  sample_innovations(config.innovation, rng, eps);

  std::vector<double> rev(a.rbegin(), a.rend());
  SamplePath path{ std::vector<double>(n), key.seed, config };
  // X_t uses e[burn_in + t - len + 1 .. burn_in + t].
  convolve(rev, eps.data() + (config.burn_in + 1 - len), path.values.data(), n);
  return path;
}

SamplePath
gen_path(const ProcessConfig& config, std::size_t n, std::uint64_t seed)
{
  return gen_path(config, n, StreamKey{ seed, 0, StreamRole::innovations });
}

} // namespace waverate
