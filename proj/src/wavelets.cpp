#include "waverate/wavelets.hpp"

#include "waverate/error.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/Polynomials>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

namespace waverate {

namespace {

using cld = std::complex<long double>;

// Roots of sum_k C(N-1+k, k) y^k, polished by Newton in long double.
std::vector<cld>
daubechies_polynomial_roots(int vm)
{
  const int degree = vm - 1;
  Eigen::Matrix<long double, Eigen::Dynamic, 1> coeffs(degree + 1);
  long double binom = 1.0L;
  for (int k = 0; k <= degree; ++k) {
    coeffs[k] = binom;
    binom = binom * (vm + k) / (k + 1);
  }
  Eigen::PolynomialSolver<long double, Eigen::Dynamic> solver(coeffs);
  std::vector<cld> roots(solver.roots().data(),
                         solver.roots().data() + solver.roots().size());
  for (auto& root : roots) {
    for (int it = 0; it < 8; ++it) {
      cld p = 0, dp = 0;
      for (int k = degree; k >= 0; --k) {
        dp = dp * root + p;
        p = p * root + coeffs[k];
      }
      if (std::abs(dp) == 0.0L)
        break;
      root -= p / dp;
    }
  }
  return roots;
}

} // namespace

FilterPair
daubechies_filter(int vm)
{
  if (vm < 1 || vm > kMaxVanishingMoments) {
    throw UnsupportedOrder("daubechies_filter: vanishing moments must be in "
                           "[1, 12], got " +
                           std::to_string(vm));
  }
  // H(z) = (1 + z)^N Q(z), |Q|^2 = P(sin^2(w/2)); each root y of P maps to
  // the pair z, 1/z with z + 1/z = 2 - 4y. Keep |z| < 1 and reverse the
  // resulting ascending coefficients to obtain the minimal-phase ordering.
  std::vector<cld> poly{ 1.0L };
  auto multiply = [&poly](cld root) {
    std::vector<cld> next(poly.size() + 1, 0.0L);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i + 1] += poly[i];
      next[i] -= poly[i] * root;
    }
    poly = std::move(next);
  };
  for (int i = 0; i < vm; ++i)
    multiply(-1.0L);
  if (vm > 1) {
    for (const cld& y : daubechies_polynomial_roots(vm)) {
      const cld b = 2.0L - 4.0L * y;
      const cld disc = std::sqrt(b * b - 4.0L);
      cld z = (b - disc) / 2.0L;
      if (std::abs(z) > 1.0L)
        z = (b + disc) / 2.0L;
      multiply(z);
    }
  }

  const int taps = 2 * vm;
  std::vector<long double> h(taps);
  long double total = 0.0L;
  for (int k = 0; k < taps; ++k) {
    h[k] = poly[taps - 1 - k].real();
    total += h[k];
  }
  const long double norm = std::sqrt(2.0L) / total;

  FilterPair out;
  out.vm = vm;
  out.h.resize(taps);
  out.g.resize(taps);
  for (int k = 0; k < taps; ++k)
    out.h[k] = static_cast<double>(h[k] * norm);
  for (int k = 0; k < taps; ++k)
    out.g[k] = (k % 2 == 0 ? 1.0 : -1.0) * out.h[taps - 1 - k];
  return out;
}

FilterDefects
filter_defects(const FilterPair& filter)
{
  FilterDefects d;
  const int taps = static_cast<int>(filter.h.size());
  long double sum = 0.0L;
  for (double v : filter.h)
    sum += v;
  d.sum = static_cast<double>(std::fabs(sum - std::sqrt(2.0L)));

  for (int m = 0; m < filter.vm; ++m) {
    long double acc = 0.0L;
    for (int k = 0; k + 2 * m < taps; ++k)
      acc += static_cast<long double>(filter.h[k]) * filter.h[k + 2 * m];
    const long double target = (m == 0) ? 1.0L : 0.0L;
    d.orthogonality =
      std::max(d.orthogonality, static_cast<double>(std::fabs(acc - target)));
  }

  // Abscissae centred on the filter midpoint and scaled into [-1, 1]; the
  // conditions are equivalent to sum k^r g_k = 0 but stay well conditioned.
  const long double centre = (taps - 1) / 2.0L;
  const long double scale = std::max(centre, 1.0L);
  for (int r = 0; r < filter.vm; ++r) {
    long double acc = 0.0L;
    for (int k = 0; k < taps; ++k)
      acc += std::pow((k - centre) / scale, r) * filter.g[k];
    d.moments = std::max(d.moments, static_cast<double>(std::fabs(acc)));
  }
  return d;
}

double
DyadicTable::lookup(WaveletKind kind, double y) const
{
  const auto& v = kind == WaveletKind::phi ? phi_ : psi_;
  const double t = (y - support_lo(kind)) * double(per_unit_);
  const double last = double(v.size() - 1);
  if (!(t >= 0.0) || t > last)
    return 0.0;
  const auto i = static_cast<std::size_t>(t);
  if (i + 1 >= v.size() || step_interpolation())
    return v[i];
  const double frac = t - double(i);
  return v[i] + frac * (v[i + 1] - v[i]);
}

double
DyadicTable::eval(WaveletKind kind, int j, long long k, double x) const
{
  const double scale = std::sqrt(std::ldexp(1.0, j));
  return scale * lookup(kind, std::ldexp(x, j) - double(k));
}

double
DyadicTable::moment(WaveletKind kind, int r) const
{
  const auto& v = kind == WaveletKind::phi ? phi_ : psi_;
  const double lo = support_lo(kind);
  const double h = step();
  long double acc = 0.0L;
  if (step_interpolation()) {
    for (std::size_t m = 0; m + 1 < v.size(); ++m) {
      const long double a = lo + m * h;
      const long double b = lo + (m + 1) * h;
      acc += v[m] * (std::pow(b, r + 1) - std::pow(a, r + 1)) / (r + 1);
    }
    return static_cast<double>(acc);
  }
  for (std::size_t m = 0; m < v.size(); ++m) {
    const long double y = lo + m * h;
    const long double w = (m == 0 || m + 1 == v.size()) ? 0.5L : 1.0L;
    acc += w * std::pow(y, r) * v[m];
  }
  return static_cast<double>(acc * h);
}

double
DyadicTable::sup_abs(WaveletKind kind) const
{
  double out = 0.0;
  for (double v : values(kind))
    out = std::max(out, std::fabs(v));
  return out;
}

DyadicTable
cascade(const FilterPair& filter, int resolution, int iterations)
{
  if (resolution < 1 || iterations < 1)
    throw PreconditionError("cascade: resolution and iterations must be >= 1");
  const int n = filter.vm;
  const int span = 2 * n - 1;
  const long long per_unit = 1LL << resolution;
  const std::size_t len = static_cast<std::size_t>(span * per_unit + 1);

  DyadicTable table;
  table.vm_ = n;
  table.resolution_ = resolution;
  table.iterations_ = iterations;
  table.per_unit_ = per_unit;

  // phi at the integers 0..2N-1: eigenvector of [sqrt2 h_{2i-j}] for
  // eigenvalue 1, normalized to sum 1.
  std::vector<double> at_int(span + 1, 0.0);
  if (n == 1) {
    at_int[0] = 1.0;
  } else {
    const int m = span - 1;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    for (int i = 1; i <= m; ++i) {
      for (int j = 1; j <= m; ++j) {
        const int idx = 2 * i - j;
        if (idx >= 0 && idx < 2 * n)
          a(i - 1, j - 1) = std::sqrt(2.0) * filter.h[idx];
      }
    }
    a -= Eigen::MatrixXd::Identity(m, m);
    a.row(m - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    rhs[m - 1] = 1.0;
    const Eigen::VectorXd v = a.fullPivLu().solve(rhs);
    for (int i = 1; i <= m; ++i)
      at_int[i] = v[i - 1];
  }

  std::vector<double> cur(len);
  for (std::size_t idx = 0; idx < len; ++idx) {
    const auto whole = static_cast<std::size_t>(idx / per_unit);
    const double frac = double(idx % per_unit) / double(per_unit);
    const double right = whole + 1 <= std::size_t(span) ? at_int[whole + 1] : 0.0;
    cur[idx] = n == 1 ? at_int[whole] : at_int[whole] + frac * (right - at_int[whole]);
  }

  auto refine = [&](const std::vector<double>& src,
                    const std::vector<double>& taps,
                    std::vector<double>& dst) {
    const double root2 = std::sqrt(2.0);
    for (std::size_t idx = 0; idx < len; ++idx) {
      double acc = 0.0;
      for (int k = 0; k < 2 * n; ++k) {
        const long long src_idx = 2LL * idx - k * per_unit;
        if (src_idx >= 0 && src_idx < static_cast<long long>(len))
          acc += taps[k] * src[src_idx];
      }
      dst[idx] = root2 * acc;
    }
  };

  std::vector<double> next(len);
  double diff = 0.0;
  for (int it = 0; it < iterations; ++it) {
    refine(cur, filter.h, next);
    diff = 0.0;
    for (std::size_t idx = 0; idx < len; ++idx)
      diff = std::max(diff, std::fabs(next[idx] - cur[idx]));
    cur.swap(next);
  }
  table.sup_difference_ = diff;
  table.phi_ = cur;
  table.psi_.assign(len, 0.0);
  refine(table.phi_, filter.g, table.psi_);
  if (n == 1) {
    // Haar: sqrt(2) * (1/sqrt(2)) rounds away from 1, so write the step
    // functions out exactly.
    for (std::size_t idx = 0; idx < len; ++idx) {
      table.phi_[idx] = idx < std::size_t(per_unit) ? 1.0 : 0.0;
      table.psi_[idx] = idx >= std::size_t(per_unit) ? 0.0 : (2 * idx < std::size_t(per_unit) ? 1.0 : -1.0);
    }
  }
  return table;
}

double
vanishing_moment_defect(const DyadicTable& table, int r)
{
  return std::fabs(table.moment(WaveletKind::psi, r));
}

double
partition_of_unity_defect(const DyadicTable& table)
{
  const auto phi = table.values(WaveletKind::phi);
  const auto per_unit = static_cast<std::size_t>(1LL << table.resolution());
  double worst = 0.0;
  for (std::size_t m = 0; m < per_unit; ++m) {
    long double acc = 0.0L;
    for (std::size_t idx = m; idx < phi.size(); idx += per_unit)
      acc += phi[idx];
    worst = std::max(worst, static_cast<double>(std::fabs(acc - 1.0L)));
  }
  return worst;
}

namespace {

// <a, b(. - k)> for tables a, b on supports starting at lo_a, lo_b.
double
shifted_inner(const DyadicTable& table,
              WaveletKind ka,
              WaveletKind kb,
              long long shift)
{
  const auto a = table.values(ka);
  const auto b = table.values(kb);
  const long long per_unit = 1LL << table.resolution();
  // Node m of a sits at lo_a + m h; the matching node of b(. - k) is at
  // offset (lo_a - lo_b - k) / h.
  const long long offset = static_cast<long long>(
    std::llround((table.support_lo(ka) - table.support_lo(kb)) * per_unit)) -
                           shift * per_unit;
  const long long na = static_cast<long long>(a.size());
  const long long nb = static_cast<long long>(b.size());
  const long long first = std::max(0LL, -offset);
  const long long last = std::min(na - 1, nb - 1 - offset);
  if (first > last)
    return 0.0;
  long double acc = 0.0L;
  const bool step = table.step_interpolation();
  for (long long m = first; m <= last; ++m) {
    long double w = 1.0L;
    if (step) {
      if (m == last)
        w = 0.0L;
    } else if (m == first || m == last) {
      w = 0.5L;
    }
    acc += w * a[m] * b[m + offset];
  }
  return static_cast<double>(acc / per_unit);
}

} // namespace

double
orthonormality_defect(const DyadicTable& table)
{
  const int reach = 2 * table.vm() - 2;
  double worst = 0.0;
  for (long long k = -reach; k <= reach; ++k) {
    const double delta = k == 0 ? 1.0 : 0.0;
    worst = std::max(
      worst,
      std::fabs(shifted_inner(table, WaveletKind::phi, WaveletKind::phi, k) -
                delta));
    worst = std::max(
      worst,
      std::fabs(shifted_inner(table, WaveletKind::psi, WaveletKind::psi, k) -
                delta));
    worst = std::max(
      worst,
      std::fabs(shifted_inner(table, WaveletKind::phi, WaveletKind::psi, k)));
  }
  return worst;
}

double
fourier_decay_constant(const DyadicTable& table,
                       WaveletKind kind,
                       double u_max,
                       int count)
{
  const auto v = table.values(kind);
  const double lo = table.support_lo(kind);
  const double h = table.step();
  double worst = 0.0;
  for (int i = 1; i <= count; ++i) {
    const double u = u_max * i / count;
    std::complex<double> acc = 0.0;
    for (std::size_t m = 0; m < v.size(); ++m) {
      const double w = (m == 0 || m + 1 == v.size()) ? 0.5 : 1.0;
      acc += w * v[m] * std::polar(1.0, -u * (lo + m * h));
    }
    worst = std::max(worst, (1.0 + u * u) * std::abs(acc) * h);
  }
  return worst;
}

} // namespace waverate
