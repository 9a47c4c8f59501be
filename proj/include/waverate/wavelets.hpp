#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace waverate {

constexpr int kMaxVanishingMoments = 12;

//! Orthonormal Daubechies lowpass/highpass filter pair with `vm` vanishing
//! moments. Highpass taps follow g[k] = (-1)^k h[2N-1-k].
struct FilterPair
{
  int vm = 0;
  std::vector<double> h;
  std::vector<double> g;

  int taps() const { return 2 * vm; }
  //! False for vm <= 3: the scaling function is not twice continuously
  //! differentiable.
  bool smoothness_ok() const { return vm >= 4; }
};

//! Minimal-phase Daubechies filter by spectral factorization. Throws
//! UnsupportedOrder unless 1 <= vm <= 12.
FilterPair
daubechies_filter(int vm);

//! Defects of the three filter identities.
struct FilterDefects
{
  double sum = 0.0;           // |sum_k h_k - sqrt(2)|
  double orthogonality = 0.0; // max_m |sum_k h_k h_{k+2m} - delta_m0|
  double moments = 0.0;       // max_{r<N} |sum_k t_k^r g_k|, t_k centred and scaled
};

FilterDefects
filter_defects(const FilterPair& filter);

enum class WaveletKind
{
  phi,
  psi
};

//! phi and psi sampled on the dyadic grid 2^-J. phi lives on [0, 2N-1] and
//! psi on [1-N, N]. Immutable after construction.
class DyadicTable
{
public:
  DyadicTable() = default;

  int vm() const { return vm_; }
  int resolution() const { return resolution_; }
  int iterations() const { return iterations_; }
  //! Sup-norm change between the last two cascade iterations.
  double sup_difference() const { return sup_difference_; }
  bool converged() const { return sup_difference_ <= 1e-4; }
  //! Haar tables are right-continuous step functions; all others are
  //! linearly interpolated between grid nodes.
  bool step_interpolation() const { return vm_ == 1; }

  double support_lo(WaveletKind kind) const
  {
    return kind == WaveletKind::phi ? 0.0 : 1.0 - vm_;
  }
  double support_hi(WaveletKind kind) const
  {
    return kind == WaveletKind::phi ? 2.0 * vm_ - 1.0 : double(vm_);
  }
  double support_length() const { return 2.0 * vm_ - 1.0; }
  double step() const { return 1.0 / double(per_unit_); }

  std::span<const double> values(WaveletKind kind) const
  {
    return kind == WaveletKind::phi ? phi_ : psi_;
  }

  //! Mother function at y (phi or psi), zero outside the support.
  double lookup(WaveletKind kind, double y) const;

  //! 2^{j/2} f(2^j x - k).
  double eval(WaveletKind kind, int j, long long k, double x) const;

  //! Integral of y^r times the interpolated table over its support.
  double moment(WaveletKind kind, int r) const;

  //! max |f| over the grid.
  double sup_abs(WaveletKind kind) const;

private:
  friend DyadicTable cascade(const FilterPair&, int, int);

  int vm_ = 0;
  int resolution_ = 0;
  int iterations_ = 0;
  long long per_unit_ = 1;
  double sup_difference_ = 0.0;
  std::vector<double> phi_;
  std::vector<double> psi_;
};

//! Cascade refinement on a fixed dyadic grid, started from the exact values
//! of phi at the integers.
DyadicTable
cascade(const FilterPair& filter, int resolution = 10, int iterations = 12);

//! |integral of x^r psi(x) dx|.
double
vanishing_moment_defect(const DyadicTable& table, int r);

//! max over grid x of |sum_k phi(x - k) - 1|.
double
partition_of_unity_defect(const DyadicTable& table);

//! max over |k| <= 2N-2 of the defects of <phi, phi(.-k)> = delta_k0,
//! <psi, psi(.-k)> = delta_k0 and <phi, psi(.-k)> = 0.
double
orthonormality_defect(const DyadicTable& table);

//! max over u in (0, u_max] of (1 + u^2) |f^(u)|, with f^ computed by
//! quadrature on the table. A bounded value on a widening grid is the
//! numerical evidence of |f^(u)| <= c / (1 + u^2).
double
fourier_decay_constant(const DyadicTable& table,
                       WaveletKind kind,
                       double u_max = 64.0,
                       int count = 512);

} // namespace waverate
