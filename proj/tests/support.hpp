#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace testing {

//! Two-sample Kolmogorov-Smirnov statistic.
inline double
ks_statistic(std::vector<double> a, std::vector<double> b)
{
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x)
      ++i;
    while (j < b.size() && b[j] <= x)
      ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

inline double
mean(std::span<const double> v)
{
  return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

inline double
variance(std::span<const double> v)
{
  const double m = mean(v);
  double s = 0.0;
  for (double x : v)
    s += (x - m) * (x - m);
  return s / double(v.size() - 1);
}

//! Composite Simpson rule on [a, b] with an even number of panels.
template<class F>
double
simpson(F f, double a, double b, int panels)
{
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i)
    s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

inline std::string
slurp(const std::filesystem::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

//! Fresh scratch directory under the system temp dir.
inline std::filesystem::path
scratch_dir(const std::string& tag)
{
  auto dir = std::filesystem::temp_directory_path() / ("waverate_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

} // namespace testing
