#include "waverate/experiments.hpp"

#include "waverate/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace waverate {

std::vector<double>
QuadratureWindow::nodes() const
{
  std::vector<double> out(grid);
  const double h = step();
  for (std::size_t i = 0; i < grid; ++i)
    out[i] = lo + double(i) * h;
  out.back() = hi;
  return out;
}

double
ise(std::span<const double> fhat, std::span<const double> ref, const QuadratureWindow& window)
{
  if (fhat.size() != window.grid || ref.size() != window.grid)
    throw PreconditionError("ise: tabulated values do not match the window grid");
  long double acc = 0.0L;
  for (std::size_t i = 0; i < window.grid; ++i) {
    const long double diff = static_cast<long double>(fhat[i]) - ref[i];
    const long double w = (i == 0 || i + 1 == window.grid) ? 0.5L : 1.0L;
    acc += w * diff * diff;
  }
  return static_cast<double>(acc * window.step());
}

double
ise(const std::function<double(double)>& fhat,
    const RefDensity& ref,
    const QuadratureWindow& window)
{
  const auto xs = window.nodes();
  std::vector<double> values(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    values[i] = fhat(xs[i]);
  return ise(values, ref(xs), window);
}

double
ise(const DensityEstimate& estimate,
    const EstimatorConfig& config,
    const RefDensity& ref,
    const QuadratureWindow& window)
{
  const auto xs = window.nodes();
  return ise(evaluate_grid(estimate, config, xs), ref(xs), window);
}

EstimatorConfig
EstimatorSpec::build() const
{
  return EstimatorConfig(Wavelet::make(vm, resolution, iterations), rule, k_margin);
}

// Scenarios --------------------------------------------------------------------

namespace {

struct ScenarioInfo
{
  const char* name;
  int M;
  double beta;
  bool theorem_applies;
  QuadratureWindow window;
};

// gaussian: gamma = 1, beta = 4 so that M beta matches the 4 vanishing
// moments; cauchy_d15: infinitely many coefficients, smoothness capped by the
// wavelet (M beta = vm); chisq_ma4: M = 4, beta = 1 (k = 6 > 2(beta + 1)).
// cauchy_d05 has sum |a_i|^{1/2} = infinity (d > -1), so the theorem does not
// cover it. chi-squared mass sits on (0, 125) rather than around 0.
const std::vector<ScenarioInfo>&
scenario_table()
{
  static const std::vector<ScenarioInfo> table = {
    { "gauss_d05", 1, 4.0, true, { -25.0, 25.0, (1u << 13) + 1 } },
    { "gauss_d15", 1, 4.0, true, { -25.0, 25.0, (1u << 13) + 1 } },
    { "cauchy_d05", 1, 4.0, false, { -25.0, 25.0, (1u << 13) + 1 } },
    { "cauchy_d15", 1, 4.0, true, { -25.0, 25.0, (1u << 13) + 1 } },
    { "chisq_ma4", 4, 1.0, true, { -25.0, 125.0, (1u << 13) + 1 } },
  };
  return table;
}

const ScenarioInfo*
scenario_info(std::string_view name)
{
  for (const auto& info : scenario_table())
    if (name == info.name)
      return &info;
  return nullptr;
}

} // namespace

ProcessConfig
scenario_process(std::string_view scenario)
{
  if (scenario == "gauss_d05")
    return ProcessConfig(CoefficientSeq::fractional(-0.5), Gaussian{ 0.0, 1.0 });
  if (scenario == "gauss_d15")
    return ProcessConfig(CoefficientSeq::fractional(-1.5), Gaussian{ 0.0, 1.0 });
  if (scenario == "cauchy_d05")
    return ProcessConfig(CoefficientSeq::fractional(-0.5), Cauchy{ 1.0 });
  if (scenario == "cauchy_d15")
    return ProcessConfig(CoefficientSeq::fractional(-1.5), Cauchy{ 1.0 });
  if (scenario == "chisq_ma4")
    return ProcessConfig(CoefficientSeq::moving_average({ 1.0, 1.0, 1.0, 1.0 }), ChiSquared{ 6 });
  throw DomainError("unknown scenario '" + std::string(scenario) + "'");
}

void
ExperimentPlan::validate() const
{
  std::vector<std::string> problems;
  if (ns.empty())
    problems.push_back("ns must be non-empty");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] < 2)
      problems.push_back("every n must be >= 2");
    if (i > 0 && ns[i] <= ns[i - 1])
      problems.push_back("ns must be strictly increasing");
  }
  if (reps < 1)
    problems.push_back("reps must be >= 1");
  if (!(quad.lo < quad.hi) || !std::isfinite(quad.lo) || !std::isfinite(quad.hi))
    problems.push_back("quadrature window requires finite lo < hi");
  if (quad.grid < 3)
    problems.push_back("quadrature grid must have at least 3 nodes");
  if (scenario == "custom") {
    if (!process)
      problems.push_back("custom scenario requires a process definition");
  } else if (!scenario_info(scenario)) {
    problems.push_back("unknown scenario '" + scenario + "'");
  }
  if (estimator.vm < 1 || estimator.vm > kMaxVanishingMoments)
    problems.push_back("wavelet vm must lie in [1, 12]");
  if (estimator.resolution < 1 || estimator.iterations < 1)
    problems.push_back("wavelet resolution and iterations must be >= 1");
  if (estimator.k_margin < 0)
    problems.push_back("k_margin must be >= 0");
  if (const auto* a = std::get_if<AutoLevel>(&estimator.rule)) {
    if (a->M < 1 || !(a->beta > 0.0)) {
      problems.push_back("auto j_n requires M >= 1 and beta > 0");
    } else {
      if (double(estimator.vm) < std::ceil(a->M * a->beta))
        problems.push_back("wavelet vm >= ceil(M*beta) required");
      std::optional<InnovationDist> innovation;
      if (process)
        innovation = process->innovation;
      else if (scenario_info(scenario))
        innovation = scenario_process(scenario).innovation;
      if (innovation && a->beta < condition_gamma(*innovation))
        problems.push_back("beta >= gamma of the innovation required");
    }
  } else if (std::get<ManualLevel>(estimator.rule).j < 0) {
    problems.push_back("manual j_n must be >= 0");
  }
  if (!problems.empty())
    throw ConfigError(std::move(problems));
}

ProcessConfig
ExperimentPlan::resolved_process() const
{
  if (process)
    return *process;
  return scenario_process(scenario);
}

RefDensity
ExperimentPlan::reference() const
{
  if (scenario == "custom")
    return inverted_density(resolved_process());
  return reference_density(scenario);
}

std::vector<ExperimentPlan>
scenario_presets()
{
  std::vector<ExperimentPlan> out;
  auto make = [](const ScenarioInfo& info, bool desk) {
    ExperimentPlan plan;
    plan.name = std::string(info.name) + (desk ? "_desk" : "");
    plan.scenario = info.name;
    plan.ns = { desk ? std::size_t{ 1 } << 14 : std::size_t{ 1 } << 16 };
    plan.reps = desk ? 10 : 5;
    plan.seed = 20240601;
    plan.estimator.vm = 4;
    plan.estimator.rule = AutoLevel{ info.M, info.beta };
    plan.quad = info.window;
    plan.theorem_applies = info.theorem_applies;
    return plan;
  };
  for (const auto& info : scenario_table())
    out.push_back(make(info, false));
  for (const auto& info : scenario_table())
    out.push_back(make(info, true));
  return out;
}

std::optional<ExperimentPlan>
find_preset(std::string_view name)
{
  for (auto& plan : scenario_presets())
    if (plan.name == name)
      return plan;
  return std::nullopt;
}

// Monte Carlo -------------------------------------------------------------------

unsigned
default_thread_count()
{
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("WAVERATE_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1)
      return std::min<unsigned>(hw, static_cast<unsigned>(cap));
  }
  return hw;
}

std::vector<LevelSummary>
summarize(std::span<const IseRecord> records)
{
  std::vector<std::size_t> ns;
  for (const auto& r : records)
    ns.push_back(r.n);
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

  std::vector<LevelSummary> out;
  for (std::size_t n : ns) {
    // Records of one n are combined in replication order.
    std::vector<std::pair<int, double>> values;
    for (const auto& r : records)
      if (r.n == n)
        values.emplace_back(r.rep, r.ise);
    std::sort(values.begin(), values.end());
    long double sum = 0.0L;
    for (const auto& v : values)
      sum += v.second;
    const long double mean = sum / values.size();
    long double ss = 0.0L;
    for (const auto& v : values)
      ss += (v.second - mean) * (v.second - mean);
    LevelSummary s;
    s.n = n;
    s.reps = static_cast<int>(values.size());
    s.mean = static_cast<double>(mean);
    s.std_error = values.size() > 1
                    ? static_cast<double>(std::sqrt(ss / (values.size() - 1)) /
                                          std::sqrt(static_cast<long double>(values.size())))
                    : 0.0;
    out.push_back(s);
  }
  return out;
}

ImseResult
run_imse(const ExperimentPlan& plan, const RunOptions& options)
{
  plan.validate();
  const ProcessConfig process = plan.resolved_process();
  const EstimatorConfig config = plan.estimator.build();
  const auto xs = plan.quad.nodes();
  const std::vector<double> ref_values = plan.reference()(xs);

  const std::size_t reps = static_cast<std::size_t>(plan.reps);
  const std::size_t tasks = plan.ns.size() * reps;
  std::vector<std::size_t> order = options.execution_order;
  if (order.empty()) {
    order.resize(tasks);
    std::iota(order.begin(), order.end(), 0);
  } else {
    auto sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
      if (sorted[i] != i || sorted.size() != tasks)
        throw PreconditionError("execution_order must be a permutation of the tasks");
  }

  ImseResult result;
  result.plan = plan;
  result.records.resize(tasks);

  auto run_task = [&](std::size_t task) {
    const std::size_t n_index = task / reps;
    const std::size_t rep = task % reps;
    const std::size_t n = plan.ns[n_index];
    const StreamKey key{ plan.seed, (std::uint64_t(n_index) << 32) | rep, StreamRole::innovations };
    const SamplePath path = gen_path(process, n, key);
    const DensityEstimate est = fit(path.values, config);
    const double value = ise(evaluate_grid(est, config, xs), ref_values, plan.quad);
    result.records[task] = IseRecord{ n, static_cast<int>(rep), value };
  };

  const unsigned threads =
    std::max(1u, std::min<unsigned>(options.threads ? options.threads : default_thread_count(),
                                     static_cast<unsigned>(tasks)));
  std::atomic<std::size_t> next{ 0 };
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t slot = next.fetch_add(1);
      if (slot >= tasks)
        return;
      try {
        run_task(order[slot]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
        next = tasks;
        return;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back(worker);
    for (auto& t : pool)
      t.join();
  }
  if (failure)
    std::rethrow_exception(failure);

  result.summary = summarize(result.records);
  for (std::size_t i = 1; i < result.summary.size(); ++i) {
    const auto& prev = result.summary[i - 1];
    const auto& cur = result.summary[i];
    const double tol = 2.0 * std::hypot(prev.std_error, cur.std_error);
    if (cur.mean > prev.mean + tol) {
      std::ostringstream os;
      os << "mean ISE rises from n=" << prev.n << " to n=" << cur.n << " beyond two standard errors";
      result.warnings.push_back(os.str());
    }
  }
  return result;
}

RateFit
fit_rate(std::span<const LevelSummary> summary, int M, double beta)
{
  std::vector<LevelSummary> levels(summary.begin(), summary.end());
  std::sort(levels.begin(), levels.end(), [](const auto& a, const auto& b) { return a.n < b.n; });
  levels.erase(std::unique(levels.begin(),
                           levels.end(),
                           [](const auto& a, const auto& b) { return a.n == b.n; }),
               levels.end());
  if (levels.size() < 3)
    throw PreconditionError("fit_rate: ≥ 3 distinct n required");
  for (const auto& l : levels)
    if (!(l.mean > 0.0))
      throw PreconditionError("fit_rate: every mean ISE must be positive");

  RateFit out;
  if (levels.size() > 3 && levels.front().std_error > 0.25 * levels.front().mean) {
    out.excluded_n = levels.front().n;
    levels.erase(levels.begin());
  }
  const double mb = double(M) * beta;
  out.theoretical_slope = -2.0 * mb / (2.0 * mb + 1.0);

  const std::size_t m = levels.size();
  long double sx = 0, sy = 0;
  for (const auto& l : levels) {
    sx += std::log2(double(l.n));
    sy += std::log2(l.mean);
    out.used_ns.push_back(l.n);
  }
  const long double mx = sx / m, my = sy / m;
  long double sxx = 0, sxy = 0, syy = 0;
  for (const auto& l : levels) {
    const long double dx = std::log2(double(l.n)) - mx;
    const long double dy = std::log2(l.mean) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  out.slope = static_cast<double>(sxy / sxx);
  out.intercept = static_cast<double>(my - (sxy / sxx) * mx);
  out.r_squared = syy > 0 ? static_cast<double>((sxy * sxy) / (sxx * syy)) : 1.0;
  out.deviation = out.slope - out.theoretical_slope;
  return out;
}

RateFit
fit_rate(const ImseResult& result, int M, double beta)
{
  return fit_rate(result.summary, M, beta);
}

// Error decomposition ------------------------------------------------------------

namespace {

constexpr int kCoefficientNodes = 1 << 12;

// int f(x) 2^{j/2} g(2^j x - k) dx = 2^{-j/2} int f((y + k) / 2^j) g(y) dy.
double
true_coefficient(const RefDensity& ref,
                 const DyadicTable& table,
                 WaveletKind kind,
                 int j,
                 long long k)
{
  const double lo = table.support_lo(kind);
  const double hi = table.support_hi(kind);
  const double h = (hi - lo) / kCoefficientNodes;
  const double inv = std::ldexp(1.0, -j);
  long double acc = 0.0L;
  if (table.step_interpolation()) {
    for (int m = 0; m < kCoefficientNodes; ++m) {
      const double y = lo + (m + 0.5) * h;
      acc += ref((y + double(k)) * inv) * table.lookup(kind, y);
    }
  } else {
    for (int m = 0; m <= kCoefficientNodes; ++m) {
      const double y = lo + m * h;
      const long double w = (m == 0 || m == kCoefficientNodes) ? 0.5L : 1.0L;
      acc += w * ref((y + double(k)) * inv) * table.lookup(kind, y);
    }
  }
  return static_cast<double>(acc * h) * std::sqrt(inv);
}

CoefficientBlock
true_block(const RefDensity& ref,
           const DyadicTable& table,
           WaveletKind kind,
           int j,
           const QuadratureWindow& window,
           const CoefficientBlock* extra)
{
  const double scale = std::ldexp(1.0, j);
  const long long first =
    static_cast<long long>(std::ceil(window.lo * scale - table.support_hi(kind)));
  const long long last =
    static_cast<long long>(std::floor(window.hi * scale - table.support_lo(kind)));
  std::vector<long long> ks;
  for (long long k = first; k <= last; ++k)
    ks.push_back(k);
  if (extra)
    ks.insert(ks.end(), extra->ks.begin(), extra->ks.end());
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  CoefficientBlock block;
  block.level = j;
  block.k_lo = ks.empty() ? 0 : ks.front();
  block.k_hi = ks.empty() ? -1 : ks.back();
  block.ks = std::move(ks);
  block.values.reserve(block.ks.size());
  for (long long k : block.ks)
    block.values.push_back(true_coefficient(ref, table, kind, j, k));
  return block;
}

double
squared_difference(const CoefficientBlock& est, const CoefficientBlock& truth)
{
  // `truth` covers every k stored in `est`.
  long double acc = 0.0L;
  for (std::size_t i = 0; i < truth.ks.size(); ++i) {
    const long double d = static_cast<long double>(est.at(truth.ks[i])) - truth.values[i];
    acc += d * d;
  }
  return static_cast<double>(acc);
}

} // namespace

DensityEstimate
true_coefficients(const RefDensity& ref,
                  const EstimatorConfig& config,
                  int jn,
                  const QuadratureWindow& window)
{
  DensityEstimate out;
  out.jn = jn;
  const DyadicTable& table = config.table();
  out.alpha0 = true_block(ref, table, WaveletKind::phi, 0, window, nullptr);
  for (int j = 0; j <= jn; ++j)
    out.beta_levels.push_back(true_block(ref, table, WaveletKind::psi, j, window, nullptr));
  return out;
}

ErrorDecomposition
decompose_error(const DensityEstimate& estimate,
                const EstimatorConfig& config,
                const RefDensity& ref,
                int jn,
                int j_tail,
                const QuadratureWindow& window)
{
  if (jn < 0 || jn > estimate.jn)
    throw PreconditionError("decompose_error: jn must lie within the fitted levels");
  if (j_tail < jn)
    throw PreconditionError("decompose_error: j_tail must be >= jn");
  const DyadicTable& table = config.table();
  ErrorDecomposition out;

  const auto alpha = true_block(ref, table, WaveletKind::phi, 0, window, &estimate.alpha0);
  out.i1 = squared_difference(estimate.alpha0, alpha);
  for (int j = 0; j <= jn; ++j) {
    const auto& est_block = estimate.beta_levels[static_cast<std::size_t>(j)];
    const auto beta = true_block(ref, table, WaveletKind::psi, j, window, &est_block);
    out.i2 += squared_difference(est_block, beta);
  }
  double last = 0.0, prev = 0.0;
  for (int j = jn + 1; j <= j_tail; ++j) {
    const auto beta = true_block(ref, table, WaveletKind::psi, j, window, nullptr);
    prev = last;
    last = beta.sum_squares();
    out.i3 += last;
  }
  if (j_tail > jn + 1 && prev > 0.0 && last < prev) {
    const double ratio = last / prev;
    out.tail_estimate = last * ratio / (1.0 - ratio);
  }

  // The ISE of the estimate truncated at jn.
  DensityEstimate truncated = estimate;
  truncated.beta_levels.resize(static_cast<std::size_t>(jn) + 1);
  truncated.jn = jn;
  out.ise = ise(truncated, config, ref, window);
  out.residual = std::fabs(out.i1 + out.i2 + out.i3 - out.ise);
  out.relative_residual = out.ise > 0.0 ? out.residual / out.ise : out.residual;
  return out;
}

// Figures ---------------------------------------------------------------------------

std::vector<FigurePanel>
figure_panels(std::string_view name, std::size_t n, std::uint64_t seed, std::size_t points)
{
  struct Spec
  {
    const char* scenario;
    double lo, hi;
  };
  std::vector<Spec> specs;
  if (name == "fig1")
    specs = { { "gauss_d05", -6.0, 6.0 }, { "gauss_d15", -8.0, 8.0 } };
  else if (name == "fig2")
    specs = { { "cauchy_d05", -15.0, 15.0 }, { "cauchy_d15", -15.0, 15.0 } };
  else if (name == "fig3")
    specs = { { "chisq_ma4", 0.0, 60.0 } };
  else
    throw DomainError("unknown figure '" + std::string(name) + "' (expected fig1, fig2, fig3)");
  if (points < 2)
    throw PreconditionError("figure requires at least 2 points");

  std::vector<FigurePanel> out;
  for (std::size_t p = 0; p < specs.size(); ++p) {
    const auto plan = *find_preset(specs[p].scenario);
    const EstimatorConfig config = plan.estimator.build();
    const SamplePath path =
      gen_path(plan.resolved_process(), n, StreamKey{ seed, p, StreamRole::innovations });
    const DensityEstimate est = fit(path.values, config);
    FigurePanel panel;
    panel.scenario = specs[p].scenario;
    for (std::size_t i = 0; i < points; ++i)
      panel.x.push_back(specs[p].lo + (specs[p].hi - specs[p].lo) * double(i) / double(points - 1));
    panel.fhat = evaluate_grid(est, config, panel.x);
    panel.ftrue = plan.reference()(panel.x);
    out.push_back(std::move(panel));
  }
  return out;
}

} // namespace waverate
