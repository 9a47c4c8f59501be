#include "waverate/cli.hpp"
#include "waverate/config.hpp"
#include "waverate/error.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace waverate;

namespace {

ProcessConfig
process_from_toml(const std::string& text)
{
  const RunConfig cfg = parse_config(text);
  if (!cfg.process)
    throw ConfigError({ "[process] and [innovation] sections required" });
  return *cfg.process;
}

EstimatorConfig
estimator_config(int vm, std::optional<int> jn, std::optional<int> M, std::optional<double> beta,
                 int resolution, int k_margin)
{
  if (jn)
    return EstimatorConfig(Wavelet::make(vm, resolution), ManualLevel{ *jn }, k_margin);
  if (!M || !beta)
    throw ConfigError({ "give jn, or both M and beta" });
  return EstimatorConfig(Wavelet::make(vm, resolution), AutoLevel{ *M, *beta }, k_margin);
}

py::dict
record_dict(const LevelSummary& s)
{
  py::dict d;
  d["n"] = s.n;
  d["reps"] = s.reps;
  d["mean"] = s.mean;
  d["std_error"] = s.std_error;
  return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "Wavelet density estimation for linear processes";
  m.attr("__version__") = WAVERATE_VERSION;

  // Translators are tried newest first, so the base class goes first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<UnsupportedOrder>(m, "UnsupportedOrder", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_RuntimeError);

  m.def(
    "daubechies_filter",
    [](int vm) {
      const FilterPair f = daubechies_filter(vm);
      return py::make_tuple(f.h, f.g);
    },
    py::arg("vm"),
    "Low- and high-pass taps (h, g) of the Daubechies filter with vm vanishing moments.");

  m.def(
    "scaling_table",
    [](int vm, int resolution, const std::string& kind) {
      const DyadicTable t = cascade(daubechies_filter(vm), resolution);
      const WaveletKind k = kind == "psi" ? WaveletKind::psi : WaveletKind::phi;
      const double lo = t.support_lo(k);
      std::vector<double> x, y;
      const auto& v = t.values(k);
      for (std::size_t i = 0; i < v.size(); ++i) {
        x.push_back(lo + double(i) * t.step());
        y.push_back(v[i]);
      }
      return py::make_tuple(x, y);
    },
    py::arg("vm"),
    py::arg("resolution") = 10,
    py::arg("kind") = "phi");

  m.def("select_jn", &select_jn, py::arg("n"), py::arg("M"), py::arg("beta"));

  m.def(
    "gen_path",
    [](const std::string& toml_text, std::size_t n, std::uint64_t seed) {
      return gen_path(process_from_toml(toml_text), n, seed).values;
    },
    py::arg("config"),
    py::arg("n"),
    py::arg("seed"),
    "Simulate n values of the process described by a TOML document.");

  m.def(
    "fit_evaluate",
    [](std::vector<double> sample, std::vector<double> xs, int vm, std::optional<int> jn,
       std::optional<int> M, std::optional<double> beta, int resolution, int k_margin) {
      const EstimatorConfig config = estimator_config(vm, jn, M, beta, resolution, k_margin);
      const DensityEstimate est = fit(sample, config);
      py::dict d;
      d["jn"] = est.jn;
      d["fhat"] = evaluate_grid(est, config, xs);
      d["mass"] = estimate_mass(est, config);
      return d;
    },
    py::arg("sample"),
    py::arg("x"),
    py::arg("vm") = 4,
    py::arg("jn") = py::none(),
    py::arg("M") = py::none(),
    py::arg("beta") = py::none(),
    py::arg("resolution") = 10,
    py::arg("k_margin") = 1);

  m.def(
    "reference_density",
    [](const std::string& scenario, std::vector<double> xs) {
      const RefDensity ref = reference_density(scenario);
      return ref(xs);
    },
    py::arg("scenario"),
    py::arg("x"));

  m.def("scenario_names", [] {
    std::vector<std::string> names;
    for (const auto& p : scenario_presets())
      names.push_back(p.name);
    return names;
  });

  m.def(
    "run_imse",
    [](const std::string& preset, std::optional<std::vector<std::size_t>> ns, std::optional<int> reps,
       std::optional<std::uint64_t> seed, unsigned threads) {
      auto plan = find_preset(preset);
      if (!plan)
        throw ConfigError({ "unknown scenario '" + preset + "'" });
      if (ns)
        plan->ns = *ns;
      if (reps)
        plan->reps = *reps;
      if (seed)
        plan->seed = *seed;
      RunOptions options;
      options.threads = threads;
      ImseResult result;
      {
        py::gil_scoped_release release;
        result = run_imse(*plan, options);
      }
      py::list records, summary;
      for (const auto& r : result.records)
        records.append(py::make_tuple(r.n, r.rep, r.ise));
      for (const auto& s : result.summary)
        summary.append(record_dict(s));
      py::dict d;
      d["records"] = records;
      d["summary"] = summary;
      d["warnings"] = result.warnings;
      d["seed"] = plan->seed;
      return d;
    },
    py::arg("preset"),
    py::arg("ns") = py::none(),
    py::arg("reps") = py::none(),
    py::arg("seed") = py::none(),
    py::arg("threads") = 0u);

  m.def(
    "fit_rate",
    [](std::vector<std::size_t> ns, std::vector<double> means, int M, double beta) {
      if (ns.size() != means.size())
        throw DomainError("ns and means differ in length");
      std::vector<LevelSummary> summary;
      for (std::size_t i = 0; i < ns.size(); ++i)
        summary.push_back(LevelSummary{ ns[i], 1, means[i], 0.0 });
      const RateFit rf = fit_rate(summary, M, beta);
      py::dict d;
      d["slope"] = rf.slope;
      d["intercept"] = rf.intercept;
      d["r_squared"] = rf.r_squared;
      d["theoretical_slope"] = rf.theoretical_slope;
      d["used_ns"] = rf.used_ns;
      return d;
    },
    py::arg("ns"),
    py::arg("means"),
    py::arg("M"),
    py::arg("beta"));

  m.def(
    "audit",
    [](const std::string& dist, double beta, double gamma) {
      const InnovationDist d = parse_distribution(dist);
      const auto a = audit_integrability(d, beta);
      const auto g = audit_gamma_condition(d, gamma, default_lambda_grid());
      py::dict out;
      out["integrable"] = a.pass;
      out["growth_ratio"] = a.growth_ratio;
      out["gamma_condition"] = g.pass;
      out["gamma_constant"] = g.constant;
      return out;
    },
    py::arg("dist"),
    py::arg("beta"),
    py::arg("gamma"));

  m.def(
    "cli",
    [](std::vector<std::string> args) {
      std::ostringstream out, err;
      const int code = dispatch(args, out, err);
      return py::make_tuple(code, out.str(), err.str());
    },
    py::arg("args"),
    "Run a waverate command line; returns (exit_code, stdout, stderr).");
}
