#include "waverate/cli.hpp"

#include "waverate/config.hpp"
#include "waverate/error.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace waverate {

using nlohmann::ordered_json;

std::string
format_double(double value)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

constexpr const char* kVersion = WAVERATE_VERSION;

std::string
header_line(const std::string& command, std::uint64_t hash, const std::string& seed)
{
  return std::string("# waverate ") + kVersion + " command=" + command + " config=" + hex64(hash) +
         " seed=" + seed + "\n";
}

ordered_json
meta(const std::string& command, std::uint64_t hash, const std::string& seed)
{
  return ordered_json{ { "tool", "waverate" },
                       { "version", kVersion },
                       { "command", command },
                       { "config_hash", hex64(hash) },
                       { "seed", seed } };
}

void
write_file(const std::string& path, const std::string& content)
{
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw Error("cannot open '" + path + "' for writing");
  os << content;
  if (!os)
    throw Error("failed writing '" + path + "'");
}

std::string
read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string
args_key(const std::vector<std::string>& args)
{
  std::string key;
  for (const auto& a : args)
    key += a + '\x1f';
  return key;
}

struct CsvTable
{
  std::vector<std::vector<double>> rows;
  std::string seed = "none";
};

// Numeric CSV reader: '#' lines are comments (a "seed=" token is picked up),
// a non-numeric first row is a header.
CsvTable
read_csv(const std::string& text, std::size_t min_columns)
{
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    if (line[0] == '#') {
      const auto pos = line.find("seed=");
      if (pos != std::string::npos) {
        const auto end = line.find(' ', pos);
        table.seed = line.substr(pos + 5, end == std::string::npos ? end : end - pos - 5);
      }
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      char* endp = nullptr;
      const double v = std::strtod(cell.c_str(), &endp);
      if (endp == cell.c_str() || *endp != '\0') {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw Error("line " + std::to_string(lineno) + ": non-numeric CSV row");
    }
    first = false;
    if (row.size() < min_columns)
      throw Error("line " + std::to_string(lineno) + ": expected at least " +
                  std::to_string(min_columns) + " columns");
    table.rows.push_back(std::move(row));
  }
  return table;
}

ordered_json
audit_json(const IntegrabilityAudit& a)
{
  return ordered_json{ { "beta", a.beta },
                       { "L", a.half_width },
                       { "grid", a.grid },
                       { "sup", a.sup },
                       { "sup_half", a.sup_half },
                       { "integral", a.integral },
                       { "integral_half", a.integral_half },
                       { "growth_ratio", a.growth_ratio },
                       { "divergence_threshold", kDivergenceRatio },
                       { "bounded", a.bounded },
                       { "integrable", a.integrable },
                       { "pass", a.pass } };
}

ordered_json
audit_json(const GammaConditionAudit& a)
{
  const auto [lo, hi] = std::minmax_element(a.lambdas.begin(), a.lambdas.end());
  return ordered_json{ { "gamma", a.gamma },
                       { "grid_points", a.lambdas.size() },
                       { "lambda_min", a.lambdas.empty() ? 0.0 : *lo },
                       { "lambda_max", a.lambdas.empty() ? 0.0 : *hi },
                       { "sup_ratio", a.sup_ratio },
                       { "sup_ratio_refined", a.sup_ratio_refined },
                       { "constant", a.constant },
                       { "pass", a.pass } };
}

struct GridSpec
{
  double lo, hi;
  std::size_t steps;
};

GridSpec
parse_grid(const std::string& text)
{
  std::stringstream ss(text);
  std::string a, b, c;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c))
    throw DomainError("--grid expects lo:hi:steps");
  try {
    GridSpec g{ std::stod(a), std::stod(b), static_cast<std::size_t>(std::stoul(c)) };
    if (!(g.lo < g.hi) || g.steps < 2)
      throw DomainError("--grid requires lo < hi and steps >= 2");
    return g;
  } catch (const std::logic_error&) {
    throw DomainError("--grid expects lo:hi:steps");
  }
}

} // namespace

int
dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{ "Linear wavelet density estimation for linear processes", "waverate" };
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  // gen
  auto* gen = app.add_subcommand("gen", "Simulate a linear process path");
  std::string gen_config, gen_out;
  std::size_t gen_n = 0;
  std::uint64_t gen_seed = 0;
  gen->add_option("--config", gen_config, "TOML file with [process] and [innovation]")->required();
  gen->add_option("--n", gen_n, "Path length")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "RNG seed")->required();
  gen->add_option("--out", gen_out, "Output CSV (index,value)")->required();

  // fit
  auto* fitc = app.add_subcommand("fit", "Fit the wavelet density estimator to a sample");
  std::string fit_in, fit_out, fit_grid;
  int fit_vm = 4, fit_resolution = 10, fit_margin = 1;
  std::optional<int> fit_jn, fit_M;
  std::optional<double> fit_beta;
  fitc->add_option("--in", fit_in, "Input CSV (index,value or value)")->required();
  fitc->add_option("--vm", fit_vm, "Vanishing moments")->required();
  fitc->add_option("--jn", fit_jn, "Manual truncation level");
  fitc->add_option("--M", fit_M, "Number of non-zero coefficients (auto j_n)");
  fitc->add_option("--beta", fit_beta, "Smoothness exponent (auto j_n)");
  fitc->add_option("--resolution", fit_resolution, "Dyadic table resolution");
  fitc->add_option("--k-margin", fit_margin, "Extra translations per level");
  fitc->add_option("--grid", fit_grid, "Evaluation grid lo:hi:steps")->required();
  fitc->add_option("--out", fit_out, "Output CSV (x,fhat)")->required();

  // imse
  auto* imse = app.add_subcommand("imse", "Monte Carlo integrated squared errors");
  std::string imse_plan, imse_out;
  std::optional<std::uint64_t> imse_seed;
  unsigned imse_threads = 0;
  imse->add_option("--plan", imse_plan, "TOML plan with [experiment]")->required();
  imse->add_option("--out", imse_out, "Output CSV (n,rep,ise)")->required();
  imse->add_option("--seed", imse_seed, "Override the plan seed");
  imse->add_option("--threads", imse_threads, "Worker threads (default WAVERATE_THREADS)");

  // rate
  auto* rate = app.add_subcommand("rate", "Fit the log-log convergence rate");
  std::string rate_in, rate_out;
  int rate_M = 1;
  double rate_beta = 1.0;
  rate->add_option("--in", rate_in, "ISE CSV (n,rep,ise)")->required();
  rate->add_option("--M", rate_M, "M")->required();
  rate->add_option("--beta", rate_beta, "beta")->required();
  rate->add_option("--out", rate_out, "Output JSON")->required();

  // audit
  auto* audit = app.add_subcommand("audit", "Audit the integrability and gamma conditions");
  std::string audit_dist, audit_out;
  double audit_beta = 1.0, audit_gamma = 0.5, audit_L = 200.0;
  std::size_t audit_grid = (1u << 18) + 1;
  audit->add_option("--dist", audit_dist, "Distribution, e.g. chi_squared:6")->required();
  audit->add_option("--beta", audit_beta, "beta")->required();
  audit->add_option("--gamma", audit_gamma, "gamma")->required();
  audit->add_option("--L", audit_L, "Half-width of the u-domain");
  audit->add_option("--grid", audit_grid, "Quadrature nodes");
  audit->add_option("--out", audit_out, "Write the report here instead of stdout");

  // filters
  auto* filters = app.add_subcommand("filters", "Print Daubechies taps and diagnostics");
  int filters_vm = 4, filters_resolution = 10, filters_iterations = 12;
  filters->add_option("--vm", filters_vm, "Vanishing moments")->required();
  filters->add_option("--resolution", filters_resolution, "Dyadic table resolution");
  filters->add_option("--iterations", filters_iterations, "Cascade iterations");

  // scenarios
  auto* scenarios = app.add_subcommand("scenarios", "Preset experiment plans");
  bool scenarios_list = false;
  scenarios->add_flag("--list", scenarios_list, "List preset plans");

  // figure
  auto* figure = app.add_subcommand("figure", "Estimated and true densities for plotting");
  std::string figure_name, figure_out;
  std::size_t figure_n = std::size_t{ 1 } << 16, figure_points = 601;
  std::uint64_t figure_seed = 20240601;
  figure->add_option("--name", figure_name, "fig1, fig2 or fig3")->required();
  figure->add_option("--out", figure_out, "Output CSV (scenario,x,fhat,ftrue)")->required();
  figure->add_option("--n", figure_n, "Path length")->check(CLI::PositiveNumber);
  figure->add_option("--seed", figure_seed, "RNG seed");
  figure->add_option("--points", figure_points, "Grid points per panel");

  if (!args.empty() && !args.front().empty() && args.front()[0] != '-') {
    const auto subs = app.get_subcommands([](CLI::App*) { return true; });
    const bool known = std::any_of(subs.begin(), subs.end(),
                                   [&](CLI::App* s) { return s->get_name() == args.front(); });
    if (!known) {
      err << "error: unknown subcommand '" << args.front() << "'\n" << app.help();
      return exit_validation;
    }
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return exit_validation;
  }

  try {
    if (gen->parsed()) {
      const std::string text = read_file(gen_config);
      const RunConfig cfg = parse_config(text);
      if (!cfg.process)
        throw ConfigError({ "gen requires [process] and [innovation]" });
      const SamplePath path = gen_path(*cfg.process, gen_n, gen_seed);
      std::string body = header_line("gen", cfg.hash, std::to_string(gen_seed));
      body += "index,value\n";
      for (std::size_t i = 0; i < path.values.size(); ++i)
        body += std::to_string(i) + "," + format_double(path.values[i]) + "\n";
      write_file(gen_out, body);
      out << "seed: " << gen_seed << "\n";
      return exit_ok;
    }

    if (fitc->parsed()) {
      if (fit_jn && (fit_M || fit_beta))
        throw ConfigError({ "give either --jn or --M and --beta, not both" });
      if (!fit_jn && !(fit_M && fit_beta))
        throw ConfigError({ "give --jn, or both --M and --beta" });
      if (fit_vm < 1 || fit_vm > kMaxVanishingMoments)
        throw ConfigError({ "--vm must lie in [1, 12]" });
      const LevelRule rule =
        fit_jn ? LevelRule(ManualLevel{ *fit_jn }) : LevelRule(AutoLevel{ *fit_M, *fit_beta });
      const GridSpec grid = parse_grid(fit_grid);
      const EstimatorConfig config(Wavelet::make(fit_vm, fit_resolution), rule, fit_margin);
      const std::string text = read_file(fit_in);
      const CsvTable table = read_csv(text, 1);
      std::vector<double> sample;
      for (const auto& row : table.rows)
        sample.push_back(row.back());
      const DensityEstimate est = fit(sample, config);
      std::vector<double> xs(grid.steps);
      for (std::size_t i = 0; i < grid.steps; ++i)
        xs[i] = grid.lo + (grid.hi - grid.lo) * double(i) / double(grid.steps - 1);
      const auto values = evaluate_grid(est, config, xs);
      std::string body = header_line("fit", fnv1a(args_key(args) + text), table.seed);
      body += "x,fhat\n";
      for (std::size_t i = 0; i < xs.size(); ++i)
        body += format_double(xs[i]) + "," + format_double(values[i]) + "\n";
      write_file(fit_out, body);
      out << "n: " << est.n << " jn: " << est.jn << "\n";
      return exit_ok;
    }

    if (imse->parsed()) {
      const std::string text = read_file(imse_plan);
      const RunConfig cfg = parse_config(text);
      if (!cfg.experiment)
        throw ConfigError({ "imse requires an [experiment] section" });
      ExperimentPlan plan = *cfg.experiment;
      if (imse_seed)
        plan.seed = *imse_seed;
      else if (!cfg.seed)
        throw ConfigError({ "seed required: set [experiment] seed or pass --seed" });
      RunOptions options;
      options.threads = imse_threads;
      const ImseResult result = run_imse(plan, options);
      std::string body = header_line("imse", cfg.hash, std::to_string(plan.seed));
      body += "n,rep,ise\n";
      for (const auto& r : result.records)
        body += std::to_string(r.n) + "," + std::to_string(r.rep) + "," + format_double(r.ise) + "\n";
      write_file(imse_out, body);
      out << "seed: " << plan.seed << "\n";
      for (const auto& s : result.summary)
        out << "n=" << s.n << " mean_ise=" << format_double(s.mean)
            << " std_error=" << format_double(s.std_error) << "\n";
      for (const auto& w : result.warnings)
        out << "warning: " << w << "\n";
      if (!plan.theorem_applies)
        out << "note: theorem_applies=false for this scenario; no rate bound applies\n";
      return exit_ok;
    }

    if (rate->parsed()) {
      const std::string text = read_file(rate_in);
      const CsvTable table = read_csv(text, 3);
      std::vector<IseRecord> records;
      for (const auto& row : table.rows)
        records.push_back(
          IseRecord{ static_cast<std::size_t>(row[0]), static_cast<int>(row[1]), row[2] });
      const auto summary = summarize(records);
      const RateFit rf = fit_rate(summary, rate_M, rate_beta);
      ordered_json j;
      j["_meta"] = meta("rate", fnv1a(args_key(args) + text), table.seed);
      j["slope"] = rf.slope;
      j["intercept"] = rf.intercept;
      j["r_squared"] = rf.r_squared;
      j["theoretical_slope"] = rf.theoretical_slope;
      j["deviation"] = rf.deviation;
      j["used_ns"] = rf.used_ns;
      j["excluded_n"] = rf.excluded_n ? ordered_json(*rf.excluded_n) : ordered_json(nullptr);
      ordered_json levels = ordered_json::array();
      for (const auto& s : summary)
        levels.push_back(
          { { "n", s.n }, { "reps", s.reps }, { "mean", s.mean }, { "std_error", s.std_error } });
      j["summary"] = levels;
      write_file(rate_out, j.dump(2) + "\n");
      out << "slope: " << format_double(rf.slope) << " r_squared: " << format_double(rf.r_squared)
          << "\n";
      return exit_ok;
    }

    if (audit->parsed()) {
      const InnovationDist dist = parse_distribution(audit_dist);
      const auto integrability = audit_integrability(dist, audit_beta, audit_L, audit_grid);
      const auto lambdas = default_lambda_grid();
      const auto gamma = audit_gamma_condition(dist, audit_gamma, lambdas);
      ordered_json j;
      j["_meta"] = meta("audit", fnv1a(args_key(args)), "none");
      j["distribution"] = describe(dist);
      j["integrability"] = audit_json(integrability);
      j["gamma_condition"] = audit_json(gamma);
      j["pass"] = integrability.pass && gamma.pass;
      const std::string body = j.dump(2) + "\n";
      if (audit_out.empty())
        out << body;
      else
        write_file(audit_out, body);
      return exit_ok;
    }

    if (filters->parsed()) {
      const FilterPair f = daubechies_filter(filters_vm);
      const FilterDefects d = filter_defects(f);
      const DyadicTable t = cascade(f, filters_resolution, filters_iterations);
      ordered_json moments = ordered_json::array();
      for (int r = 0; r < f.vm; ++r)
        moments.push_back(vanishing_moment_defect(t, r));
      ordered_json j;
      j["_meta"] = meta("filters", fnv1a(args_key(args)), "none");
      j["vm"] = f.vm;
      j["taps"] = f.taps();
      j["h"] = f.h;
      j["g"] = f.g;
      j["smoothness_ok"] = f.smoothness_ok();
      j["defects"] = { { "sum", d.sum },
                       { "shift_orthogonality", d.orthogonality },
                       { "discrete_moments", d.moments } };
      j["cascade"] = { { "resolution", t.resolution() },
                       { "iterations", t.iterations() },
                       { "sup_difference", t.sup_difference() },
                       { "converged", t.converged() },
                       { "partition_of_unity_defect", partition_of_unity_defect(t) },
                       { "phi_integral", t.moment(WaveletKind::phi, 0) },
                       { "psi_integral", t.moment(WaveletKind::psi, 0) },
                       { "orthonormality_defect", orthonormality_defect(t) },
                       { "vanishing_moment_defects", moments },
                       { "phi_fourier_decay_constant",
                         fourier_decay_constant(t, WaveletKind::phi) } };
      out << j.dump(2) << "\n";
      return exit_ok;
    }

    if (scenarios->parsed()) {
      for (const auto& p : scenario_presets()) {
        out << p.name << "\tscenario=" << p.scenario << " n=";
        for (std::size_t i = 0; i < p.ns.size(); ++i)
          out << (i ? "," : "") << p.ns[i];
        out << " reps=" << p.reps << " vm=" << p.estimator.vm << " taps=" << 2 * p.estimator.vm;
        if (const auto* a = std::get_if<AutoLevel>(&p.estimator.rule))
          out << " M=" << a->M << " beta=" << a->beta;
        out << " window=[" << p.quad.lo << "," << p.quad.hi << "]"
            << " theorem_applies=" << (p.theorem_applies ? "true" : "false") << "\n";
      }
      return exit_ok;
    }

    if (figure->parsed()) {
      const auto panels = figure_panels(figure_name, figure_n, figure_seed, figure_points);
      std::string body = header_line("figure", fnv1a(args_key(args)), std::to_string(figure_seed));
      body += "scenario,x,fhat,ftrue\n";
      for (const auto& p : panels)
        for (std::size_t i = 0; i < p.x.size(); ++i)
          body += p.scenario + "," + format_double(p.x[i]) + "," + format_double(p.fhat[i]) + "," +
                  format_double(p.ftrue[i]) + "\n";
      write_file(figure_out, body);
      out << "seed: " << figure_seed << "\n";
      return exit_ok;
    }
  } catch (const ConfigError& e) {
    for (const auto& p : e.problems)
      err << "error: " << p << "\n";
    return exit_validation;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return exit_validation;
  } catch (const UnsupportedOrder& e) {
    err << "error: " << e.what() << "\n";
    return exit_validation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_runtime;
  }
  err << app.help();
  return exit_validation;
}

} // namespace waverate
