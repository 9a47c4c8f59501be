#include "waverate/config.hpp"

#include "waverate/error.hpp"

#include <toml.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace waverate {

std::uint64_t
fnv1a(std::string_view text)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string
hex64(std::uint64_t value)
{
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xF];
    value >>= 4;
  }
  return out;
}

namespace {

// Reads typed fields from one table and records every problem instead of
// stopping at the first.
class Section
{
public:
  Section(const toml::table* table, std::string name, std::vector<std::string>& problems)
    : table_(table)
    , name_(std::move(name))
    , problems_(problems)
  {}

  bool present() const { return table_ != nullptr; }
  bool has(std::string_view key) const { return table_ && table_->contains(key); }

  void allow(std::initializer_list<std::string_view> keys, std::string_view context = {})
  {
    if (!table_)
      return;
    std::set<std::string_view> ok(keys.begin(), keys.end());
    for (const auto& [key, value] : *table_) {
      if (!ok.count(key.str())) {
        std::string msg = "[" + name_ + "] unknown key '" + std::string(key.str()) + "'";
        if (!context.empty())
          msg += " for " + std::string(context);
        problems_.push_back(msg);
      }
    }
  }

  std::optional<double> number(std::string_view key)
  {
    const toml::node* node = find(key);
    if (!node)
      return std::nullopt;
    if (auto v = node->value<double>()) {
      if (!std::isfinite(*v)) {
        fail(key, "must be finite");
        return std::nullopt;
      }
      return *v;
    }
    fail(key, "must be a number");
    return std::nullopt;
  }

  std::optional<long long> integer(std::string_view key)
  {
    const toml::node* node = find(key);
    if (!node)
      return std::nullopt;
    if (node->is_integer())
      return node->value<long long>();
    fail(key, "must be an integer");
    return std::nullopt;
  }

  std::optional<std::string> string(std::string_view key)
  {
    const toml::node* node = find(key);
    if (!node)
      return std::nullopt;
    if (auto v = node->value<std::string>())
      return *v;
    fail(key, "must be a string");
    return std::nullopt;
  }

  std::optional<bool> boolean(std::string_view key)
  {
    const toml::node* node = find(key);
    if (!node)
      return std::nullopt;
    if (auto v = node->value<bool>())
      return *v;
    fail(key, "must be a boolean");
    return std::nullopt;
  }

  std::optional<std::vector<double>> numbers(std::string_view key)
  {
    const toml::node* node = find(key);
    if (!node)
      return std::nullopt;
    const toml::array* arr = node->as_array();
    if (!arr) {
      fail(key, "must be an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (const auto& item : *arr) {
      auto v = item.value<double>();
      if (!v || !std::isfinite(*v)) {
        fail(key, "must contain finite numbers only");
        return std::nullopt;
      }
      out.push_back(*v);
    }
    return out;
  }

  std::optional<std::vector<long long>> integers(std::string_view key)
  {
    const toml::node* node = find(key);
    if (!node)
      return std::nullopt;
    const toml::array* arr = node->as_array();
    if (!arr) {
      fail(key, "must be an array of integers");
      return std::nullopt;
    }
    std::vector<long long> out;
    for (const auto& item : *arr) {
      if (!item.is_integer()) {
        fail(key, "must contain integers only");
        return std::nullopt;
      }
      out.push_back(*item.value<long long>());
    }
    return out;
  }

  void fail(std::string_view key, std::string_view what)
  {
    problems_.push_back("[" + name_ + "] " + std::string(key) + " " + std::string(what));
  }
  void problem(std::string what) { problems_.push_back("[" + name_ + "] " + std::move(what)); }

private:
  const toml::node* find(std::string_view key) const
  {
    return table_ ? table_->get(key) : nullptr;
  }

  const toml::table* table_;
  std::string name_;
  std::vector<std::string>& problems_;
};

template<class F>
void
guarded(Section& section, F&& f)
{
  try {
    f();
  } catch (const ConfigError& e) {
    for (const auto& p : e.problems)
      section.problem(p);
  } catch (const Error& e) {
    section.problem(e.what());
  }
}

std::optional<CoefficientSeq>
read_coefficients(Section& s)
{
  const auto kind = s.string("kind");
  if (!kind) {
    if (!s.has("kind"))
      s.problem("kind is required (fractional, geometric, ma, custom)");
    return std::nullopt;
  }
  std::optional<CoefficientSeq> out;
  const auto truncation = s.integer("truncation");
  if (truncation && *truncation < 1)
    s.fail("truncation", "must be a positive integer");
  const std::size_t T =
    truncation && *truncation >= 1 ? static_cast<std::size_t>(*truncation) : kDefaultTruncation;

  if (*kind == "fractional" || *kind == "geometric") {
    const bool frac = *kind == "fractional";
    s.allow({ "kind", frac ? "d" : "rho", "truncation", "burn_in" }, "kind '" + *kind + "'");
    const auto param = s.number(frac ? "d" : "rho");
    if (!param && !s.has(frac ? "d" : "rho"))
      s.problem(std::string(frac ? "d" : "rho") + " is required for kind '" + *kind + "'");
    if (param)
      guarded(s, [&] {
        out = frac ? CoefficientSeq::fractional(*param, T) : CoefficientSeq::geometric(*param, T);
      });
  } else if (*kind == "ma" || *kind == "custom") {
    s.allow({ "kind", "taps", "burn_in" }, "kind '" + *kind + "'");
    const auto taps = s.numbers("taps");
    if (!taps && !s.has("taps"))
      s.problem("taps is required for kind '" + *kind + "'");
    if (taps)
      guarded(s, [&] {
        out = *kind == "ma" ? CoefficientSeq::moving_average(*taps) : CoefficientSeq::custom(*taps);
      });
  } else {
    s.fail("kind", "must be one of fractional, geometric, ma, custom");
  }
  return out;
}

std::optional<InnovationDist>
read_innovation(Section& s)
{
  const auto kind = s.string("kind");
  if (!kind) {
    if (!s.has("kind"))
      s.problem("kind is required (gaussian, cauchy, stable, chi_squared, gamma)");
    return std::nullopt;
  }
  std::optional<InnovationDist> out;
  const std::string ctx = "kind '" + *kind + "'";
  if (*kind == "gaussian") {
    s.allow({ "kind", "mu", "sigma" }, ctx);
    out = Gaussian{ s.number("mu").value_or(0.0), s.number("sigma").value_or(1.0) };
  } else if (*kind == "cauchy") {
    s.allow({ "kind", "scale" }, ctx);
    out = Cauchy{ s.number("scale").value_or(1.0) };
  } else if (*kind == "stable") {
    s.allow({ "kind", "alpha", "scale" }, ctx);
    const auto alpha = s.number("alpha");
    if (!alpha && !s.has("alpha"))
      s.problem("alpha is required for kind 'stable'");
    out = Stable{ alpha.value_or(2.0), s.number("scale").value_or(1.0) };
  } else if (*kind == "chi_squared") {
    s.allow({ "kind", "df" }, ctx);
    const auto df = s.integer("df");
    if (!df && !s.has("df"))
      s.problem("df is required for kind 'chi_squared'");
    out = ChiSquared{ static_cast<int>(df.value_or(1)) };
  } else if (*kind == "gamma") {
    s.allow({ "kind", "shape", "theta" }, ctx);
    const auto shape = s.number("shape");
    if (!shape && !s.has("shape"))
      s.problem("shape is required for kind 'gamma'");
    out = GammaDist{ shape.value_or(1.0), s.number("theta").value_or(1.0) };
  } else {
    s.fail("kind", "must be one of gaussian, cauchy, stable, chi_squared, gamma");
    return std::nullopt;
  }
  bool ok = true;
  guarded(s, [&] {
    try {
      validate(*out);
    } catch (...) {
      ok = false;
      throw;
    }
  });
  if (!ok)
    return std::nullopt;
  return out;
}

} // namespace

RunConfig
parse_config(std::string_view text)
{
  RunConfig cfg;
  cfg.hash = fnv1a(text);
  toml::table doc;
  try {
    doc = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "syntax error at line " << e.source().begin.line << ": " << e.description();
    throw ConfigError({ os.str() });
  }

  std::vector<std::string> problems;
  static const std::set<std::string_view> sections = {
    "process", "innovation", "wavelet", "estimator", "experiment"
  };
  for (const auto& [key, value] : doc) {
    if (!sections.count(key.str()))
      problems.push_back("unknown section '" + std::string(key.str()) + "'");
    else if (!value.is_table())
      problems.push_back("'" + std::string(key.str()) + "' must be a table");
  }

  Section process(doc["process"].as_table(), "process", problems);
  Section innovation(doc["innovation"].as_table(), "innovation", problems);
  Section wavelet(doc["wavelet"].as_table(), "wavelet", problems);
  Section estimator(doc["estimator"].as_table(), "estimator", problems);
  Section experiment(doc["experiment"].as_table(), "experiment", problems);

  // [process] + [innovation]
  if (process.present() != innovation.present()) {
    problems.push_back("[process] and [innovation] must be given together");
  }
  std::optional<CoefficientSeq> coeffs;
  std::optional<InnovationDist> dist;
  if (process.present())
    coeffs = read_coefficients(process);
  if (innovation.present())
    dist = read_innovation(innovation);
  if (coeffs && dist) {
    const auto burn = process.integer("burn_in");
    if (burn && *burn < 0)
      process.fail("burn_in", "must be >= 0");
    guarded(process, [&] {
      cfg.process = ProcessConfig(*coeffs, *dist, burn && *burn > 0 ? std::size_t(*burn) : 0);
    });
    if (cfg.process && !coeffs->is_finite() && cfg.process->burn_in < coeffs->length())
      process.problem("burn_in must be >= truncation T for infinite coefficient kinds");
  }

  // [wavelet]
  wavelet.allow({ "vm", "resolution", "iterations" });
  if (auto vm = wavelet.integer("vm")) {
    if (*vm < 1 || *vm > kMaxVanishingMoments)
      wavelet.fail("vm", "must lie in [1, 12]");
    cfg.estimator.vm = static_cast<int>(*vm);
  }
  if (auto j = wavelet.integer("resolution")) {
    if (*j < 1 || *j > 20)
      wavelet.fail("resolution", "must lie in [1, 20]");
    cfg.estimator.resolution = static_cast<int>(*j);
  }
  if (auto it = wavelet.integer("iterations")) {
    if (*it < 1)
      wavelet.fail("iterations", "must be >= 1");
    cfg.estimator.iterations = static_cast<int>(*it);
  }

  // [estimator]
  estimator.allow({ "jn", "M", "beta", "k_margin" });
  if (estimator.present()) {
    const auto jn = estimator.integer("jn");
    const auto M = estimator.integer("M");
    const auto beta = estimator.number("beta");
    if (auto margin = estimator.integer("k_margin")) {
      if (*margin < 0)
        estimator.fail("k_margin", "must be >= 0");
      cfg.estimator.k_margin = static_cast<int>(*margin);
    }
    if (jn && (M || beta)) {
      estimator.problem("give either jn (manual) or M and beta (auto), not both");
    } else if (jn) {
      if (*jn < 0)
        estimator.fail("jn", "must be >= 0");
      cfg.estimator.rule = ManualLevel{ static_cast<int>(*jn) };
      cfg.estimator_given = true;
    } else if (M || beta) {
      if (!M || !beta)
        estimator.problem("auto j_n needs both M and beta");
      if (M && *M < 1)
        estimator.fail("M", "must be >= 1");
      if (beta && !(*beta > 0.0))
        estimator.fail("beta", "must be > 0");
      if (M && beta && *M >= 1 && *beta > 0.0) {
        cfg.estimator.rule = AutoLevel{ static_cast<int>(*M), *beta };
        cfg.estimator_given = true;
        if (double(cfg.estimator.vm) < std::ceil(double(*M) * *beta))
          estimator.problem("wavelet vm >= ceil(M*beta) required (vm=" +
                            std::to_string(cfg.estimator.vm) + ")");
        if (dist && *beta < condition_gamma(*dist))
          estimator.problem("beta >= gamma of the innovation required");
      }
    } else if (estimator.has("jn") || estimator.has("M") || estimator.has("beta")) {
      // type errors already recorded
    } else {
      estimator.problem("give jn (manual) or M and beta (auto)");
    }
  }

  // [experiment]
  experiment.allow({ "scenario", "name", "ns", "reps", "seed", "L_eval", "lo", "hi", "grid",
                     "theorem_applies" });
  if (auto seed = experiment.integer("seed")) {
    if (*seed < 0)
      experiment.fail("seed", "must be a non-negative integer");
    cfg.seed = static_cast<std::uint64_t>(*seed);
  }
  if (experiment.present()) {
    ExperimentPlan plan;
    const auto scenario = experiment.string("scenario");
    plan.scenario = scenario.value_or(cfg.process ? "custom" : "");
    std::optional<ExperimentPlan> preset;
    if (plan.scenario.empty()) {
      experiment.problem("scenario is required without [process]");
    } else if (plan.scenario == "custom") {
      if (!process.present())
        experiment.problem("scenario 'custom' requires [process] and [innovation]");
      plan.process = cfg.process;
    } else {
      preset = find_preset(plan.scenario);
      if (!preset)
        experiment.fail("scenario", "is not a known scenario");
      else if (process.present())
        experiment.problem("a named scenario defines its own process; drop [process] or use "
                           "scenario = \"custom\"");
    }
    plan.name = experiment.string("name").value_or(preset ? preset->name : plan.scenario);
    if (preset) {
      plan.scenario = preset->scenario;
      plan.estimator = preset->estimator;
      plan.quad = preset->quad;
      plan.theorem_applies = preset->theorem_applies;
    }
    if (cfg.estimator_given || wavelet.present()) {
      const LevelRule rule = plan.estimator.rule;
      plan.estimator = cfg.estimator;
      if (!cfg.estimator_given)
        plan.estimator.rule = rule;
    }
    if (auto ns = experiment.integers("ns")) {
      for (long long n : *ns) {
        if (n < 2) {
          experiment.fail("ns", "entries must be >= 2");
          break;
        }
        plan.ns.push_back(static_cast<std::size_t>(n));
      }
    } else if (preset) {
      plan.ns = preset->ns;
    } else if (!experiment.has("ns")) {
      experiment.problem("ns is required");
    }
    if (auto reps = experiment.integer("reps"))
      plan.reps = static_cast<int>(*reps);
    else if (preset)
      plan.reps = preset->reps;
    if (cfg.seed)
      plan.seed = *cfg.seed;
    const auto L = experiment.number("L_eval");
    const auto lo = experiment.number("lo");
    const auto hi = experiment.number("hi");
    if (L && (lo || hi))
      experiment.problem("give either L_eval or lo/hi");
    if (L) {
      if (!(*L > 0.0))
        experiment.fail("L_eval", "must be > 0");
      plan.quad.lo = -*L;
      plan.quad.hi = *L;
    }
    if (lo)
      plan.quad.lo = *lo;
    if (hi)
      plan.quad.hi = *hi;
    if (auto grid = experiment.integer("grid")) {
      if (*grid < 3)
        experiment.fail("grid", "must be >= 3");
      else
        plan.quad.grid = static_cast<std::size_t>(*grid);
    }
    if (auto applies = experiment.boolean("theorem_applies"))
      plan.theorem_applies = *applies;
    guarded(experiment, [&] {
      if (!plan.scenario.empty() && (plan.scenario != "custom" || plan.process))
        plan.validate();
    });
    cfg.experiment = std::move(plan);
  }

  if (!problems.empty()) {
    std::vector<std::string> unique;
    for (auto& p : problems)
      if (std::find(unique.begin(), unique.end(), p) == unique.end())
        unique.push_back(std::move(p));
    throw ConfigError(std::move(unique));
  }
  return cfg;
}

RunConfig
load_config(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError({ "cannot read config file '" + path + "'" });
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

InnovationDist
parse_distribution(std::string_view spec)
{
  const auto colon = spec.find(':');
  const std::string kind(spec.substr(0, colon));
  std::vector<double> args;
  if (colon != std::string_view::npos) {
    std::string rest(spec.substr(colon + 1));
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        args.push_back(std::stod(item, &used));
        if (used != item.size())
          throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw DomainError("distribution parameter '" + item + "' is not a number");
      }
    }
  }
  auto arg = [&](std::size_t i, double fallback) { return i < args.size() ? args[i] : fallback; };
  auto expect = [&](std::size_t most) {
    if (args.size() > most)
      throw DomainError("too many parameters for distribution '" + kind + "'");
  };
  InnovationDist out;
  if (kind == "gaussian") {
    expect(2);
    out = Gaussian{ arg(0, 0.0), arg(1, 1.0) };
  } else if (kind == "cauchy") {
    expect(1);
    out = Cauchy{ arg(0, 1.0) };
  } else if (kind == "stable") {
    expect(2);
    if (args.empty())
      throw DomainError("stable requires alpha");
    out = Stable{ args[0], arg(1, 1.0) };
  } else if (kind == "chi_squared") {
    expect(1);
    if (args.empty() || std::floor(args[0]) != args[0])
      throw DomainError("chi_squared requires an integer df");
    out = ChiSquared{ static_cast<int>(args[0]) };
  } else if (kind == "gamma") {
    expect(2);
    if (args.empty())
      throw DomainError("gamma requires a shape");
    out = GammaDist{ args[0], arg(1, 1.0) };
  } else {
    throw DomainError("unknown distribution '" + kind +
                      "' (gaussian, cauchy, stable, chi_squared, gamma)");
  }
  validate(out);
  return out;
}

} // namespace waverate
