#pragma once

#include "waverate/experiments.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace waverate {

//! Validated contents of a TOML run file with the optional sections
//! [process], [innovation], [wavelet], [estimator] and [experiment].
struct RunConfig
{
  std::optional<ProcessConfig> process;
  EstimatorSpec estimator;
  bool estimator_given = false;
  std::optional<ExperimentPlan> experiment;
  std::optional<std::uint64_t> seed;
  //! FNV-1a hash of the source text.
  std::uint64_t hash = 0;
};

//! Parse and validate. Throws ConfigError carrying every problem found;
//! syntax errors report the line number.
RunConfig
parse_config(std::string_view text);

RunConfig
load_config(const std::string& path);

std::uint64_t
fnv1a(std::string_view text);

std::string
hex64(std::uint64_t value);

//! "gaussian:0,1", "cauchy:1", "stable:1.5,1", "chi_squared:6", "gamma:3,1".
InnovationDist
parse_distribution(std::string_view spec);

} // namespace waverate
