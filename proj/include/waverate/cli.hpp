#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace waverate {

//! Exit statuses of the command-line tool.
enum ExitStatus : int
{
  exit_ok = 0,
  exit_validation = 1,
  exit_runtime = 2,
};

//! Run one command line (without the program name). Subcommands: gen, fit,
//! imse, rate, audit, filters, scenarios, figure.
int
dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

//! %.17g
std::string
format_double(double value);

} // namespace waverate
