#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace waverate {

//! Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! Requested wavelet order is outside the supported range.
class UnsupportedOrder : public Error
{
public:
  using Error::Error;
};

//! An argument violates the mathematical domain of an operation.
class DomainError : public Error
{
public:
  using Error::Error;
};

//! Index beyond a truncated sequence.
class OutOfRange : public Error
{
public:
  using Error::Error;
};

//! Characteristic function has not decayed at the edge of the inversion window.
class InsufficientDomain : public Error
{
public:
  InsufficientDomain(const std::string& what, double edge_modulus)
    : Error(what)
    , edge_modulus(edge_modulus)
  {}
  double edge_modulus;
};

//! A precondition of an operation is not met (too few points, empty input, ...).
class PreconditionError : public Error
{
public:
  using Error::Error;
};

//! Configuration validation failure; carries every violation found.
class ConfigError : public Error
{
public:
  explicit ConfigError(std::vector<std::string> problems)
    : Error(join(problems))
    , problems(std::move(problems))
  {}

  std::vector<std::string> problems;

private:
  static std::string join(const std::vector<std::string>& items)
  {
    std::string out;
    for (const auto& item : items) {
      if (!out.empty())
        out += "; ";
      out += item;
    }
    return out;
  }
};

} // namespace waverate
