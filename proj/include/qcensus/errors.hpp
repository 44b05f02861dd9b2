#pragma once

#include <stdexcept>
#include <string>

namespace qcensus {

// Exit-code classes used by the CLI: validation problems map to 2, everything
// else (resources, analytic failures, unsupported requests) maps to 3.
enum class ErrorKind { argument, domain, unsupported, resource, numerical, analytic, pole, reconstruction, io };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

inline const char* kind_name(ErrorKind k)
{
  switch (k) {
  case ErrorKind::argument: return "argument";
  case ErrorKind::domain: return "domain";
  case ErrorKind::unsupported: return "unsupported";
  case ErrorKind::resource: return "resource";
  case ErrorKind::numerical: return "numerical";
  case ErrorKind::analytic: return "analytic";
  case ErrorKind::pole: return "pole";
  case ErrorKind::reconstruction: return "reconstruction";
  case ErrorKind::io: return "io";
  }
  return "unknown";
}

struct ArgumentError : Error {
  explicit ArgumentError(const std::string& m) : Error(ErrorKind::argument, m) {}
};
struct DomainError : Error {
  explicit DomainError(const std::string& m) : Error(ErrorKind::domain, m) {}
};
struct UnsupportedError : Error {
  explicit UnsupportedError(const std::string& m) : Error(ErrorKind::unsupported, m) {}
};
struct ResourceError : Error {
  explicit ResourceError(const std::string& m) : Error(ErrorKind::resource, m) {}
};
struct NumericalError : Error {
  explicit NumericalError(const std::string& m) : Error(ErrorKind::numerical, m) {}
};
struct AnalyticError : Error {
  explicit AnalyticError(const std::string& m) : Error(ErrorKind::analytic, m) {}
};
struct PoleError : Error {
  explicit PoleError(const std::string& m) : Error(ErrorKind::pole, m) {}
};
struct IoError : Error {
  explicit IoError(const std::string& m) : Error(ErrorKind::io, m) {}
};

} // namespace qcensus
