#pragma once

#include <stdexcept>
#include <string>

namespace gfet {

// Base class for all library errors. Subclasses map onto the C API /
// CLI exit codes (config -> 2, solver -> 3, io -> 4).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

class AssemblyError : public Error {
 public:
  explicit AssemblyError(const std::string& msg) : Error(msg) {}
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& msg) : Error(msg) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace gfet
