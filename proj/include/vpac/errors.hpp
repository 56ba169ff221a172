#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vpac {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when the evolving field leaves the admissible range or turns non-finite.
class BlowupError : public Error {
 public:
  BlowupError(const std::string& what, double time)
      : Error(what + " (t = " + std::to_string(time) + ")"), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

class ResolutionError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class EmptyInterfaceError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct ConfigViolation {
  std::string path;
  std::string constraint;
};

/// Lists every violated constraint found while loading a configuration.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<ConfigViolation> violations)
      : Error(format(violations)), violations_(std::move(violations)) {}
  ConfigError(const std::string& path, const std::string& constraint)
      : ConfigError(std::vector<ConfigViolation>{{path, constraint}}) {}
  const std::vector<ConfigViolation>& violations() const { return violations_; }

 private:
  static std::string format(const std::vector<ConfigViolation>& v) {
    std::string out = "invalid configuration:";
    for (const auto& e : v) out += "\n  " + e.path + ": " + e.constraint;
    return out;
  }
  std::vector<ConfigViolation> violations_;
};

}  // namespace vpac
