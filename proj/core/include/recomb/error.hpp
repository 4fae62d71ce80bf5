#pragma once

#include <stdexcept>
#include <string>

namespace recomb {

/// Error raised by every module of the library. `module()` names the module
/// that detected the problem so that drivers can surface it.
class Error : public std::runtime_error {
 public:
  enum class Kind { invalid_argument, cap_exceeded, invariant_violation, numerical };

  Error(Kind kind, std::string module, const std::string& message);

  Kind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  Kind kind_;
  std::string module_;
};

[[noreturn]] void fail(Error::Kind kind, const char* module, const std::string& message);

inline void require(bool condition, const char* module, const std::string& message) {
  if (!condition) fail(Error::Kind::invalid_argument, module, message);
}

}  // namespace recomb
