#include "recomb/error.hpp"

namespace recomb {

Error::Error(Kind kind, std::string module, const std::string& message)
    : std::runtime_error(module + ": " + message), kind_(kind), module_(std::move(module)) {}

void fail(Error::Kind kind, const char* module, const std::string& message) {
  throw Error(kind, module, message);
}

}  // namespace recomb
