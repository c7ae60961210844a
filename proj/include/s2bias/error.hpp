#pragma once

#include <stdexcept>
#include <string>

namespace s2bias {

enum class ErrorKind {
  usage,
  domain,
  pole,
  precision,
  resource,
  cache_version,
  cache_checksum,
  cache_truncated,
  grh_violation,
  consistency,
};

const char* to_string(ErrorKind kind);

// Process exit code for a failure of the given kind:
// 2 usage, 3 resource, 4 precision, 5 internal-consistency.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace s2bias
