#include "s2bias/error.hpp"

namespace s2bias {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage: return "usage";
    case ErrorKind::domain: return "domain";
    case ErrorKind::pole: return "pole";
    case ErrorKind::precision: return "precision";
    case ErrorKind::resource: return "resource";
    case ErrorKind::cache_version: return "cache-version";
    case ErrorKind::cache_checksum: return "cache-checksum";
    case ErrorKind::cache_truncated: return "cache-truncated";
    case ErrorKind::grh_violation: return "grh-violation";
    case ErrorKind::consistency: return "consistency";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage:
    case ErrorKind::domain:
      return 2;
    case ErrorKind::resource:
    case ErrorKind::cache_version:
    case ErrorKind::cache_checksum:
    case ErrorKind::cache_truncated:
      return 3;
    case ErrorKind::precision:
    case ErrorKind::pole:
      return 4;
    case ErrorKind::grh_violation:
    case ErrorKind::consistency:
      return 5;
  }
  return 1;
}

}  // namespace s2bias
