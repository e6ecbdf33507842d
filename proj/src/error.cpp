#include "helmvp/error.hpp"

namespace helmvp {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::OutOfRange: return "out of range";
    case ErrorKind::Overflow: return "overflow";
    case ErrorKind::NonFinite: return "non-finite value";
    case ErrorKind::TruncationFailure: return "truncation failure";
    case ErrorKind::SizeGuard: return "size guard";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

}  // namespace helmvp
