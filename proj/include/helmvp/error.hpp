#pragma once

#include <stdexcept>
#include <string>

namespace helmvp {

enum class ErrorKind {
  InvalidArgument,
  OutOfRange,
  Overflow,
  NonFinite,
  TruncationFailure,
  SizeGuard,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace helmvp
