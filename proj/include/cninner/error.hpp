#pragma once

#include <stdexcept>
#include <string>

namespace cninner {

enum class ErrorCode {
  invalid_argument = 1,
  domain = 2,
  parse = 3,
  budget = 4,
  invariant = 5,
  unsupported = 6,
  internal = 7,
};

/// Library exception. The code is what the C API reports.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace cninner
