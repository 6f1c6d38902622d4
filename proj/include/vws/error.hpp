#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace vws {

// Runtime error with a stable machine-readable code plus free-form detail.
// The code is what CLI exit-code mapping and tests key on.
class Error : public std::runtime_error {
 public:
  explicit Error(std::string code, const std::string& detail = "")
      : std::runtime_error(detail.empty() ? code : code + ": " + detail),
        code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void fail(std::string code, const std::string& detail = "") {
  throw Error(std::move(code), detail);
}

inline void require(bool condition, const char* code, const std::string& detail = "") {
  if (!condition) fail(code, detail);
}

}  // namespace vws
