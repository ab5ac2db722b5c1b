#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace starmod {

// All recoverable failures carry a stable machine-readable code next to the
// human-readable message, so callers (and the scenario runner) can branch on
// the kind without parsing text.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

[[noreturn]] inline void fail(std::string code, const std::string& message) {
  throw Error(std::move(code), message);
}

}  // namespace starmod
