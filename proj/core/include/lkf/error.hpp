#pragma once

#include <stdexcept>
#include <string>

namespace lkf {

// Error categories. The CLI maps any lkf::Error to exit code 1; flag parsing
// problems exit 2 before any work happens.
enum class Err {
  invalid_argument,
  shape_mismatch,
  io,
  bad_magic,
  bad_version,
  truncated,
  duplicate_name,
  bad_format,
};

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Err code() const noexcept { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& msg) { throw Error(code, msg); }

}  // namespace lkf
