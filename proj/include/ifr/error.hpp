#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ifr {

// Broad failure classes. The CLI prints the category name as the first,
// machine-parsable token of its single-line error report.
enum class ErrorCategory {
  kDomain,      // argument outside a function's domain
  kValidation,  // malformed or inconsistent input data
  kDimension,   // shape / basis / sample-count mismatch
  kNumeric,     // factorization or other numerical failure
  kIo,          // file system and parsing of files
  kUsage,       // bad command line or configuration
};

std::string_view category_name(ErrorCategory c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory c, const std::string& what) {
  throw Error(c, what);
}

}  // namespace ifr
