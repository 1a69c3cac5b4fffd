#pragma once

#include <stdexcept>
#include <string>

namespace styler {

// Error taxonomy shared by the library and the CLI. The CLI maps kinds to
// exit codes: config -> 2, plan -> 3, numeric -> 4, everything else -> 1.
enum class ErrorKind {
  kConfig,   // bad configuration, invalid arguments, missing/corrupt files
  kShape,    // tensor shape mismatch
  kPlan,     // invalid spatial/temporal plan (overlap, gap, non-disjoint masks)
  kNumeric,  // non-finite loss, degenerate schedule values
  kIo,       // filesystem / serialization failures
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  const char* kind_name() const {
    switch (kind_) {
      case ErrorKind::kConfig: return "config";
      case ErrorKind::kShape: return "shape";
      case ErrorKind::kPlan: return "plan";
      case ErrorKind::kNumeric: return "numeric";
      case ErrorKind::kIo: return "io";
    }
    return "unknown";
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool cond, ErrorKind kind, const std::string& message) {
  if (!cond) fail(kind, message);
}

}  // namespace styler
