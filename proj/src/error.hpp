#pragma once

#include <stdexcept>
#include <string>

namespace lrp {

// Error taxonomy mirrored 1:1 by the C API status codes.
enum class ErrorKind {
  kArgument,  // bad argument, index out of range, missing required input
  kIo,        // file missing / unreadable / unwritable
  kFormat,    // file exists but is malformed
  kData,      // well-formed file carrying invalid values (NaN, bad ranges)
  kConfig,    // unknown key or invalid parameter value
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_argument(std::string msg) {
  throw Error(ErrorKind::kArgument, std::move(msg));
}
[[noreturn]] inline void throw_io(std::string msg) {
  throw Error(ErrorKind::kIo, std::move(msg));
}
[[noreturn]] inline void throw_format(std::string msg) {
  throw Error(ErrorKind::kFormat, std::move(msg));
}
[[noreturn]] inline void throw_data(std::string msg) {
  throw Error(ErrorKind::kData, std::move(msg));
}
[[noreturn]] inline void throw_config(std::string msg) {
  throw Error(ErrorKind::kConfig, std::move(msg));
}

}  // namespace lrp
