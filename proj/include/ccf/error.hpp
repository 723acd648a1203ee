#pragma once

#include <stdexcept>
#include <string>

namespace ccf {

enum class ErrorKind {
  Usage,              // malformed request or arguments
  Domain,             // parameter outside A0
  Precondition,       // operation called outside its contract
  NumericExhaustion,  // double precision ran out
  Budget,             // enumeration budget exceeded
  NoSignChange,       // bisection endpoints do not bracket a root
  DegenerateFit,      // box counting regression has no spread
  Io,                 // filesystem failure
  CheckFailed,        // a verification suite found a violation
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

const char* to_string(ErrorKind kind) noexcept;

}  // namespace ccf
