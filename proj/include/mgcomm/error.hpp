#pragma once

#include <stdexcept>
#include <string>

namespace mgcomm {

enum class ErrorCode {
  kInvalidArgument = 1,
  kDimension = 2,
  kModel = 3,
  kNumerical = 4,
  kInfeasible = 5,
  kParse = 6,
  kIo = 7,
  kNotFound = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mgcomm
