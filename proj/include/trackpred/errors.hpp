// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace trackpred {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateProjection : Error {
  using Error::Error;
};
struct DegenerateConfiguration : Error {
  using Error::Error;
};
struct TooShort : Error {
  using Error::Error;
};
struct InvalidDelta : Error {
  using Error::Error;
};
struct DuplicateId : Error {
  using Error::Error;
};
struct MissingMask : Error {
  using Error::Error;
};
struct FrameOutOfOrder : Error {
  using Error::Error;
};
struct IoFailure : Error {
  using Error::Error;
};
struct ShapeMismatch : Error {
  using Error::Error;
};
struct LengthMismatch : Error {
  using Error::Error;
};
struct EmptyDataset : Error {
  using Error::Error;
};
struct InfeasiblePlacement : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(int line_no, const std::string& msg)
      : Error("parse error at line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
  int line;
};

struct MethodFailure : Error {
  MethodFailure(const std::string& method_name, const std::string& msg)
      : Error("method '" + method_name + "' failed: " + msg), method(method_name) {}
  std::string method;
};

}  // namespace trackpred
