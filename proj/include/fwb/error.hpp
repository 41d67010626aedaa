#pragma once

#include <stdexcept>
#include <string>

namespace fwb {

// Base for all library errors. The CLI maps the subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what), line_(0) {}
  int line() const { return line_; }

 private:
  int line_;
};

class SignatureMismatch : public Error {
 public:
  using Error::Error;
};

class CapExceeded : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A class operator produced something that is not a valid amalgam or
// extension. Carries a human readable description of the offending input.
class ConstructionFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace fwb
