#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nrpos {

enum class ErrorCode {
  InvalidArgument,
  ConfigConflict,
  SlotNotScheduled,
  DuplicateDelay,
  EmptyReference,
  AllZero,
  MissingReference,
  InsufficientData,
  InvalidHyperbola,
  CoincidentFoci,
  DegenerateGeometry,
  LengthMismatch,
  ParseError,
  UnknownParameter,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so that
// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nrpos
