#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qcsma {

enum class ErrorCode {
  InvalidSpec,
  TabulatedOutOfRange,
  HorizonExceeded,
  FrozenRateZero,
  NoBracket,
  UnsupportedRateKind,
  SingularSystem,
  NonpositiveConstant,
  InsufficientSamples,
  MajorantViolated,
  CouplingUndefined,
  AllCensored,
  TooFewSamples,
  DegenerateSpan,
  ParseError,
};

std::string_view to_string(ErrorCode code);

// Every failure surfaced by the library carries one of the codes above so
// callers (and the CLI exit path) can branch on it without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qcsma
