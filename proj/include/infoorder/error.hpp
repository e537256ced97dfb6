#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace infoorder {

enum class ErrorCode {
  MalformedProgram,
  NotConvex,
  RowSumError,
  NegativeEntry,
  EmptySignalSet,
  ZeroMarginal,
  ZeroBaseDensity,
  StateMismatch,
  BadWeight,
  BadDichotomy,
  NotAPermutation,
  DimensionMismatch,
  DegenerateGrid,
  DegenerateInput,
  DimensionLimitExceeded,
  TooManyStates,
  OneSignedWitness,
  BadBelief,
  NotQCC,
  NoMatch,
  NotBinary,
  IndexError,
  EnumerationLimit,
  InvalidArgument,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. `index()` names the offending
/// row, signal, or state when the error refers to one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> index = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

}  // namespace infoorder
