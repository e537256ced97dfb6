#include "infoorder/error.hpp"

namespace infoorder {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedProgram: return "MalformedProgram";
    case ErrorCode::NotConvex: return "NotConvex";
    case ErrorCode::RowSumError: return "RowSumError";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::EmptySignalSet: return "EmptySignalSet";
    case ErrorCode::ZeroMarginal: return "ZeroMarginal";
    case ErrorCode::ZeroBaseDensity: return "ZeroBaseDensity";
    case ErrorCode::StateMismatch: return "StateMismatch";
    case ErrorCode::BadWeight: return "BadWeight";
    case ErrorCode::BadDichotomy: return "BadDichotomy";
    case ErrorCode::NotAPermutation: return "NotAPermutation";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateGrid: return "DegenerateGrid";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::DimensionLimitExceeded: return "DimensionLimitExceeded";
    case ErrorCode::TooManyStates: return "TooManyStates";
    case ErrorCode::OneSignedWitness: return "OneSignedWitness";
    case ErrorCode::BadBelief: return "BadBelief";
    case ErrorCode::NotQCC: return "NotQCC";
    case ErrorCode::NoMatch: return "NoMatch";
    case ErrorCode::NotBinary: return "NotBinary";
    case ErrorCode::IndexError: return "IndexError";
    case ErrorCode::EnumerationLimit: return "EnumerationLimit";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace {
std::string format(ErrorCode code, const std::string& message,
                   std::optional<std::size_t> index) {
  std::string out(to_string(code));
  if (index) out += "(" + std::to_string(*index) + ")";
  if (!message.empty()) out += ": " + message;
  return out;
}
}  // namespace

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> index)
    : std::runtime_error(format(code, message, index)),
      code_(code),
      index_(index) {}

}  // namespace infoorder
