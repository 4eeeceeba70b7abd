#pragma once

#include <stdexcept>
#include <string>

namespace alp {

enum class Errc {
  UnboundVariable,
  SortMismatch,
  ParseError,
  IndexOutOfRange,
  IllFormedCommSet,
  UnknownComponent,
  StateLimitExceeded,
  UnboundedSum,
  DomainTooLarge,
  InvalidPartition,
  FreeVariableNotInScope,
  IoError,
};

// Single exception type; `code` drives CLI exit codes.
class Error : public std::runtime_error {
public:
  Error(Errc code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  Errc code() const { return code_; }

private:
  Errc code_;
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::UnboundVariable: return "UnboundVariable";
    case Errc::SortMismatch: return "SortMismatch";
    case Errc::ParseError: return "ParseError";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::IllFormedCommSet: return "IllFormedCommSet";
    case Errc::UnknownComponent: return "UnknownComponent";
    case Errc::StateLimitExceeded: return "StateLimitExceeded";
    case Errc::UnboundedSum: return "UnboundedSum";
    case Errc::DomainTooLarge: return "DomainTooLarge";
    case Errc::InvalidPartition: return "InvalidPartition";
    case Errc::FreeVariableNotInScope: return "FreeVariableNotInScope";
    case Errc::IoError: return "IoError";
  }
  return "Error";
}

}  // namespace alp
