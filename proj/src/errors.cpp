#include "corrgeo/errors.hpp"

namespace corrgeo {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::InvalidInput: return "InvalidInput";
  case ErrorKind::RetractionFailure: return "RetractionFailure";
  case ErrorKind::SingularSylvester: return "SingularSylvester";
  case ErrorKind::AntipodalLogarithm: return "AntipodalLogarithm";
  case ErrorKind::AlignmentStagnation: return "AlignmentStagnation";
  case ErrorKind::RankExceedsK: return "RankExceedsK";
  case ErrorKind::InvalidCorrelation: return "InvalidCorrelation";
  case ErrorKind::DegenerateInput: return "DegenerateInput";
  case ErrorKind::ParseError: return "ParseError";
  case ErrorKind::EmptyFile: return "EmptyFile";
  case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

GeometryError::GeometryError(ErrorKind kind, const std::string& what,
                             std::optional<std::size_t> index)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what),
      kind_(kind), detail_(what), index_(index) {}

void fail(ErrorKind kind, const std::string& what,
          std::optional<std::size_t> index) {
  throw GeometryError(kind, what, index);
}

} // namespace corrgeo
