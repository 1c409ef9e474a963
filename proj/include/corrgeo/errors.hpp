#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace corrgeo {

enum class ErrorKind {
  InvalidInput,
  RetractionFailure,
  SingularSylvester,
  AntipodalLogarithm,
  AlignmentStagnation,
  RankExceedsK,
  InvalidCorrelation,
  DegenerateInput,
  ParseError,
  EmptyFile,
  IoError,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers switch on kind().
// index carries the offending row, sample or subject when one is known.
class GeometryError : public std::runtime_error {
public:
  GeometryError(ErrorKind kind, const std::string& what,
                std::optional<std::size_t> index = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> index() const noexcept { return index_; }
  /// The message without the leading kind name.
  const std::string& detail() const noexcept { return detail_; }

private:
  ErrorKind kind_;
  std::string detail_;
  std::optional<std::size_t> index_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what,
                       std::optional<std::size_t> index = std::nullopt);

} // namespace corrgeo
