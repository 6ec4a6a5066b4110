#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rffs {

enum class ErrorCode {
  EmptyManifest,
  NoTileFound,
  EmptyCloud,
  InvalidFraction,
  InvalidK,
  InvalidSide,
  InvalidGridSize,
  IntensityRange,
  IncompleteStats,
  InvalidSpeed,
  InvalidClass,
  NonFiniteFeature,
  ShapeMismatch,
  FormatError,
  TruncatedFile,
  EmptyDataset,
  MissingFeature,
  FileError,
  InternalError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (and the CLI) can branch on kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rffs
