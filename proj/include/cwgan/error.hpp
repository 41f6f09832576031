#pragma once

#include <stdexcept>
#include <string>

namespace cwgan {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeError : Error { using Error::Error; };
struct LabelError : Error { using Error::Error; };          // label outside {0,1}
struct StateError : Error { using Error::Error; };          // e.g. backward without a recorded forward
struct DivergenceError : Error { using Error::Error; };     // non-finite loss or gradient while training
struct DegenerateFileError : Error { using Error::Error; }; // constant file, max == min
struct EmptyDatasetError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };         // bad magic or unknown version
struct CorruptionError : Error { using Error::Error; };     // checksum mismatch or truncation
struct UsageError : Error { using Error::Error; };          // CLI misuse

}  // namespace cwgan
