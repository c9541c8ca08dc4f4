#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flowscope {

enum class Errc {
  MissingFile,
  SchemaViolation,
  DanglingReference,
  UnknownBlock,
  EmptyEpoch,
  SupportViolation,
  DegenerateGroundTruth,
  NoBlocks,
  UnknownContract,
  InsufficientData,
  SingleClassData,
  EmptyPhase,
  InsufficientDays,
  ConstantSeries,
  InsufficientTail,
  InvalidConfig,
  InvalidArgument,
};

std::string_view to_string(Errc code) noexcept;

// Every failure surfaced by the library. `qualified_code()` yields e.g.
// "ingest.SchemaViolation", which the CLI reports verbatim.
class Error : public std::runtime_error {
 public:
  Error(std::string_view module, Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }
  std::string qualified_code() const;

 private:
  std::string module_;
  Errc code_;
};

// Schema violations carry the 1-based line and the offending field.
class SchemaError : public Error {
 public:
  SchemaError(std::string file, std::size_t line, std::string field, const std::string& detail);

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::string file_;
  std::size_t line_;
  std::string field_;
};

}  // namespace flowscope
