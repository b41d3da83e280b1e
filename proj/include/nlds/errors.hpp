#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nlds {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define NLDS_DEFINE_ERROR(Name)          \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

NLDS_DEFINE_ERROR(IngestError);
NLDS_DEFINE_ERROR(IoError);
NLDS_DEFINE_ERROR(SchemaConflict);
NLDS_DEFINE_ERROR(VocabularyError);
NLDS_DEFINE_ERROR(KeywordError);
NLDS_DEFINE_ERROR(GenerationError);
NLDS_DEFINE_ERROR(ViewNotFound);
NLDS_DEFINE_ERROR(ViewExists);
NLDS_DEFINE_ERROR(ViewDefinitionError);
NLDS_DEFINE_ERROR(SessionNotFound);
NLDS_DEFINE_ERROR(CandidateNotFound);
NLDS_DEFINE_ERROR(ValidationError);

#undef NLDS_DEFINE_ERROR

/// Half-open character range [start, end) into the source text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  bool operator==(const Span&) const = default;
};

/// Raised when no grammar production accepts a question.
class ParseError : public Error {
 public:
  ParseError(std::string message, Span matched, std::vector<std::string> productions)
      : Error(std::move(message)), matched_(matched), productions_(std::move(productions)) {}

  /// Span of the longest prefix some production consumed.
  [[nodiscard]] Span matched() const { return matched_; }
  /// Productions that reached furthest into the input.
  [[nodiscard]] const std::vector<std::string>& productions() const { return productions_; }

 private:
  Span matched_;
  std::vector<std::string> productions_;
};

/// Raised for Cypher text outside the supported subset.
class CypherSubsetError : public Error {
 public:
  CypherSubsetError(const std::string& message, Span span)
      : Error(message + " at offset " + std::to_string(span.start)), span_(span) {}
  [[nodiscard]] Span span() const { return span_; }

 private:
  Span span_;
};

/// Wraps a failure of one statement inside a multi-statement script.
class ExecutionError : public Error {
 public:
  ExecutionError(std::size_t statement_index, std::string kind, const std::string& message)
      : Error("statement " + std::to_string(statement_index) + ": " + message),
        statement_index_(statement_index),
        kind_(std::move(kind)) {}
  [[nodiscard]] std::size_t statement_index() const { return statement_index_; }
  /// Name of the underlying error class, e.g. "ViewNotFound".
  [[nodiscard]] const std::string& kind() const { return kind_; }

 private:
  std::size_t statement_index_;
  std::string kind_;
};

/// Class name of a library error ("ViewNotFound", "ParseError", ...), or
/// "Error" for anything else.
std::string error_kind(const std::exception& e);

}  // namespace nlds
