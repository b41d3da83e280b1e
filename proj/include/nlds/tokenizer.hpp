#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlds/errors.hpp"
#include "nlds/lexicon.hpp"

namespace nlds {

enum class TokenKind {
  Keyword,
  LabelRef,
  RelRef,
  PropRef,
  ValueLiteral,
  NumberLiteral,
  FloatLiteral,
  Word,
};

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::Word;
  /// Source text of the token; for quoted literals, the text between the quotes.
  std::string surface;
  /// Canonical schema name; set exactly for LabelRef, RelRef and PropRef.
  std::optional<std::string> resolved;
  Span span;

  bool operator==(const Token&) const = default;
};

/// Longest-match, left-to-right tokenization against `lexicon`.
/// Whitespace and punctuation between tokens are skipped. Unknown words become
/// Word tokens; a capitalized unknown word starts a ValueLiteral that extends
/// over following capitalized or numeric words. Throws ValidationError on
/// empty input.
std::vector<Token> tokenize(std::string_view text, const Lexicon& lexicon);

}  // namespace nlds
