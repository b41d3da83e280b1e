#include "nlds/tokenizer.hpp"

#include <algorithm>
#include <cctype>

namespace nlds {

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Keyword:
      return "Keyword";
    case TokenKind::LabelRef:
      return "LabelRef";
    case TokenKind::RelRef:
      return "RelRef";
    case TokenKind::PropRef:
      return "PropRef";
    case TokenKind::ValueLiteral:
      return "ValueLiteral";
    case TokenKind::NumberLiteral:
      return "NumberLiteral";
    case TokenKind::FloatLiteral:
      return "FloatLiteral";
    case TokenKind::Word:
      return "Word";
  }
  return "?";
}

namespace {

enum class PieceKind { Word, Number, Float, Quoted };

struct Piece {
  PieceKind kind;
  std::size_t start;
  std::size_t end;
  std::string inner;  // quoted content
};

bool word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_' || u >= 0x80;
}

bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::vector<Piece> split_pieces(std::string_view text) {
  std::vector<Piece> pieces;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if ((c == '\'' || c == '"') && (i == 0 || !word_char(text[i - 1]))) {
      const auto close = text.find(c, i + 1);
      if (close != std::string_view::npos) {
        pieces.push_back({PieceKind::Quoted, i, close + 1, std::string(text.substr(i + 1, close - i - 1))});
        i = close + 1;
        continue;
      }
    }
    if (digit(c)) {
      std::size_t j = i;
      while (j < text.size() && digit(text[j])) ++j;
      PieceKind kind = PieceKind::Number;
      if (j + 1 < text.size() && text[j] == '.' && digit(text[j + 1])) {
        ++j;
        while (j < text.size() && digit(text[j])) ++j;
        kind = PieceKind::Float;
      }
      if (j < text.size() && word_char(text[j])) {
        while (j < text.size() && word_char(text[j])) ++j;
        kind = PieceKind::Word;
      }
      pieces.push_back({kind, i, j, {}});
      i = j;
      continue;
    }
    if (word_char(c)) {
      std::size_t j = i;
      while (j < text.size() && word_char(text[j])) ++j;
      pieces.push_back({PieceKind::Word, i, j, {}});
      i = j;
      continue;
    }
    ++i;
  }
  return pieces;
}

bool only_whitespace(std::string_view text, std::size_t from, std::size_t to) {
  return std::all_of(text.begin() + static_cast<std::ptrdiff_t>(from),
                     text.begin() + static_cast<std::ptrdiff_t>(to),
                     [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; });
}

TokenKind token_kind(TermKind kind) {
  switch (kind) {
    case TermKind::Keyword:
      return TokenKind::Keyword;
    case TermKind::Label:
      return TokenKind::LabelRef;
    case TermKind::Relationship:
      return TokenKind::RelRef;
    case TermKind::Property:
      return TokenKind::PropRef;
  }
  return TokenKind::Word;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text, const Lexicon& lexicon) {
  if (text.empty()) throw ValidationError("question text must not be empty");
  const auto pieces = split_pieces(text);
  std::vector<Token> tokens;

  // Number of consecutive whitespace-separated Word pieces starting at i.
  auto word_run = [&](std::size_t i) {
    std::size_t n = 0;
    while (i + n < pieces.size() && pieces[i + n].kind != PieceKind::Quoted &&
           (n == 0 || only_whitespace(text, pieces[i + n - 1].end, pieces[i + n].start))) {
      ++n;
    }
    return n;
  };

  struct Match {
    std::size_t words;
    Term term;
  };
  auto longest_term = [&](std::size_t i) -> std::optional<Match> {
    if (pieces[i].kind == PieceKind::Quoted) return std::nullopt;
    const auto limit = std::min(word_run(i), lexicon.max_phrase_words());
    for (std::size_t n = limit; n >= 1; --n) {
      const auto phrase = text.substr(pieces[i].start, pieces[i + n - 1].end - pieces[i].start);
      if (auto term = lexicon.lookup(phrase)) return Match{n, *term};
    }
    return std::nullopt;
  };

  auto capitalized = [&](const Piece& p) {
    return p.kind == PieceKind::Word && std::isupper(static_cast<unsigned char>(text[p.start]));
  };

  std::size_t i = 0;
  while (i < pieces.size()) {
    const auto& p = pieces[i];
    if (p.kind == PieceKind::Quoted) {
      tokens.push_back({TokenKind::ValueLiteral, p.inner, std::nullopt, {p.start, p.end}});
      ++i;
      continue;
    }
    if (auto m = longest_term(i)) {
      const auto& last = pieces[i + m->words - 1];
      Token t{token_kind(m->term.kind), std::string(text.substr(p.start, last.end - p.start)),
              std::nullopt, {p.start, last.end}};
      if (t.kind != TokenKind::Keyword) t.resolved = m->term.resolved;
      tokens.push_back(std::move(t));
      i += m->words;
      continue;
    }
    if (p.kind == PieceKind::Number || p.kind == PieceKind::Float) {
      tokens.push_back({p.kind == PieceKind::Number ? TokenKind::NumberLiteral : TokenKind::FloatLiteral,
                        std::string(text.substr(p.start, p.end - p.start)), std::nullopt,
                        {p.start, p.end}});
      ++i;
      continue;
    }
    if (capitalized(p)) {
      std::size_t j = i + 1;
      while (j < pieces.size() && pieces[j].kind != PieceKind::Quoted &&
             only_whitespace(text, pieces[j - 1].end, pieces[j].start) &&
             (capitalized(pieces[j]) || pieces[j].kind != PieceKind::Word) &&
             !longest_term(j)) {
        ++j;
      }
      const auto end = pieces[j - 1].end;
      tokens.push_back({TokenKind::ValueLiteral, std::string(text.substr(p.start, end - p.start)),
                        std::nullopt, {p.start, end}});
      i = j;
      continue;
    }
    tokens.push_back({TokenKind::Word, std::string(text.substr(p.start, p.end - p.start)),
                      std::nullopt, {p.start, p.end}});
    ++i;
  }
  return tokens;
}

}  // namespace nlds
