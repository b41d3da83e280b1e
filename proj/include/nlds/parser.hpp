#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nlds/lexicon.hpp"
#include "nlds/question.hpp"
#include "nlds/tokenizer.hpp"

namespace nlds {

/// Every AST whose production accepts the whole token stream, ordered by
/// production then by rendered AST. Throws ParseError when none does.
std::vector<QuestionAST> parse(std::span<const Token> tokens, const Lexicon& lexicon);

/// Convenience: tokenize then parse.
std::vector<QuestionAST> parse_question(std::string_view text, const Lexicon& lexicon);

/// `n` sentences drawn from the grammar with schema-valid slot fillers.
/// Deterministic per seed. Value slots are always quoted.
std::vector<std::string> grammar_sample(std::uint64_t seed, std::size_t n, const GraphSchema& schema);

}  // namespace nlds
