#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cfrag/progdsl.hpp"

namespace cfrag::dsl::detail {

enum class Tok {
  Ident,
  Number,
  String,
  Assign,
  Plus,
  Minus,
  Star,
  Slash,
  LParen,
  RParen,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  Comma,
  Colon,
  Newline,
  End,
};

struct Token {
  Tok kind;
  std::string text;  // identifier name, string contents or number spelling
  double number = 0.0;
  SourcePos pos;
};

std::string_view describe(Tok t);

Outcome<std::vector<Token>> tokenize(std::string_view source);

}  // namespace cfrag::dsl::detail
