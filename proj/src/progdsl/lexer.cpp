#include "lexer.hpp"

#include <charconv>
#include <system_error>

namespace cfrag::dsl::detail {

std::string_view describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::String: return "string";
    case Tok::Assign: return "'='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Newline: return "end of line";
    case Tok::End: return "end of input";
  }
  return "token";
}

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Outcome<std::vector<Token>> run() {
    std::vector<Token> out;
    int depth = 0;
    while (i_ < src_.size()) {
      const char c = src_[i_];
      const SourcePos pos{line_, col_};
      if (c == ' ' || c == '\t' || c == '\r') {
        advance();
        continue;
      }
      if (c == '\n') {
        if (depth == 0 && (out.empty() || out.back().kind != Tok::Newline)) {
          out.push_back({Tok::Newline, "", 0.0, pos});
        }
        advance();
        continue;
      }
      if (c == '#') return error(pos, "comments are not part of the answer language");
      if (is_digit(c) || (c == '.' && i_ + 1 < src_.size() && is_digit(src_[i_ + 1]))) {
        auto tok = number(pos);
        if (!tok) return tok.error();
        out.push_back(std::move(tok).value());
        continue;
      }
      if (is_ident_start(c)) {
        const auto start = i_;
        while (i_ < src_.size() && is_ident_char(src_[i_])) advance();
        out.push_back({Tok::Ident, std::string(src_.substr(start, i_ - start)), 0.0, pos});
        continue;
      }
      if (c == '"' || c == '\'') {
        auto tok = string(pos, c);
        if (!tok) return tok.error();
        out.push_back(std::move(tok).value());
        continue;
      }
      Tok kind;
      switch (c) {
        case '=': kind = Tok::Assign; break;
        case '+': kind = Tok::Plus; break;
        case '-': kind = Tok::Minus; break;
        case '*': kind = Tok::Star; break;
        case '/': kind = Tok::Slash; break;
        case '(': kind = Tok::LParen; ++depth; break;
        case ')': kind = Tok::RParen; --depth; break;
        case '[': kind = Tok::LBracket; ++depth; break;
        case ']': kind = Tok::RBracket; --depth; break;
        case '{': kind = Tok::LBrace; ++depth; break;
        case '}': kind = Tok::RBrace; --depth; break;
        case ',': kind = Tok::Comma; break;
        case ':': kind = Tok::Colon; break;
        default:
          return error(pos, std::string("unexpected character '") + c + "'");
      }
      if (depth < 0) depth = 0;  // unbalanced closers are reported by the parser
      // `**` and `//` are Python operators outside the language
      if ((c == '*' || c == '/') && i_ + 1 < src_.size() && src_[i_ + 1] == c) {
        return error(pos, std::string("operator '") + c + c + "' is not supported");
      }
      if (c == '=' && i_ + 1 < src_.size() && src_[i_ + 1] == '=') {
        return error(pos, "comparison is not supported");
      }
      out.push_back({kind, std::string(1, c), 0.0, pos});
      advance();
    }
    out.push_back({Tok::End, "", 0.0, {line_, col_}});
    return out;
  }

 private:
  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else if ((static_cast<unsigned char>(src_[i_]) & 0xC0) != 0x80) {
      ++col_;
    }
    ++i_;
  }

  static ExecError error(SourcePos pos, std::string msg) {
    return ExecError{ErrorKind::ParseError, std::move(msg), pos.line, pos.column};
  }

  Outcome<Token> number(SourcePos pos) {
    const auto start = i_;
    while (i_ < src_.size() && is_digit(src_[i_])) advance();
    if (i_ < src_.size() && src_[i_] == '.') {
      advance();
      while (i_ < src_.size() && is_digit(src_[i_])) advance();
    }
    if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
      advance();
      if (i_ < src_.size() && (src_[i_] == '+' || src_[i_] == '-')) advance();
      if (i_ >= src_.size() || !is_digit(src_[i_])) return error(pos, "malformed exponent");
      while (i_ < src_.size() && is_digit(src_[i_])) advance();
    }
    if (i_ < src_.size() && is_ident_start(src_[i_])) {
      return error(pos, "malformed number literal");
    }
    std::string spelling(src_.substr(start, i_ - start));
    // from_chars rejects a trailing '.', which Python accepts
    std::string parseable = spelling.back() == '.' ? spelling + "0" : spelling;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(parseable.data(), parseable.data() + parseable.size(), v);
    if (ec != std::errc{} || ptr != parseable.data() + parseable.size()) {
      return error(pos, "number literal out of range: " + spelling);
    }
    return Token{Tok::Number, std::move(spelling), v, pos};
  }

  Outcome<Token> string(SourcePos pos, char quote) {
    advance();
    std::string value;
    while (true) {
      if (i_ >= src_.size() || src_[i_] == '\n') return error(pos, "unterminated string literal");
      const char c = src_[i_];
      if (c == quote) {
        advance();
        break;
      }
      if (c == '\\') {
        advance();
        if (i_ >= src_.size() || (src_[i_] != '\\' && src_[i_] != '"' && src_[i_] != '\'')) {
          return error(pos, "unsupported escape in string literal");
        }
      }
      value += src_[i_];
      advance();
    }
    return Token{Tok::String, std::move(value), 0.0, pos};
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

Outcome<std::vector<Token>> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace cfrag::dsl::detail
