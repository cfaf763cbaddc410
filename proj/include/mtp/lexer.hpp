// mtp :: tokenizer for .mt module sources
#ifndef MTP_LEXER_HPP
#define MTP_LEXER_HPP

#include <cctype>
#include <string>
#include <vector>

#include "mtp/diag.hpp"
#include "mtp/ints.hpp"

namespace mtp {

enum class Tok : unsigned char {
  end,
  ident,
  int_lit,
  real_lit,
  str_lit,
  step_label,   // <n>name, dotted == step definition, undotted == citation
  module_bar,   // ---- (4 or more)
  module_end,   // ==== (3 or more)
  defeq,        // ==
  // keywords
  kw_module, kw_extends, kw_constant, kw_constants, kw_variable, kw_variables,
  kw_theorem, kw_by, kw_def, kw_obvious, kw_omitted, kw_use, kw_qed,
  kw_true, kw_false, kw_if, kw_then, kw_else, kw_case, kw_other, kw_choose,
  kw_boolean,
  // operators and punctuation
  lparen, rparen, lbrace, rbrace, lbracket, rbracket, ltuple, rtuple,
  comma, colon, dcolon, bang, prime_mark, arrow, maps_to,
  op_and, op_or, op_not, op_implies,
  op_eq, op_neq, op_le, op_lt, op_ge, op_gt,
  op_in, op_notin, op_subseteq, op_union, op_inter, op_setminus,
  op_plus, op_minus, op_star, op_div, op_mod,
  op_forall, op_exists, box
};

struct Token {
  Tok kind = Tok::end;
  std::string text;     // ident name, string value, step name
  Int ival;             // int_lit; real numerator
  int dec_places = 0;   // real_lit
  int step_level = 0;   // step_label
  bool step_dotted = false;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(std::string src) : src_(std::move(src)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      Token t = next();
      bool end = t.kind == Tok::end;
      out.push_back(std::move(t));
      if (end) break;
    }
    return out;
  }

 private:
  std::string src_;
  size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;

  char peek(size_t off = 0) const { return i_ + off < src_.size() ? src_[i_ + off] : '\0'; }
  bool done() const { return i_ >= src_.size(); }

  char advance() {
    char c = src_[i_++];
    if (c == '\n') {
      line_++;
      col_ = 1;
    } else {
      col_++;
    }
    return c;
  }

  void skip_trivia() {
    for (;;) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '\\' && peek(1) == '*') {
        while (!done() && peek() != '\n') advance();
      } else if (c == '(' && peek(1) == '*') {
        SourcePos start{line_, col_};
        advance();
        advance();
        int depth = 1;
        while (depth > 0) {
          if (done()) throw ParseError("unterminated block comment", start);
          if (peek() == '(' && peek(1) == '*') {
            advance(); advance(); depth++;
          } else if (peek() == '*' && peek(1) == ')') {
            advance(); advance(); depth--;
          } else {
            advance();
          }
        }
      } else {
        break;
      }
    }
  }

  static bool ident_start(char c) { return std::isalpha((unsigned char)c) || c == '_'; }
  static bool ident_cont(char c) { return std::isalnum((unsigned char)c) || c == '_'; }

  Token make(Tok k, SourcePos p) {
    Token t;
    t.kind = k;
    t.pos = p;
    return t;
  }

  Token next() {
    skip_trivia();
    SourcePos pos{line_, col_};
    if (done()) return make(Tok::end, pos);
    char c = peek();

    if (c == '-' && peek(1) == '-' && peek(2) == '-' && peek(3) == '-') {
      while (peek() == '-') advance();
      return make(Tok::module_bar, pos);
    }
    if (c == '=' && peek(1) == '=' && peek(2) == '=') {
      while (peek() == '=') advance();
      return make(Tok::module_end, pos);
    }
    if (c == '=' && peek(1) == '=') {
      advance(); advance();
      return make(Tok::defeq, pos);
    }

    if (std::isdigit((unsigned char)c)) return lex_number(pos);
    if (ident_start(c)) return lex_word(pos);
    if (c == '"') return lex_string(pos);
    if (c == '<') {
      // step label: '<' digits '>' alnum+
      size_t j = 1;
      while (std::isdigit((unsigned char)peek(j))) j++;
      if (j > 1 && peek(j) == '>' && std::isalnum((unsigned char)peek(j + 1))) return lex_step(pos);
      if (peek(1) == '<') {
        advance(); advance();
        return make(Tok::ltuple, pos);
      }
      advance();
      if (peek() == '=') {
        advance();
        return make(Tok::op_le, pos);
      }
      return make(Tok::op_lt, pos);
    }

    advance();
    switch (c) {
      case '(': return make(Tok::lparen, pos);
      case ')': return make(Tok::rparen, pos);
      case '{': return make(Tok::lbrace, pos);
      case '}': return make(Tok::rbrace, pos);
      case ']': return make(Tok::rbracket, pos);
      case ',': return make(Tok::comma, pos);
      case '!': return make(Tok::bang, pos);
      case '\'': return make(Tok::prime_mark, pos);
      case '+': return make(Tok::op_plus, pos);
      case '*': return make(Tok::op_star, pos);
      case '%': return make(Tok::op_mod, pos);
      case '~': return make(Tok::op_not, pos);
      case '[':
        if (peek() == ']') {
          advance();
          return make(Tok::box, pos);
        }
        return make(Tok::lbracket, pos);
      case '>':
        if (peek() == '>') {
          advance();
          return make(Tok::rtuple, pos);
        }
        if (peek() == '=') {
          advance();
          return make(Tok::op_ge, pos);
        }
        return make(Tok::op_gt, pos);
      case ':':
        if (peek() == ':') {
          advance();
          return make(Tok::dcolon, pos);
        }
        return make(Tok::colon, pos);
      case '-':
        if (peek() == '>') {
          advance();
          return make(Tok::arrow, pos);
        }
        return make(Tok::op_minus, pos);
      case '=':
        if (peek() == '>') {
          advance();
          return make(Tok::op_implies, pos);
        }
        return make(Tok::op_eq, pos);
      case '#': return make(Tok::op_neq, pos);
      case '|':
        if (peek() == '-' && peek(1) == '>') {
          advance(); advance();
          return make(Tok::maps_to, pos);
        }
        throw ParseError("stray '|'", pos);
      case '/':
        if (peek() == '\\') {
          advance();
          return make(Tok::op_and, pos);
        }
        if (peek() == '=') {
          advance();
          return make(Tok::op_neq, pos);
        }
        throw ParseError("stray '/' (integer division is \\div)", pos);
      case '\\': {
        if (peek() == '/') {
          advance();
          return make(Tok::op_or, pos);
        }
        std::string word;
        while (ident_cont(peek())) word.push_back(advance());
        if (word == "A") return make(Tok::op_forall, pos);
        if (word == "E") return make(Tok::op_exists, pos);
        if (word == "in") return make(Tok::op_in, pos);
        if (word == "notin") return make(Tok::op_notin, pos);
        if (word == "subseteq") return make(Tok::op_subseteq, pos);
        if (word == "cup" || word == "union") return make(Tok::op_union, pos);
        if (word == "cap" || word == "intersect") return make(Tok::op_inter, pos);
        if (word == "div") return make(Tok::op_div, pos);
        if (word.empty()) return make(Tok::op_setminus, pos);
        throw ParseError("unknown operator \\" + word, pos);
      }
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", pos);
    }
  }

  Token lex_number(SourcePos pos) {
    Int value = 0;
    while (std::isdigit((unsigned char)peek())) value = value * 10 + (advance() - '0');
    if (peek() == '.' && std::isdigit((unsigned char)peek(1))) {
      advance();
      int places = 0;
      while (std::isdigit((unsigned char)peek())) {
        value = value * 10 + (advance() - '0');
        places++;
      }
      Token t = make(Tok::real_lit, pos);
      t.ival = std::move(value);
      t.dec_places = places;
      return t;
    }
    Token t = make(Tok::int_lit, pos);
    t.ival = std::move(value);
    return t;
  }

  Token lex_word(SourcePos pos) {
    std::string w;
    while (ident_cont(peek())) w.push_back(advance());
    static const std::pair<const char*, Tok> kws[] = {
        {"MODULE", Tok::kw_module},     {"EXTENDS", Tok::kw_extends},
        {"CONSTANT", Tok::kw_constant}, {"CONSTANTS", Tok::kw_constants},
        {"VARIABLE", Tok::kw_variable}, {"VARIABLES", Tok::kw_variables},
        {"THEOREM", Tok::kw_theorem},   {"BY", Tok::kw_by},
        {"DEF", Tok::kw_def},           {"DEFS", Tok::kw_def},
        {"OBVIOUS", Tok::kw_obvious},   {"OMITTED", Tok::kw_omitted},
        {"USE", Tok::kw_use},           {"QED", Tok::kw_qed},
        {"TRUE", Tok::kw_true},         {"FALSE", Tok::kw_false},
        {"IF", Tok::kw_if},             {"THEN", Tok::kw_then},
        {"ELSE", Tok::kw_else},         {"CASE", Tok::kw_case},
        {"OTHER", Tok::kw_other},       {"CHOOSE", Tok::kw_choose},
        {"BOOLEAN", Tok::kw_boolean},
    };
    for (const auto& [k, tok] : kws)
      if (w == k) return make(tok, pos);
    Token t = make(Tok::ident, pos);
    t.text = std::move(w);
    return t;
  }

  Token lex_string(SourcePos pos) {
    advance();  // opening quote
    std::string s;
    for (;;) {
      if (done() || peek() == '\n') throw ParseError("unterminated string literal", pos);
      char c = advance();
      if (c == '"') break;
      if (c == '\\') {
        char e = advance();
        if (e == '"' || e == '\\') {
          s.push_back(e);
        } else {
          throw ParseError("unknown string escape", pos);
        }
        continue;
      }
      s.push_back(c);
    }
    Token t = make(Tok::str_lit, pos);
    t.text = std::move(s);
    return t;
  }

  Token lex_step(SourcePos pos) {
    advance();  // '<'
    std::string lvl;
    while (std::isdigit((unsigned char)peek())) lvl.push_back(advance());
    advance();  // '>'
    std::string name;
    while (std::isalnum((unsigned char)peek())) name.push_back(advance());
    Token t = make(Tok::step_label, pos);
    t.step_level = std::stoi(lvl);
    t.text = std::move(name);
    if (peek() == '.') {
      advance();
      t.step_dotted = true;
    }
    return t;
  }
};

}  // namespace mtp

#endif
