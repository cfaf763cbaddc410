// mtp :: proof traces and their parenthesized-text serialization
//
// A trace is self-contained: every formula is carried as canonical printed
// text, so the checker can re-derive conclusions without any prover state.
#ifndef MTP_TRACE_HPP
#define MTP_TRACE_HPP

#include <memory>
#include <string>
#include <vector>

#include "mtp/parser.hpp"
#include "mtp/printer.hpp"

namespace mtp {

struct TraceNode {
  std::string rule;   // rule name, or "close"
  std::string text;   // lemma name / closure kind / empty
  ExprPtr principal;  // null for axiom-style nodes
  std::vector<ExprPtr> side;     // rule-specific: instantiation term, equation, witnesses
  std::vector<ExprPtr> derived;  // formulas added; for branching rules, one per child
  std::vector<std::shared_ptr<TraceNode>> children;
};

using TraceNodePtr = std::shared_ptr<TraceNode>;

struct ProofTrace {
  std::string obligation_fingerprint;
  TraceNodePtr root;
};

// ---------------------------------------------------------------------------
// serialization

namespace detail {

inline void quote_to(std::string& out, const std::string& s) {
  out.push_back('"');
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
}

inline void write_node(std::string& out, const TraceNode& n, int depth) {
  out.append(depth * 2, ' ');
  out += "(node ";
  quote_to(out, n.rule);
  out.push_back(' ');
  quote_to(out, n.text);
  out += " (p";
  if (n.principal) {
    out.push_back(' ');
    quote_to(out, print_expr(n.principal));
  }
  out += ") (s";
  for (const auto& e : n.side) {
    out.push_back(' ');
    quote_to(out, print_expr(e));
  }
  out += ") (d";
  for (const auto& e : n.derived) {
    out.push_back(' ');
    quote_to(out, print_expr(e));
  }
  out += ") (c";
  if (n.children.empty()) {
    out += "))\n";
    return;
  }
  out.push_back('\n');
  for (const auto& c : n.children) write_node(out, *c, depth + 1);
  out.append(depth * 2, ' ');
  out += "))\n";
}

}  // namespace detail

inline std::string write_trace(const ProofTrace& t) {
  std::string out = "(trace ";
  detail::quote_to(out, t.obligation_fingerprint);
  out.push_back('\n');
  if (t.root) detail::write_node(out, *t.root, 1);
  out += ")\n";
  return out;
}

// ---------------------------------------------------------------------------
// parsing

struct TraceParseError : MtpError {
  using MtpError::MtpError;
};

namespace detail {

class TraceReader {
 public:
  explicit TraceReader(const std::string& s) : s_(s) {}

  ProofTrace read() {
    expect('(');
    expect_word("trace");
    ProofTrace t;
    t.obligation_fingerprint = read_string();
    skip_ws();
    if (peek() == '(') t.root = read_node();
    expect(')');
    return t;
  }

 private:
  const std::string& s_;
  size_t i_ = 0;

  char peek() { return i_ < s_.size() ? s_[i_] : '\0'; }
  void skip_ws() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\n' || s_[i_] == '\t' || s_[i_] == '\r'))
      i_++;
  }
  void expect(char c) {
    skip_ws();
    if (peek() != c) throw TraceParseError(std::string("trace: expected '") + c + "'");
    i_++;
  }
  void expect_word(const char* w) {
    skip_ws();
    for (const char* p = w; *p; ++p, ++i_)
      if (i_ >= s_.size() || s_[i_] != *p) throw TraceParseError("trace: malformed header");
  }
  std::string read_string() {
    expect('"');
    std::string out;
    while (i_ < s_.size() && s_[i_] != '"') {
      char c = s_[i_++];
      if (c == '\\' && i_ < s_.size()) c = s_[i_++];
      out.push_back(c);
    }
    if (i_ >= s_.size()) throw TraceParseError("trace: unterminated string");
    i_++;
    return out;
  }
  std::vector<ExprPtr> read_expr_list(const char* tag) {
    expect('(');
    expect_word(tag);
    std::vector<ExprPtr> out;
    for (;;) {
      skip_ws();
      if (peek() == ')') { i_++; break; }
      out.push_back(parse_expr_text(read_string()));
    }
    return out;
  }
  TraceNodePtr read_node() {
    expect('(');
    expect_word("node");
    auto n = std::make_shared<TraceNode>();
    n->rule = read_string();
    n->text = read_string();
    auto p = read_expr_list("p");
    if (p.size() > 1) throw TraceParseError("trace: multiple principals");
    if (!p.empty()) n->principal = p[0];
    n->side = read_expr_list("s");
    n->derived = read_expr_list("d");
    expect('(');
    expect_word("c");
    for (;;) {
      skip_ws();
      if (peek() == ')') { i_++; break; }
      n->children.push_back(read_node());
    }
    expect(')');
    return n;
  }
};

}  // namespace detail

inline ProofTrace parse_trace(const std::string& text) { return detail::TraceReader(text).read(); }

}  // namespace mtp

#endif
