// mtp :: built-in lemma base
//
// A small fixed set of axioms citable by name in leaf proofs and in proof
// traces. Untyped discipline: arithmetic facts carry explicit Nat typing
// hypotheses. The base is part of the kernel's trust assumptions and is
// fixed per release.
#ifndef MTP_LEMMAS_HPP
#define MTP_LEMMAS_HPP

#include <string>
#include <utility>
#include <vector>

#include "mtp/parser.hpp"

namespace mtp {

inline const std::vector<std::pair<std::string, ExprPtr>>& lemma_base() {
  static const std::vector<std::pair<std::string, ExprPtr>> base = [] {
    std::vector<std::pair<std::string, std::string>> texts = {
        {"AndIsBool", "\\A p: \\A q: (p /\\ q) \\in BOOLEAN"},
        {"OrIsBool", "\\A p: \\A q: (p \\/ q) \\in BOOLEAN"},
        {"NotIsBool", "\\A p: (~p) \\in BOOLEAN"},
        {"ZeroNat", "0 \\in Nat"},
        {"SuccNat", "\\A n: n \\in Nat => n + 1 \\in Nat"},
        {"AddZeroNat", "\\A n: n \\in Nat => n + 0 = n"},
        {"MulOneNat", "\\A n: n \\in Nat => n * 1 = n"},
        {"AddCommNat", "\\A a: \\A b: a \\in Nat /\\ b \\in Nat => a + b = b + a"},
        {"LeReflNat", "\\A n: n \\in Nat => n <= n"},
        {"NatNonNegative", "\\A n: n \\in Nat => 0 <= n"},
        {"SetExtensionality",
         "\\A S: \\A T: (\\A x: (x \\in S => x \\in T) /\\ (x \\in T => x \\in S)) => S = T"},
    };
    std::vector<std::pair<std::string, ExprPtr>> out;
    for (const auto& [name, text] : texts) out.emplace_back(name, parse_expr_text(text));
    return out;
  }();
  return base;
}

inline const ExprPtr* lemma_base_lookup(const std::string& name) {
  for (const auto& [n, f] : lemma_base())
    if (n == name) return &f;
  return nullptr;
}

struct UnknownLemma : MtpError {
  using MtpError::MtpError;
};

inline ExprPtr cite_lemma(const std::string& name) {
  if (const ExprPtr* f = lemma_base_lookup(name)) return *f;
  throw UnknownLemma("unknown lemma '" + name + "'");
}

}  // namespace mtp

#endif
