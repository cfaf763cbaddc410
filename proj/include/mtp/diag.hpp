// mtp :: source positions and diagnostics
#ifndef MTP_DIAG_HPP
#define MTP_DIAG_HPP

#include <sstream>
#include <stdexcept>
#include <string>

namespace mtp {

struct SourcePos {
  int line = 0;  // 1-based; 0 means "no position"
  int col = 0;
};

// Uniform diagnostic rendering: file:line:col: severity: message
inline std::string format_diag(const std::string& file, SourcePos pos,
                               const std::string& severity, const std::string& message) {
  std::ostringstream os;
  os << file << ':' << pos.line << ':' << pos.col << ": " << severity << ": " << message;
  return os.str();
}

struct MtpError : std::runtime_error {
  SourcePos pos;
  MtpError(const std::string& msg, SourcePos p = {}) : std::runtime_error(msg), pos(p) {}
};

// Lexical or syntactic failure; carries the position of the offending token.
struct ParseError : MtpError {
  using MtpError::MtpError;
};

// Violation of a module-level invariant (duplicate names, unresolved
// identifiers, import cycles, malformed proof structure, ...).
struct ModuleError : MtpError {
  using MtpError::MtpError;
};

// Rewrite-engine refusals (unexpandable prime, bad subexpression path, ...).
struct RewriteError : MtpError {
  using MtpError::MtpError;
};

}  // namespace mtp

#endif
