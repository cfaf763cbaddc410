// check-trace :: standalone kernel entry point
//
// usage: check-trace <obligation-dump> <trace-file>
// exit 0 when the trace is accepted against the matching obligation.
#include <fstream>
#include <iostream>
#include <sstream>

#include "mtp/obligation.hpp"
#include "mtp/trace_check.hpp"

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: check-trace <obligation-dump> <trace-file>\n";
    return 1;
  }
  try {
    std::ifstream tin(argv[2]);
    if (!tin) {
      std::cerr << "cannot open trace file '" << argv[2] << "'\n";
      return 1;
    }
    std::ostringstream tss;
    tss << tin.rdbuf();
    mtp::ProofTrace trace = mtp::parse_trace(tss.str());

    std::ifstream din(argv[1]);
    if (!din) {
      std::cerr << "cannot open obligation dump '" << argv[1] << "'\n";
      return 1;
    }
    std::string line;
    while (std::getline(din, line)) {
      if (line.empty()) continue;
      mtp::DumpRecord rec = mtp::parse_dump_line(line);
      if (rec.fingerprint != trace.obligation_fingerprint) continue;
      std::vector<mtp::ExprPtr> hyps;
      for (const auto& [n, h] : rec.hypotheses) hyps.push_back(h);
      mtp::CheckResult res = mtp::check_trace(hyps, rec.goal, trace, rec.fingerprint);
      if (res.accepted) {
        std::cout << "accept " << rec.fingerprint.substr(0, 12) << " (" << rec.theorem_name << "/"
                  << rec.path << ")\n";
        return 0;
      }
      std::cout << "reject: " << res.reason << " at node " << res.position << "\n";
      return 1;
    }
    std::cout << "reject: fingerprint mismatch (no obligation matches the trace)\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
