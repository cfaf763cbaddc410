// mtp :: proof manager
//
// Orchestrates the pipeline: load -> flatten -> obligations -> dispatch with
// caching and a worker pool -> deterministic report ordered by document
// position. Tableau successes count as proved only after the independent
// kernel accepts the emitted trace.
#ifndef MTP_MANAGER_HPP
#define MTP_MANAGER_HPP

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mtp/flatten.hpp"
#include "mtp/obligation.hpp"
#include "mtp/parser.hpp"
#include "mtp/presburger.hpp"
#include "mtp/smt.hpp"
#include "mtp/tableau.hpp"
#include "mtp/trace_check.hpp"
#include "mtp/version.hpp"

namespace mtp {

struct CheckOptions {
  std::string only;                   // restrict to one theorem or step path prefix
  std::string backend;                // force a single backend: tableau|presburger|smt
  double timeout_seconds = 5.0;       // per-obligation budget (first tableau attempt)
  int jobs = 1;
  bool allow_omitted = false;
  bool no_cache = false;
  bool list_unproven = false;
  std::string dump_obligations_dir;   // empty: no dump
  std::string cache_dir = ".proofcache";
  SolverConfig solver;
  bool keep_going = true;
};

enum class VStatus : unsigned char { proved, failed, omitted, cached, internal_error };

struct VerdictRecord {
  std::string fingerprint;
  VStatus status = VStatus::failed;
  std::string backend;                 // the single succeeding backend, if proved
  double wall_seconds = 0.0;
  std::vector<std::string> attempts;   // backend attempts with reasons
  size_t index = 0;
};

struct CheckOutcome {
  int exit_code = 3;
  std::vector<Obligation> obligations;
  std::vector<VerdictRecord> verdicts;  // aligned with obligations
  std::string report;
};

// ---------------------------------------------------------------------------
// module loading

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MtpError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Loads the root module and, transitively, every extended module from the
// same directory. Module names must equal file stems.
inline ModuleAst load_and_flatten(const std::string& root_path) {
  namespace fs = std::filesystem;
  fs::path root(root_path);
  ModuleAst root_ast = parse_module(read_file(root_path));
  if (root_ast.name != root.stem().string())
    throw ModuleError("module '" + root_ast.name + "' must live in '" + root_ast.name +
                      ".mt', not '" + root.filename().string() + "'");
  std::map<std::string, ModuleAst> library;
  std::vector<std::string> todo = root_ast.extends;
  while (!todo.empty()) {
    std::string name = todo.back();
    todo.pop_back();
    if (library.count(name) || name == root_ast.name) continue;
    fs::path dep = root.parent_path() / (name + ".mt");
    if (!fs::exists(dep)) throw ModuleError("unknown module '" + name + "' (no " + dep.string() + ")");
    ModuleAst m = parse_module(read_file(dep.string()));
    if (m.name != name)
      throw ModuleError("module '" + m.name + "' found in file '" + dep.string() + "'");
    for (const auto& d : m.extends) todo.push_back(d);
    library.emplace(name, std::move(m));
  }
  ModuleAst flat = flatten(root_ast, library);
  annotate_definitions(flat);
  return flat;
}

// ---------------------------------------------------------------------------
// fingerprint cache

class FingerprintCache {
 public:
  FingerprintCache(std::string dir, bool enabled)
      : path_(dir + "/cache.txt"), dir_(std::move(dir)), enabled_(enabled) {
    if (enabled_) load();
  }

  // proved-status lookup; returns the backend name or empty
  std::string lookup(const std::string& fp) const {
    std::lock_guard<std::mutex> g(mu_);
    auto it = entries_.find(fp);
    return it == entries_.end() ? "" : it->second;
  }

  void store(const std::string& fp, const std::string& backend) {
    if (!enabled_) return;
    std::lock_guard<std::mutex> g(mu_);
    entries_[fp] = backend;
    dirty_ = true;
  }

  void flush() {
    std::lock_guard<std::mutex> g(mu_);
    if (!enabled_ || !dirty_) return;
    std::filesystem::create_directories(dir_);
    std::ofstream out(path_, std::ios::trunc);
    for (const auto& [fp, backend] : entries_)
      out << fp << '\t' << "proved" << '\t' << backend << '\t' << toolchain_version << '\n';
    dirty_ = false;
  }

  bool corrupt_warning = false;

 private:
  void load() {
    std::ifstream in(path_);
    if (!in) return;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> f;
      size_t start = 0;
      for (;;) {
        size_t tab = line.find('\t', start);
        f.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
      }
      if (f.size() != 4 || f[1] != "proved" || f[0].size() != 64) {
        // corrupt cache: drop everything, warn, and rebuild from scratch
        corrupt_warning = true;
        entries_.clear();
        return;
      }
      if (f[3] != toolchain_version) continue;  // stale toolchain
      entries_[f[0]] = f[2];
    }
  }

  mutable std::mutex mu_;
  std::map<std::string, std::string> entries_;
  std::string path_;
  std::string dir_;
  bool enabled_;
  bool dirty_ = false;
};

// ---------------------------------------------------------------------------
// dispatch

struct DispatchPolicy {
  // ordered backend attempts; "tableau:<seconds>" carries its budget
  std::vector<std::string> order;

  static DispatchPolicy for_obligation(const Obligation& ob, const CheckOptions& opts) {
    DispatchPolicy p;
    if (!opts.backend.empty()) {
      p.order.push_back(opts.backend == "tableau"
                            ? "tableau:" + std::to_string(opts.timeout_seconds)
                            : opts.backend);
      return p;
    }
    switch (ob.hint) {
      case BackendHint::presburger: p.order.push_back("presburger"); break;
      case BackendHint::smt: p.order.push_back("smt"); break;
      case BackendHint::none:
        p.order.push_back("tableau:" + std::to_string(opts.timeout_seconds));
        p.order.push_back("tableau:" + std::to_string(4 * opts.timeout_seconds));
        break;
    }
    return p;
  }
};

class Manager {
 public:
  Manager(CheckOptions opts, std::ostream& out, std::ostream& err)
      : opts_(std::move(opts)), out_(out), err_(err) {}

  CheckOutcome run(const std::string& root_path) {
    CheckOutcome outcome;
    ModuleAst module;
    try {
      module = load_and_flatten(root_path);
      if (opts_.list_unproven) {
        for (const auto& u : list_unproven(module)) {
          out_ << u.theorem;
          for (const auto& p : u.path) out_ << '/' << p;
          out_ << '\n';
        }
        outcome.exit_code = 0;
        return outcome;
      }
      outcome.obligations = generate_obligations(module);
    } catch (const MtpError& e) {
      err_ << format_diag(root_path, e.pos, "error", e.what()) << '\n';
      outcome.exit_code = 2;
      return outcome;
    }

    auto& obs = outcome.obligations;
    if (!opts_.only.empty()) {
      // segment-wise prefix match: Invariance/<1>2 covers its subtree only
      auto segments = [](const std::string& s) {
        std::vector<std::string> out;
        size_t start = 0;
        for (;;) {
          size_t slash = s.find('/', start);
          out.push_back(s.substr(start, slash == std::string::npos ? slash : slash - start));
          if (slash == std::string::npos) return out;
          start = slash + 1;
        }
      };
      std::vector<std::string> want = segments(opts_.only);
      std::vector<Obligation> kept;
      for (auto& ob : obs) {
        std::vector<std::string> have = segments(ob.location());
        bool match = want.size() <= have.size();
        for (size_t i = 0; match && i < want.size(); ++i) match = want[i] == have[i];
        if (match) kept.push_back(std::move(ob));
      }
      obs = std::move(kept);
    }

    if (!opts_.dump_obligations_dir.empty()) {
      std::filesystem::create_directories(opts_.dump_obligations_dir);
      std::ofstream dump(opts_.dump_obligations_dir + "/" + module.name + ".obligations");
      for (const auto& ob : obs) dump << dump_obligation_line(ob) << '\n';
    }

    FingerprintCache cache(opts_.cache_dir, !opts_.no_cache);
    if (cache.corrupt_warning)
      err_ << "warning: corrupt proof cache; re-verifying everything" << '\n';

    outcome.verdicts.assign(obs.size(), {});
    std::atomic<size_t> next{0};
    int jobs = opts_.jobs < 1 ? 1 : opts_.jobs;
    auto worker = [&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= obs.size()) return;
        outcome.verdicts[i] = dispatch(obs[i], cache);
        outcome.verdicts[i].index = i;
      }
    };
    if (jobs == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    cache.flush();

    // deterministic report in document order
    std::ostringstream rep;
    size_t proved = 0, failed = 0, omitted = 0, cached = 0, internal = 0;
    for (size_t i = 0; i < obs.size(); ++i) {
      const auto& ob = obs[i];
      const auto& v = outcome.verdicts[i];
      switch (v.status) {
        case VStatus::proved:
          proved++;
          rep << "[proved]  " << ob.location() << " (" << v.backend << ", "
              << (int)(v.wall_seconds * 1000) << "ms)\n";
          break;
        case VStatus::cached:
          cached++;
          rep << "[cached]  " << ob.location() << " (" << v.backend << ")\n";
          break;
        case VStatus::omitted:
          omitted++;
          rep << "[omitted] " << ob.location() << "\n";
          break;
        case VStatus::internal_error:
          internal++;
          rep << "[internal-error] " << ob.location() << ": ";
          for (const auto& a : v.attempts) rep << a << "; ";
          rep << "\n";
          break;
        case VStatus::failed:
          failed++;
          rep << "[failed]  " << ob.location() << "\n" << report_failure(ob, v.attempts);
          break;
      }
    }
    rep << "summary: " << (proved + cached) << " proved (" << cached << " cached), " << failed
        << " failed, " << omitted << " omitted";
    if (internal) rep << ", " << internal << " internal errors";
    rep << "\n";
    outcome.report = rep.str();
    out_ << outcome.report;

    if (internal) outcome.exit_code = 3;
    else if (failed || (omitted && !opts_.allow_omitted)) outcome.exit_code = 1;
    else outcome.exit_code = 0;
    return outcome;
  }

 private:
  CheckOptions opts_;
  std::ostream& out_;
  std::ostream& err_;

  VerdictRecord dispatch(const Obligation& ob, FingerprintCache& cache) {
    VerdictRecord v;
    v.fingerprint = ob.fingerprint;
    auto started = std::chrono::steady_clock::now();
    auto done = [&]() {
      v.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      return v;
    };

    if (ob.omitted) {
      v.status = VStatus::omitted;
      return done();
    }
    if (!ob.rewrite_error.empty()) {
      v.status = VStatus::failed;
      v.attempts.push_back("rewrite: " + ob.rewrite_error);
      return done();
    }
    std::string hit = cache.lookup(ob.fingerprint);
    if (!hit.empty()) {
      v.status = VStatus::cached;
      v.backend = hit;
      return done();
    }

    DispatchPolicy policy = DispatchPolicy::for_obligation(ob, opts_);
    for (const auto& step : policy.order) {
      if (step.rfind("tableau", 0) == 0) {
        TableauBudget budget;
        auto colon = step.find(':');
        if (colon != std::string::npos) budget.max_seconds = std::stod(step.substr(colon + 1));
        budget.max_steps = (size_t)(50000 * (budget.max_seconds / 5.0 < 1 ? 1 : budget.max_seconds / 5.0));
        TableauResult res = tableau_prove(ob, budget);
        if (!res.proved()) {
          v.attempts.push_back("tableau: " + res.failure_reason());
          continue;
        }
        // certification gate: an unchecked trace is never "proved"
        std::vector<ExprPtr> hyps;
        for (const auto& [n, h] : ob.hypotheses) hyps.push_back(h);
        CheckResult chk = check_trace(hyps, ob.goal, res.trace, ob.fingerprint);
        if (!chk.accepted) {
          v.status = VStatus::internal_error;
          v.attempts.push_back("tableau trace rejected by kernel: " + chk.reason + " at " +
                               chk.position);
          return done();
        }
        if (!opts_.no_cache) {
          std::string dir = opts_.cache_dir + "/traces";
          std::filesystem::create_directories(dir);
          std::ofstream tf(dir + "/" + ob.fingerprint + ".trace");
          tf << write_trace(res.trace);
        }
        v.status = VStatus::proved;
        v.backend = "tableau";
        cache.store(ob.fingerprint, v.backend);
        return done();
      }
      if (step == "presburger") {
        PresburgerOutcome res = presburger_decide(ob);
        if (res.verdict == PVerdict::valid) {
          v.status = VStatus::proved;
          v.backend = "presburger";
          cache.store(ob.fingerprint, v.backend);
          return done();
        }
        v.attempts.push_back(std::string("presburger: ") + to_string(res.verdict));
        continue;
      }
      if (step == "smt") {
        SortAssignment sorts = detect_sorts(ob);
        SmtScript script = smt_translate(ob, sorts);
        if (!script.applicable) {
          v.attempts.push_back("smt: not-applicable");
          continue;
        }
        std::string dir = opts_.cache_dir + "/smt";
        std::string path = smt_script_path(dir, ob.fingerprint);
        write_smt_script(path, script);
        for (const auto& o : script.omitted)
          v.attempts.push_back("smt: omitted hypothesis " + o);
        SolverRun run = run_solver(path, opts_.solver);
        if (run.verdict == SolverVerdict::valid) {
          v.status = VStatus::proved;
          v.backend = "smt";
          cache.store(ob.fingerprint, v.backend);
          return done();
        }
        v.attempts.push_back(std::string("smt: ") + to_string(run.verdict));
        continue;
      }
      v.attempts.push_back("unknown backend '" + step + "'");
    }
    v.status = VStatus::failed;
    return done();
  }
};

// The user-facing entry point behind `mtpm check`.
inline CheckOutcome run_check(const std::string& root_path, const CheckOptions& opts,
                              std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  namespace fs = std::filesystem;
  if (!fs::exists(root_path)) {
    err << root_path << ":0:0: error: no such file" << '\n';
    CheckOutcome o;
    o.exit_code = 2;
    return o;
  }
  Manager m(opts, out, err);
  return m.run(root_path);
}

}  // namespace mtp

#endif
