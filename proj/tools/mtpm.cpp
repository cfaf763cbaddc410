// mtpm :: proof manager CLI
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "mtp/manager.hpp"
#include "mtp/trace_check.hpp"

int main(int argc, char** argv) {
  CLI::App app{"mtpm - proof manager for .mt modules"};
  app.require_subcommand(1);

  std::string file;
  mtp::CheckOptions opts;
  double solver_timeout = 10.0;

  auto* check = app.add_subcommand("check", "verify the proofs of a module");
  check->add_option("file", file, "root module (.mt)")->required();
  check->add_option("--only", opts.only, "restrict to a theorem or step path prefix");
  check->add_option("--backend", opts.backend, "force one backend: tableau|presburger|smt");
  check->add_option("--timeout", opts.timeout_seconds, "per-obligation budget in seconds");
  check->add_option("--jobs", opts.jobs, "worker threads");
  check->add_flag("--allow-omitted", opts.allow_omitted, "omitted proofs do not fail the run");
  check->add_flag("--no-cache", opts.no_cache, "bypass the fingerprint cache");
  check->add_flag("--list-unproven", opts.list_unproven, "list proof-less steps and exit");
  check->add_option("--dump-obligations", opts.dump_obligations_dir,
                    "write the obligation dump into this directory");
  check->add_option("--cache-dir", opts.cache_dir, "proof cache directory");
  check->add_option("--solver", opts.solver.command_template,
                    "SMT solver command template ({file} placeholder)");
  check->add_option("--solver-timeout", solver_timeout, "SMT solver timeout in seconds");

  auto* rules = app.add_subcommand("rules", "print the kernel's rule table");

  CLI11_PARSE(app, argc, argv);

  if (rules->parsed()) {
    for (const auto& [name, schema] : mtp::audit_rule_table())
      std::cout << name << ": " << schema << "\n";
    return 0;
  }

  if (const char* env = std::getenv("MTPM_SMT_SOLVER")) opts.solver.command_template = env;
  opts.solver.timeout_seconds = solver_timeout;

  try {
    return mtp::run_check(file, opts).exit_code;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
