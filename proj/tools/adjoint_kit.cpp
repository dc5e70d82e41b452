#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "adjoint/cli.hpp"

namespace {

int execute(const std::string& command, const std::string& file, const std::string& target,
            const adjoint::cli::Options& opt) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    std::cerr << "adjoint-kit: cannot read " << file << "\n";
    return adjoint::cli::parse_failure;
  }
  std::ostringstream buf;
  buf << in.rdbuf();

  adjoint::cli::RunReport report;
  try {
    report = adjoint::cli::run_command(command, buf.str(), target, opt);
  } catch (const std::exception& e) {
    std::cerr << "adjoint-kit: internal error: " << e.what() << "\n";
    return adjoint::cli::internal_failure;
  }
  if (opt.json) {
    std::cout << adjoint::cli::to_json(report).dump(2) << "\n";
  } else {
    std::cout << adjoint::cli::to_text(report);
  }
  return adjoint::cli::exit_code(report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite adjoint modal algebras: validate scenarios, evaluate and prove epistemic queries"};
  app.require_subcommand(1);

  adjoint::cli::Options opt;
  std::string file;
  std::string target;
  unsigned depth = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("file", file, "Scenario file (.scn)")->required();
    sub->add_flag("--json", opt.json, "Emit one JSON document");
    sub->add_flag("--strict-facts", opt.strict_facts, "Also require the converse of fact stability");
    sub->add_flag("--non-paranoid", opt.non_paranoid, "Require 1 = f'(1) and strict composition of action appearances");
    sub->add_flag("--no-kernel-shortcut", opt.no_kernel_shortcut, "Try KernelDischarge only after every other rule");
    sub->add_flag("--full-lattice-axioms", opt.full_lattice_axioms, "Check no-miracle on every element");
    sub->add_option("--depth", depth, "Proof search depth bound")->check(CLI::PositiveNumber);
    sub->add_option("--word-bound", opt.word_bound, "Longest action word in the quantale check")
        ->check(CLI::Range(1, 8));
  };

  auto* validate = app.add_subcommand("validate", "Check every axiom and report optional hypotheses");
  common(validate);
  auto* query = app.add_subcommand("query", "Run one query");
  common(query);
  query->add_option("id", target, "Query id")->required();
  auto* prove = app.add_subcommand("prove", "Prove one query's sequent with the derivation engine");
  common(prove);
  prove->add_option("id", target, "Query id")->required();
  auto* tables = app.add_subcommand("tables", "Dump a map and its adjoint, e.g. f[A] or h[a]");
  common(tables);
  tables->add_option("map", target, "Map name; all maps when omitted");
  auto* run = app.add_subcommand("run", "Validate, then run every query");
  common(run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : adjoint::cli::parse_failure;
  }
  if (depth > 0) opt.depth = depth;

  for (auto* sub : {validate, query, prove, tables, run})
    if (sub->parsed()) return execute(sub->get_name(), file, target, opt);
  return adjoint::cli::parse_failure;
}
