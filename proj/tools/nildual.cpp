#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nildual/report.hpp"

namespace {

void add_common(CLI::App* sub, nildual::RunConfig& c) {
  sub->add_option("--clone-budget", c.clone_budget,
                  "Max tables per closure (default: $NILDUAL_CLONE_BUDGET or 2097152)");
  sub->add_option("-o,--output", c.output_path, "Write the report here instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  nildual::RunConfig c;
  int case_override = 0;

  CLI::App app{"Clones, higher commutators and dualizability checks for finite algebras"};
  app.set_version_flag("--version", nildual::tool_version());
  app.require_subcommand(1);

  auto* clone = app.add_subcommand("clone", "Term or polynomial clone up to an arity");
  clone->add_option("--algebra", c.algebra_path, "Algebra JSON file")->required();
  clone->add_option("--arity", c.arity, "Largest arity")->capture_default_str();
  clone->add_option("--kind", c.kind, "term or polynomial")->capture_default_str();
  add_common(clone, c);

  auto* comm = app.add_subcommand("commutators", "Congruence lattice, commutators and nilpotence");
  comm->add_option("--algebra", c.algebra_path, "Algebra JSON file")->required();
  comm->add_option("--series-cap", c.series_cap, "Terms of the lower central series (0: lattice size)")
      ->capture_default_str();
  comm->add_option("--supernilpotence-cap", c.supernilpotence_cap, "Largest k tried for [a,...,a] with k+1 arguments")->capture_default_str();
  add_common(comm, c);

  auto* scan = app.add_subcommand("dualize-scan", "Search for non-term partial functions on c.a.d. domains");
  scan->add_option("--algebra", c.algebra_path, "Algebra JSON file")->required();
  scan->add_option("--max-arity", c.arity, "Largest arity scanned")->capture_default_str();
  scan->add_option("--power", c.power, "Use every subuniverse of A^n as a candidate (0: off)")
      ->capture_default_str();
  scan->add_option("--relations", c.relation_paths, "Relation JSON files used as candidates");
  scan->add_option("--domain-cap", c.domain_cap, "Max c.a.d. domains per arity")->capture_default_str();
  scan->add_flag("!--no-shrink", c.shrink, "Report the first counterexample unshrunk");
  add_common(scan, c);

  auto* z4 = app.add_subcommand("z4-verify", "Check that preserving partial functions on Z4 extend to terms");
  z4->add_option("--arity", c.arity, "Arity of the domains checked (1..3)")->capture_default_str();
  z4->add_option("--truncation", c.truncation, "m for the algebra with 2x1..xj, j <= m")
      ->capture_default_str();
  z4->add_option("--emit-clone", c.emit_clone_path, "Write the truncation's clone slice here");
  z4->add_option("--sample", c.sample, "Scan this many random domains (0: all)")->capture_default_str();
  z4->add_option("--seed", c.seed, "Seed for --sample")->capture_default_str();
  add_common(z4, c);

  auto* wit = app.add_subcommand("witness", "Build the ghost element and check the parity invariant");
  wit->add_option("--algebra", c.algebra_path, "Algebra JSON file")->required();
  wit->add_option("--superalgebra", c.superalgebra_path, "Algebra containing the first as a subalgebra");
  wit->add_option("--window", c.window, "Window length; indices -window/2 .. window-window/2-1")
      ->capture_default_str();
  wit->add_option("--depth", c.depth, "Closure depth (negative: full closure)")->capture_default_str();
  wit->add_option("--case-override", case_override, "Force case 1 or 2");
  wit->add_option("--supernilpotence-cap", c.supernilpotence_cap, "Largest k tried for [a,...,a] with k+1 arguments")->capture_default_str();
  add_common(wit, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(nildual::ExitStatus::InputError);
  }

  c.subcommand = app.get_subcommands().front()->get_name();
  if (wit->count("--case-override") > 0) c.case_override = case_override;

  const nildual::RunResult r = nildual::run(c);
  if (c.output_path.empty()) {
    std::fwrite(r.report.data(), 1, r.report.size(), stdout);
  }
  return static_cast<int>(r.status);
}
