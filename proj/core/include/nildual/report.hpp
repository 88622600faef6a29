#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nildual {

enum class ExitStatus : int {
  Ok = 0,            // success or certified
  Failed = 1,        // counterexample or failed check
  Inconclusive = 2,  // budget or cap reached
  InputError = 3,
};

// One batch run of a subcommand. Unused fields are ignored by the
// subcommand (and not echoed in its report).
struct RunConfig {
  std::string subcommand;  // clone | commutators | dualize-scan | z4-verify | witness
  std::string algebra_path;
  std::string output_path;  // empty: report goes to the caller only

  std::size_t clone_budget = 0;  // 0: default_clone_budget()
  int arity = 2;                 // clone: K; dualize-scan: max arity; z4-verify: k

  // clone
  std::string kind = "term";

  // commutators
  int series_cap = 0;  // 0: size of the congruence lattice
  int supernilpotence_cap = 4;

  // dualize-scan
  int power = 4;  // 0 with relation_paths: explicit relations only
  std::vector<std::string> relation_paths;
  std::size_t domain_cap = std::size_t{1} << 16;
  bool shrink = true;

  // z4-verify
  int truncation = 2;
  std::string emit_clone_path;
  std::size_t sample = 0;
  std::uint64_t seed = 1;

  // witness
  int window = 30;  // length; the window is [-window/2, window - window/2 - 1]
  int depth = 3;    // < 0: full closure
  std::optional<int> case_override;
  std::string superalgebra_path;
};

struct RunResult {
  ExitStatus status = ExitStatus::Ok;
  std::string report;  // pretty-printed JSON, newline-terminated
};

// Budget used when RunConfig::clone_budget is 0: $NILDUAL_CLONE_BUDGET if
// set, else kDefaultCloneBudget. Throws InputError on a malformed value.
std::size_t default_clone_budget();

// Dispatches on config.subcommand. Errors are reported through the exit
// status and an "error" field, never thrown. Writes the report to
// output_path when set.
RunResult run(const RunConfig& config);

// Compiled-in version string.
std::string tool_version();

}  // namespace nildual
