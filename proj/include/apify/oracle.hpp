#pragma once

#include "apify/item_set.hpp"
#include "apify/region.hpp"
#include "apify/signature.hpp"
#include "apify/source_unit.hpp"
#include "apify/use_def.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace apify {

/// One execution through a region: from the region entry until control leaves
/// the analysis scope, the program ends, or a statement would run more than
/// bound + 1 times.
struct ExecutionPath {
  std::vector<StmtId> statements;
  std::size_t loop_unroll_bound = 3;
  /// Ended by the unroll bound rather than by leaving the scope.
  bool truncated = false;
};

struct PathEnumeration {
  std::vector<ExecutionPath> paths;
  /// Some branch was skipped because region-local constants decide it.
  bool pruned_branch = false;
};

/// Enumerates paths with an explicit stack. Branch feasibility follows the
/// path-sensitive rule: IF and EVALUATE outcomes forced by literals moved
/// earlier on the same path are taken one way. Throws PathBudgetExceeded when
/// more than `max_paths` paths exist or the scope exceeds 200 statements.
PathEnumeration enumerate_paths(const RegionScope &scope, const UseDefSets &sets, std::size_t bound = 3,
                                std::size_t max_paths = 1u << 20);

struct PathResult {
  ItemSet requests;
  ItemSet responses;
};

struct OracleResult {
  std::vector<PathResult> per_path;
  ItemSet union_req;
  ItemSet union_resp;
};

/// Evaluates each path on its own: requests are reads with no earlier write on
/// the path (computed backwards from the last statement), responses are all
/// writes on the path.
OracleResult oracle_signature(const std::vector<ExecutionPath> &paths, const UseDefSets &sets);

/// Deterministic MiniCOBOL program over PIC 9(4) variables V0..V(vars-1) with
/// exactly `size` statements (nested ones included). Same seed, same text.
std::string random_program_text(std::uint64_t seed, std::size_t size = 30, std::size_t vars = 10);
SourceUnit random_program(std::uint64_t seed, std::size_t size = 30, std::size_t vars = 10);

struct VerifyOptions {
  std::uint64_t first_seed = 0;
  /// Exclusive upper end.
  std::uint64_t last_seed = 1000;
  std::size_t size = 30;
  std::size_t vars = 10;
  std::size_t bound = 3;
  /// Negative control: hands the static analyses kill sets containing every
  /// item. The oracle keeps the true sets.
  bool corrupt_kill = false;
};

struct VerifyReport {
  std::size_t passed = 0;
  std::size_t failed = 0;
  /// Number of property checks evaluated, per property name.
  std::vector<std::pair<std::string, std::size_t>> checks;
  std::uint64_t first_failing_seed = 0;
  std::string first_failure;
  std::string counterexample;
  std::size_t max_fs_passes = 0;
  double seconds = 0;
};

/// Runs the soundness and precision properties over generated programs.
VerifyReport verify(const VerifyOptions &options);

} // namespace apify
