#pragma once

#include "apify/cfg.hpp"
#include "apify/source_unit.hpp"

#include <string>
#include <vector>

namespace apify {

/// Lines p..q of one program, exposed as an API.
struct CodeRegion {
  std::string program;
  int start_line = 0;
  int end_line = 0;
  /// Statements whose first line lies in [start_line, end_line], in order.
  std::vector<StmtId> statements;
};

/// Throws InvalidRegion when p > q or no statement starts inside the range.
CodeRegion make_region(const SourceUnit &unit, int start_line, int end_line);

/// Region spanning every statement of the procedure division.
CodeRegion whole_program_region(const SourceUnit &unit);

/// The statements an analysis of `region` ranges over: the region itself plus
/// every paragraph range PERFORMed from inside it, transitively. Control that
/// leaves this set (fall-through past q, GO TO elsewhere) ends the API.
class RegionScope {
public:
  RegionScope(const Cfg &cfg, const CodeRegion &region);

  const Cfg &cfg() const { return *cfg_; }
  StmtId entry() const { return entry_; }
  bool contains(StmtId s) const { return member_[index(s)]; }
  /// All scope statements in id order.
  const std::vector<StmtId> &statements() const { return statements_; }
  /// Successors that stay inside the scope.
  const std::vector<StmtId> &successors(StmtId s) const { return succ_[index(s)]; }
  /// True when some successor lies outside the scope or the node is a CFG exit.
  bool leaves(StmtId s) const { return leaves_[index(s)]; }
  /// Scope nodes reachable from the entry, in depth-first post-order.
  const std::vector<StmtId> &post_order() const { return post_order_; }

private:
  const Cfg *cfg_;
  StmtId entry_{};
  std::vector<bool> member_;
  std::vector<StmtId> statements_;
  std::vector<std::vector<StmtId>> succ_;
  std::vector<bool> leaves_;
  std::vector<StmtId> post_order_;
};

} // namespace apify
