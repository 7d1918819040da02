#pragma once

#include "apify/source_unit.hpp"

#include <optional>
#include <string>
#include <vector>

namespace apify {

/// Outgoing edges of a node grouped by the control decision that selects them.
struct Branch {
  enum class Kind { always, if_true, if_false, arm, no_match, loop_body, loop_exit };
  Kind kind = Kind::always;
  /// WHEN arm index for Kind::arm.
  std::size_t arm = 0;
  std::vector<StmtId> targets;
};

/// Statement-level control-flow graph of one program. Every statement is a
/// node; out-of-line PERFORM is spliced in with enter/return edges.
class Cfg {
public:
  const SourceUnit &unit() const { return *unit_; }
  std::optional<StmtId> entry() const { return entry_; }
  std::size_t node_count() const { return succ_.size(); }
  const std::vector<StmtId> &successors(StmtId n) const { return succ_[index(n)]; }
  const std::vector<StmtId> &predecessors(StmtId n) const { return pred_[index(n)]; }
  const std::vector<Branch> &branches(StmtId n) const { return branches_[index(n)]; }
  bool reachable(StmtId n) const { return reachable_[index(n)]; }
  bool is_exit(StmtId n) const { return succ_[index(n)].empty(); }
  /// Control may end the program after `n`: an exit, or the end of the last
  /// paragraph when that paragraph is also a PERFORM target with return edges.
  bool may_end(StmtId n) const { return ends_[index(n)]; }
  std::vector<StmtId> exits() const;
  std::size_t edge_count() const;

private:
  friend class CfgBuilder;
  const SourceUnit *unit_ = nullptr;
  std::optional<StmtId> entry_;
  std::vector<std::vector<StmtId>> succ_;
  std::vector<std::vector<StmtId>> pred_;
  std::vector<std::vector<Branch>> branches_;
  std::vector<bool> reachable_;
  std::vector<bool> ends_;
};

/// Throws UnknownParagraph for PERFORM / GO TO targets that do not exist.
/// The unit must outlive the graph.
Cfg build_cfg(const SourceUnit &unit);

/// Depth-first post-order of the nodes reachable from the entry.
std::vector<StmtId> post_order(const Cfg &cfg);

/// DOT rendering for debugging; nodes are labelled "line: verb".
std::string to_dot(const Cfg &cfg);

} // namespace apify
