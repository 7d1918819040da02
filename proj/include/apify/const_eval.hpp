#pragma once

#include "apify/cfg.hpp"
#include "apify/item_set.hpp"
#include "apify/source_unit.hpp"

#include <map>
#include <utility>
#include <vector>

namespace apify {

enum class Truth { no, yes, unknown };

/// Facts about elementary items on the current path: a known value, from a
/// literal MOVE or an equality branch, or values known to be absent, from
/// branches not taken. Any write to overlapping storage forgets the facts,
/// so every fact is exact.
class ConstEnv {
public:
  explicit ConstEnv(const SourceUnit &unit) : unit_(&unit) {}

  /// Applies statement `s`, whose defined items are `kill`.
  void apply(const Statement &s, const ItemSet &kill);
  std::optional<Literal> value(ItemId item) const;

  Truth eval(const Condition &c) const;
  /// Successors of `node` that some execution consistent with the
  /// environment can reach, each with the environment refined by the branch
  /// taken. IF and EVALUATE are pruned; loop tests are never pruned. A target
  /// reached by several branches gets the facts common to all of them.
  std::vector<std::pair<StmtId, ConstEnv>> feasible_successors(const Cfg &cfg, StmtId node) const;

  /// Records that `c` evaluated to `outcome`.
  void assume(const Condition &c, bool outcome);
  /// Keeps only the facts that also hold in `other`.
  void meet(const ConstEnv &other);

  bool operator==(const ConstEnv &other) const {
    return values_ == other.values_ && excluded_ == other.excluded_;
  }

private:
  Truth compare(const Operand &lhs, RelOp op, const Operand &rhs) const;
  Truth matches(const Operand &subject, const WhenChoice &choice) const;
  std::optional<Literal> operand_value(const Operand &op) const;
  void forget_overlapping(ItemId item);
  bool trackable(const Operand &op) const;
  bool excludes(const Operand &item, const Operand &literal) const;
  void assume_equal(ItemId item, const Literal &lit);
  void assume_unequal(ItemId item, const Literal &lit);

  const SourceUnit *unit_;
  std::map<ItemId, Literal> values_;
  std::map<ItemId, std::vector<Literal>> excluded_;
};

/// Compares two literals under COBOL rules for the cases that can be decided
/// without knowing picture editing; anything else is unknown.
Truth compare_literals(const Literal &a, RelOp op, const Literal &b);

} // namespace apify
