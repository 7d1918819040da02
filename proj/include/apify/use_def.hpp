#pragma once

#include "apify/item_set.hpp"
#include "apify/source_unit.hpp"

#include <vector>

namespace apify {

/// Per-statement transfer sets, indexed by StmtId. req_kill and resp_gen are
/// always equal: both are the items a statement defines.
struct UseDefSets {
  std::vector<ItemSet> req_gen;
  std::vector<ItemSet> req_kill;
  std::vector<ItemSet> resp_gen;

  const ItemSet &gen(StmtId s) const { return req_gen[index(s)]; }
  const ItemSet &kill(StmtId s) const { return req_kill[index(s)]; }
  const ItemSet &resp(StmtId s) const { return resp_gen[index(s)]; }
  std::size_t size() const { return req_gen.size(); }
};

/// Sets taken straight from each statement's reads and writes. Call sites get
/// the without-call-chain treatment: they define their arguments and read
/// nothing beyond a dynamic target identifier.
UseDefSets local_use_def(const SourceUnit &unit);

} // namespace apify
