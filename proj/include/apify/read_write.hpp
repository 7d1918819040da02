#pragma once

#include "apify/item_set.hpp"
#include "apify/screen_map.hpp"
#include "apify/source_unit.hpp"

#include <span>

namespace apify {

/// Items read when `item` is read: the item, its descendants, and every item
/// whose storage overlaps it through REDEFINES. Proper ancestors are not
/// included. A level-88 condition name reads its conditional variable.
ItemSet read_closure(const SourceUnit &unit, ItemId item);

/// Items written when `item` is written: the item and its descendants. REDEFINES
/// aliases are never included, so kills stay under-approximated.
ItemSet write_closure(const SourceUnit &unit, ItemId item);

struct ReadWriteSets {
  ItemSet reads;
  ItemSet writes;
};

/// Classifies one statement's operands into read and write sets.
///
/// CALL and CICS LINK get the without-call-chain treatment here: the argument
/// closure is written and nothing is read. The signature module substitutes
/// callee summaries when call-chain analysis is requested. RECEIVE MAP and
/// SEND MAP consult `maps` for input-capable and output-capable fields; when
/// the map is unknown they fall back to the INTO / FROM area.
ReadWriteSets read_write_sets(const Statement &stmt, const SourceUnit &dictionary,
                              std::span<const ScreenMap> maps = {});

} // namespace apify
