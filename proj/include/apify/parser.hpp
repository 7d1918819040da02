#pragma once

#include "apify/lexer.hpp"
#include "apify/screen_map.hpp"
#include "apify/source_unit.hpp"

#include <span>
#include <string_view>

namespace apify {

/// Parses one MiniCOBOL program. Copybooks are inlined, data items get byte
/// offsets, and every statement's read/write sets are classified.
SourceUnit parse_source(std::string_view text, const CopybookResolver &copybooks = {},
                        std::span<const ScreenMap> maps = {});

/// Parses a bare list of data description entries (a copybook body) by
/// wrapping it in a minimal program with the entries in the linkage section.
SourceUnit parse_copybook(std::string_view copybook_text);

} // namespace apify
