#pragma once

#include "apify/source_unit.hpp"

#include <string>

namespace apify {

/// Renders a parsed unit back to MiniCOBOL. Copybooks are emitted inline and
/// every statement ends its own sentence, so the text re-parses to the same
/// items, paragraphs and statement trees (line numbers aside).
std::string serialize(const SourceUnit &unit);

std::string to_source(const Condition &c);

} // namespace apify
