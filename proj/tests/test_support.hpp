#pragma once

#include "apify/item_set.hpp"
#include "apify/parser.hpp"
#include "apify/source_unit.hpp"
#include "apify/workspace.hpp"

#include <map>
#include <set>
#include <string>

namespace apify::testing {

inline SourceUnit parse(const std::string &text, std::map<std::string, std::string> copybooks = {}) {
  return parse_source(text, [copybooks](const std::string &name) -> std::optional<std::string> {
    auto it = copybooks.find(name);
    if (it == copybooks.end()) return std::nullopt;
    return it->second;
  });
}

/// Working-storage declarations on lines 5.., "MAIN." on the line after
/// "PROCEDURE DIVISION.", statements after that.
inline std::string program(const std::string &data, const std::string &procedure, const std::string &id = "T1") {
  return "IDENTIFICATION DIVISION.\nPROGRAM-ID. " + id + ".\nDATA DIVISION.\nWORKING-STORAGE SECTION.\n" + data +
         "\nPROCEDURE DIVISION.\nMAIN.\n" + procedure + "\n";
}

inline std::set<std::string> names(const SourceUnit &u, const ItemSet &s) {
  std::set<std::string> out;
  s.for_each([&](ItemId id) { out.insert(u.item(id).name); });
  return out;
}

inline std::string fixture(const std::string &relative) { return std::string(APIFY_FIXTURES) + "/" + relative; }

inline Workspace load_fixture(const std::string &name) {
  return load_workspace(load_config(fixture(name + "/apify.json")));
}

/// Statement id of the first statement starting on `line`.
inline StmtId at_line(const SourceUnit &u, int line) {
  for (const auto &st : u.statements)
    if (st.line == line) return st.id;
  throw std::out_of_range("no statement on line " + std::to_string(line));
}

} // namespace apify::testing
