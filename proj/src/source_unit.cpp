#include "apify/source_unit.hpp"

#include <algorithm>

namespace apify {

std::string_view to_string(Section s) {
  return s == Section::linkage ? "linkage" : "working_storage";
}

std::string_view to_string(StmtKind kind) {
  switch (kind) {
  case StmtKind::move:
    return "move";
  case StmtKind::arithmetic:
    return "arithmetic";
  case StmtKind::if_:
    return "if";
  case StmtKind::evaluate_when:
    return "evaluate_when";
  case StmtKind::perform:
    return "perform";
  case StmtKind::goto_:
    return "goto";
  case StmtKind::call:
    return "call";
  case StmtKind::cics_receive_map:
    return "cics_receive_map";
  case StmtKind::cics_send_map:
    return "cics_send_map";
  case StmtKind::cics_link:
    return "cics_link";
  case StmtKind::cics_return:
    return "cics_return";
  case StmtKind::sql_select:
    return "sql_select";
  case StmtKind::sql_insert:
    return "sql_insert";
  case StmtKind::sql_update:
    return "sql_update";
  case StmtKind::sql_delete:
    return "sql_delete";
  case StmtKind::file_read:
    return "file_read";
  case StmtKind::file_write:
    return "file_write";
  case StmtKind::display:
    return "display";
  case StmtKind::accept:
    return "accept";
  case StmtKind::initialize:
    return "initialize";
  case StmtKind::goback:
    return "goback";
  case StmtKind::stop_run:
    return "stop_run";
  case StmtKind::exit:
    return "exit";
  case StmtKind::other:
    return "other";
  }
  return "other";
}

std::string spell(const Literal &lit) {
  switch (lit.kind) {
  case Literal::Kind::numeric:
    return lit.text;
  case Literal::Kind::space:
    return "SPACES";
  case Literal::Kind::zero:
    return "ZERO";
  case Literal::Kind::low_value:
    return "LOW-VALUES";
  case Literal::Kind::high_value:
    return "HIGH-VALUES";
  case Literal::Kind::alphanumeric:
    break;
  }
  std::string out = "'";
  for (char c : lit.text) {
    out.push_back(c);
    if (c == '\'') out.push_back('\'');
  }
  return out + "'";
}

std::optional<std::size_t> SourceUnit::find_paragraph(std::string_view name) const {
  for (std::size_t i = 0; i < paragraphs.size(); ++i)
    if (paragraphs[i].name == name) return i;
  return std::nullopt;
}

std::optional<ItemId> SourceUnit::find_item(std::string_view name) const {
  std::optional<ItemId> found;
  for (std::size_t i = 0; i < data_items.size(); ++i) {
    if (data_items[i].filler || data_items[i].name != name) continue;
    if (found) return std::nullopt;
    found = ItemId(i);
  }
  return found;
}

std::string SourceUnit::qualified_name(ItemId id) const {
  std::vector<std::string_view> parts;
  for (std::optional<ItemId> cur = id; cur; cur = item(*cur).parent) parts.push_back(item(*cur).name);
  std::string out;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    if (!out.empty()) out.push_back('.');
    out += *it;
  }
  return out;
}

bool SourceUnit::is_ancestor(ItemId ancestor, ItemId id) const {
  for (auto cur = item(id).parent; cur; cur = item(*cur).parent)
    if (*cur == ancestor) return true;
  return false;
}

bool SourceUnit::overlaps(ItemId a, ItemId b) const {
  const auto &x = item(a);
  const auto &y = item(b);
  if (x.storage_root != y.storage_root) return false;
  return x.byte_offset < y.byte_offset + y.byte_size && y.byte_offset < x.byte_offset + x.byte_size;
}

std::vector<ItemId> SourceUnit::parameters() const {
  if (!using_parameters.empty()) return using_parameters;
  std::vector<ItemId> records;
  for (std::size_t i = 0; i < data_items.size(); ++i) {
    const auto &d = data_items[i];
    if (d.section != Section::linkage || d.parent || d.is_condition()) continue;
    if (d.name == "DFHCOMMAREA") return {ItemId(i)};
    if (!d.redefines) records.push_back(ItemId(i));
  }
  if (records.size() == 1) return records;
  return {};
}

std::vector<StmtId> SourceUnit::nested(StmtId id) const {
  // Statements are numbered in pre-order, so descendants form one contiguous run.
  std::vector<StmtId> out;
  for (std::size_t i = index(id) + 1; i < statements.size(); ++i) {
    bool inside = false;
    for (auto p = statements[i].parent; p; p = stmt(*p).parent)
      if (*p == id) {
        inside = true;
        break;
      }
    if (!inside) break;
    out.push_back(StmtId(i));
  }
  return out;
}

} // namespace apify
