#include "apify/read_write.hpp"

#include <algorithm>

namespace apify {

ItemSet read_closure(const SourceUnit &unit, ItemId item) {
  const auto &x = unit.item(item);
  if (x.is_condition()) return read_closure(unit, *x.parent);
  ItemSet out;
  for (std::size_t i = 0; i < unit.data_items.size(); ++i) {
    const auto other = ItemId(i);
    const auto &y = unit.data_items[i];
    if (y.is_condition() || y.storage_root != x.storage_root) continue;
    if (other == item || (unit.overlaps(item, other) && !unit.is_ancestor(other, item))) out.insert(other);
  }
  return out;
}

ItemSet write_closure(const SourceUnit &unit, ItemId item) {
  const auto &x = unit.item(item);
  if (x.is_condition()) return write_closure(unit, *x.parent);
  ItemSet out;
  std::vector<ItemId> todo{item};
  while (!todo.empty()) {
    const auto id = todo.back();
    todo.pop_back();
    out.insert(id);
    for (auto c : unit.item(id).children) todo.push_back(c);
  }
  return out;
}

namespace {

class Classifier {
public:
  Classifier(const SourceUnit &unit, std::span<const ScreenMap> maps) : unit_(unit), maps_(maps) {}

  void read(const Operand &op) {
    switch (op.kind) {
    case Operand::Kind::item:
      out_.reads |= read_closure(unit_, op.item);
      break;
    case Operand::Kind::expression:
      for (auto id : op.expression_reads) out_.reads |= read_closure(unit_, id);
      break;
    case Operand::Kind::literal:
      break;
    }
    subscripts(op);
  }

  void write(const Operand &op) {
    if (op.kind == Operand::Kind::item) out_.writes |= write_closure(unit_, op.item);
    subscripts(op);
  }

  void read(const Condition &c) {
    switch (c.kind) {
    case Condition::Kind::compare:
      read(c.lhs);
      read(c.rhs);
      break;
    case Condition::Kind::condition_name:
      out_.reads |= read_closure(unit_, c.condition_item);
      subscripts(c.lhs);
      break;
    case Condition::Kind::class_test:
      read(c.lhs);
      break;
    case Condition::Kind::all_of:
    case Condition::Kind::any_of:
    case Condition::Kind::negation:
      for (const auto &sub : c.operands) read(sub);
      break;
    }
  }

  void write_sqlcode() {
    if (auto code = unit_.find_item("SQLCODE")) out_.writes |= write_closure(unit_, *code);
  }

  const ScreenMap *find_map(const std::optional<std::string> &name) const {
    if (!name) return nullptr;
    for (const auto &m : maps_)
      if (m.name == *name) return &m;
    return nullptr;
  }

  // Symbolic-map item for screen field `field` with the given suffix, falling
  // back to the bare field name. Restricted to `area` when given.
  std::optional<ItemId> map_item(const std::string &field, char suffix, const std::optional<Operand> &area) const {
    for (const std::string &name : {field + suffix, field}) {
      for (std::size_t i = 0; i < unit_.data_items.size(); ++i) {
        const auto &d = unit_.data_items[i];
        if (d.name != name || d.is_condition()) continue;
        if (area && area->is_item() && ItemId(i) != area->item && !unit_.is_ancestor(area->item, ItemId(i)))
          continue;
        return ItemId(i);
      }
    }
    return std::nullopt;
  }

  ReadWriteSets run(const Statement &st) {
    switch (st.kind) {
    case StmtKind::move:
    case StmtKind::accept:
    case StmtKind::initialize:
    case StmtKind::display:
    case StmtKind::file_read:
    case StmtKind::file_write:
      for (const auto &s : st.sources) read(s);
      for (const auto &t : st.targets) write(t);
      break;
    case StmtKind::arithmetic:
      for (const auto &s : st.sources) read(s);
      if (st.verb == "COMPUTE") {
        for (const auto &t : st.targets) write(t);
      } else {
        // ADD X TO Y reads Y; with GIVING the TO/BY/INTO operands are only read.
        for (const auto &t : st.targets) read(t);
        if (st.giving.empty())
          for (const auto &t : st.targets) write(t);
      }
      for (const auto &g : st.giving) write(g);
      break;
    case StmtKind::if_:
      if (st.condition) read(*st.condition);
      break;
    case StmtKind::evaluate_when:
      if (st.subject) read(*st.subject);
      for (const auto &arm : st.arms)
        for (const auto &choice : arm.choices) {
          switch (choice.kind) {
          case WhenChoice::Kind::value:
            read(choice.value);
            break;
          case WhenChoice::Kind::range:
            read(choice.value);
            read(choice.thru);
            break;
          case WhenChoice::Kind::condition:
            read(choice.condition);
            break;
          case WhenChoice::Kind::any:
            break;
          }
        }
      break;
    case StmtKind::perform:
      if (st.perform) {
        const auto &p = *st.perform;
        if (p.times) read(*p.times);
        if (p.until) read(*p.until);
        if (p.varying) {
          read(*p.varying);
          write(*p.varying);
        }
        if (p.from) read(*p.from);
        if (p.by) read(*p.by);
      }
      break;
    case StmtKind::call:
    case StmtKind::cics_link:
      for (const auto &s : st.sources) read(s);
      for (auto arg : st.call_arguments) out_.writes |= write_closure(unit_, arg);
      if (st.cics)
        for (const auto &t : st.targets) write(t);
      break;
    case StmtKind::cics_receive_map: {
      for (const auto &t : st.targets) write(t);
      const auto *map = find_map(st.cics->map);
      if (!map) {
        if (st.cics->data_area) write(*st.cics->data_area);
        break;
      }
      for (const auto &f : map->fields)
        if (f.accepts_input())
          if (auto id = map_item(f.name, 'I', st.cics->data_area)) out_.writes |= write_closure(unit_, *id);
      break;
    }
    case StmtKind::cics_send_map: {
      for (const auto &t : st.targets) write(t);
      const auto *map = find_map(st.cics->map);
      if (!map) {
        if (st.cics->data_area) read(*st.cics->data_area);
        break;
      }
      for (const auto &f : map->fields)
        if (f.shows_output())
          if (auto id = map_item(f.name, 'O', st.cics->data_area)) out_.reads |= read_closure(unit_, *id);
      break;
    }
    case StmtKind::cics_return:
      if (st.cics && st.cics->data_area) read(*st.cics->data_area);
      break;
    case StmtKind::sql_select:
      for (const auto &in : st.sql->inputs) read(in);
      for (const auto &into : st.sql->into) write(into);
      for (const auto &ind : st.sql->indicators) write(ind);
      write_sqlcode();
      break;
    case StmtKind::sql_insert:
    case StmtKind::sql_update:
    case StmtKind::sql_delete:
      for (const auto &in : st.sql->inputs) read(in);
      write_sqlcode();
      break;
    case StmtKind::other:
      if (st.sql) {
        for (const auto &in : st.sql->inputs) read(in);
        if (st.sql->verb != "DECLARE") write_sqlcode();
        break;
      }
      if (st.detail == "ADDRESS") break;
      for (const auto &s : st.sources) read(s);
      for (const auto &t : st.targets) write(t);
      break;
    case StmtKind::goto_:
    case StmtKind::goback:
    case StmtKind::stop_run:
    case StmtKind::exit:
      break;
    }
    return std::move(out_);
  }

private:
  void subscripts(const Operand &op) {
    for (auto id : op.subscript_reads) out_.reads |= read_closure(unit_, id);
  }

  const SourceUnit &unit_;
  std::span<const ScreenMap> maps_;
  ReadWriteSets out_;
};

} // namespace

ReadWriteSets read_write_sets(const Statement &stmt, const SourceUnit &dictionary, std::span<const ScreenMap> maps) {
  return Classifier(dictionary, maps).run(stmt);
}

} // namespace apify
