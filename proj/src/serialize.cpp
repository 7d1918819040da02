#include "apify/serialize.hpp"

#include <sstream>

namespace apify {
namespace {

std::string_view relop(RelOp op) {
  switch (op) {
  case RelOp::eq:
    return "=";
  case RelOp::ne:
    return "<>";
  case RelOp::lt:
    return "<";
  case RelOp::le:
    return "<=";
  case RelOp::gt:
    return ">";
  case RelOp::ge:
    return ">=";
  }
  return "=";
}

std::string usage_clause(Usage u) {
  switch (u) {
  case Usage::binary:
    return " COMP";
  case Usage::packed:
    return " COMP-3";
  case Usage::display:
    break;
  }
  return "";
}

std::string join(const std::vector<Operand> &ops) {
  std::string out;
  for (const auto &op : ops) {
    if (!out.empty()) out.push_back(' ');
    out += op.spelling;
  }
  return out;
}

class Writer {
public:
  explicit Writer(const SourceUnit &unit) : unit_(unit) {}

  std::string run() {
    out_ << "IDENTIFICATION DIVISION.\nPROGRAM-ID. " << unit_.program_id << ".\n";
    if (!unit_.data_items.empty()) {
      out_ << "DATA DIVISION.\n";
      std::optional<Section> section;
      for (std::size_t i = 0; i < unit_.data_items.size(); ++i) {
        const auto &d = unit_.data_items[i];
        if (d.parent) continue;
        if (section != d.section) {
          section = d.section;
          out_ << (d.section == Section::linkage ? "LINKAGE SECTION.\n" : "WORKING-STORAGE SECTION.\n");
        }
        item(ItemId(i), 0);
      }
    }
    out_ << "PROCEDURE DIVISION";
    if (!unit_.using_parameters.empty()) {
      out_ << " USING";
      for (auto p : unit_.using_parameters) out_ << ' ' << unit_.item(p).name;
    }
    out_ << ".\n";
    for (const auto &para : unit_.paragraphs) {
      out_ << para.name << ".\n";
      for (auto s : para.statements) {
        statement(s, 1);
        out_ << ".\n";
      }
    }
    return out_.str();
  }

private:
  void indent(int depth) {
    for (int i = 0; i < depth; ++i) out_ << "    ";
  }

  void item(ItemId id, int depth) {
    const auto &d = unit_.item(id);
    indent(depth);
    out_ << (d.level < 10 ? "0" : "") << d.level << ' ' << (d.filler ? "FILLER" : d.name);
    if (d.redefines) out_ << " REDEFINES " << unit_.item(*d.redefines).name;
    if (d.picture) out_ << " PIC " << *d.picture;
    out_ << usage_clause(d.usage);
    if (d.occurs) out_ << " OCCURS " << *d.occurs;
    if (!d.condition_values.empty()) {
      out_ << " VALUE";
      for (const auto &cv : d.condition_values) {
        out_ << ' ' << spell(cv.low);
        if (cv.high) out_ << " THRU " << spell(*cv.high);
      }
    }
    out_ << ".\n";
    for (auto c : d.conditions) item(c, depth + 1);
    for (auto c : d.children) item(c, depth + 1);
  }

  void block(const std::vector<StmtId> &ids, int depth) {
    for (auto s : ids) {
      statement(s, depth);
      out_ << '\n';
    }
  }

  void loop(const PerformSpec &p) {
    switch (p.loop) {
    case PerformSpec::Loop::once:
      break;
    case PerformSpec::Loop::times:
      out_ << ' ' << p.times->spelling << " TIMES";
      break;
    case PerformSpec::Loop::until:
      if (p.test_after) out_ << " WITH TEST AFTER";
      out_ << " UNTIL " << to_source(*p.until);
      break;
    case PerformSpec::Loop::varying:
      if (p.test_after) out_ << " WITH TEST AFTER";
      out_ << " VARYING " << p.varying->spelling << " FROM " << p.from->spelling << " BY " << p.by->spelling
           << " UNTIL " << to_source(*p.until);
      break;
    }
  }

  void statement(StmtId id, int depth) {
    const auto &st = unit_.stmt(id);
    indent(depth);
    switch (st.kind) {
    case StmtKind::move:
      out_ << "MOVE " << st.sources[0].spelling << " TO " << join(st.targets);
      break;
    case StmtKind::arithmetic:
      if (st.verb == "COMPUTE") {
        out_ << "COMPUTE " << join(st.targets) << " = " << st.sources[0].spelling;
        break;
      }
      out_ << st.verb << ' ' << join(st.sources);
      if (!st.detail.empty()) out_ << ' ' << st.detail << ' ' << join(st.targets);
      if (!st.giving.empty()) out_ << " GIVING " << join(st.giving);
      break;
    case StmtKind::if_:
      out_ << "IF " << to_source(*st.condition) << '\n';
      block(st.then_block, depth + 1);
      if (!st.else_block.empty()) {
        indent(depth);
        out_ << "ELSE\n";
        block(st.else_block, depth + 1);
      }
      indent(depth);
      out_ << "END-IF";
      break;
    case StmtKind::evaluate_when:
      out_ << "EVALUATE " << (st.subject ? st.subject->spelling : std::string("TRUE")) << '\n';
      for (const auto &arm : st.arms) {
        for (const auto &choice : arm.choices) {
          indent(depth + 1);
          out_ << "WHEN ";
          switch (choice.kind) {
          case WhenChoice::Kind::any:
            out_ << "ANY";
            break;
          case WhenChoice::Kind::condition:
            out_ << to_source(choice.condition);
            break;
          case WhenChoice::Kind::value:
            out_ << choice.value.spelling;
            break;
          case WhenChoice::Kind::range:
            out_ << choice.value.spelling << " THRU " << choice.thru.spelling;
            break;
          }
          out_ << '\n';
        }
        if (arm.other) {
          indent(depth + 1);
          out_ << "WHEN OTHER\n";
        }
        if (arm.body.empty()) {
          indent(depth + 2);
          out_ << "CONTINUE\n";
        }
        block(arm.body, depth + 2);
      }
      indent(depth);
      out_ << "END-EVALUATE";
      break;
    case StmtKind::perform: {
      const auto &p = *st.perform;
      out_ << "PERFORM";
      if (p.target) {
        out_ << ' ' << *p.target;
        if (p.thru) out_ << " THRU " << *p.thru;
        loop(p);
        break;
      }
      loop(p);
      out_ << '\n';
      block(st.body, depth + 1);
      indent(depth);
      out_ << "END-PERFORM";
      break;
    }
    case StmtKind::goto_:
      out_ << "GO TO " << *st.call_target;
      break;
    case StmtKind::call:
      out_ << "CALL ";
      if (st.dynamic_call)
        out_ << st.sources[0].spelling;
      else
        out_ << '\'' << *st.call_target << '\'';
      if (!st.targets.empty()) out_ << " USING " << join(st.targets);
      break;
    case StmtKind::cics_receive_map:
    case StmtKind::cics_send_map:
    case StmtKind::cics_link:
    case StmtKind::cics_return:
      out_ << "EXEC CICS " << st.cics->text << " END-EXEC";
      break;
    case StmtKind::sql_select:
    case StmtKind::sql_insert:
    case StmtKind::sql_update:
    case StmtKind::sql_delete:
      out_ << "EXEC SQL " << st.sql->text << " END-EXEC";
      break;
    case StmtKind::file_read:
      out_ << "READ " << st.file;
      if (!st.targets.empty()) out_ << " INTO " << st.targets[0].spelling;
      if (!st.sources.empty()) out_ << " KEY " << st.sources[0].spelling;
      break;
    case StmtKind::file_write:
      out_ << st.verb << ' ' << st.sources[0].spelling;
      if (st.sources.size() > 1) out_ << " FROM " << st.sources[1].spelling;
      break;
    case StmtKind::display:
      out_ << "DISPLAY " << join(st.sources);
      if (!st.detail.empty()) out_ << " UPON " << st.detail;
      break;
    case StmtKind::accept:
      out_ << "ACCEPT " << st.targets[0].spelling;
      if (!st.detail.empty()) out_ << " FROM " << st.detail;
      break;
    case StmtKind::initialize:
      out_ << "INITIALIZE " << join(st.targets);
      break;
    case StmtKind::goback:
      out_ << "GOBACK";
      break;
    case StmtKind::stop_run:
      out_ << "STOP RUN";
      break;
    case StmtKind::exit:
      out_ << "EXIT" << (st.detail.empty() ? "" : " " + st.detail);
      break;
    case StmtKind::other:
      other(st);
      break;
    }
  }

  void other(const Statement &st) {
    if (st.cics) {
      out_ << "EXEC CICS " << st.cics->text << " END-EXEC";
    } else if (st.sql) {
      out_ << "EXEC SQL " << st.sql->text << " END-EXEC";
    } else if (st.verb == "SET") {
      if (st.detail == "ADDRESS") {
        out_ << "SET ADDRESS OF " << st.targets[0].spelling << " TO "
             << (st.sources.empty() ? std::string("NULL") : st.sources[0].spelling);
      } else if (st.detail == "TRUE") {
        out_ << "SET " << join(st.targets) << " TO TRUE";
      } else if (st.detail == "TO") {
        out_ << "SET " << join(st.targets) << " TO " << st.sources[0].spelling;
      } else {
        out_ << "SET " << join(st.targets) << ' ' << st.detail << " BY " << st.sources.back().spelling;
      }
    } else {
      out_ << st.verb;
    }
  }

  const SourceUnit &unit_;
  std::ostringstream out_;
};

} // namespace

std::string to_source(const Condition &c) {
  switch (c.kind) {
  case Condition::Kind::compare:
    return c.lhs.spelling + " " + std::string(relop(c.op)) + " " + c.rhs.spelling;
  case Condition::Kind::condition_name:
    return c.lhs.spelling;
  case Condition::Kind::class_test:
    return c.lhs.spelling + " IS " + c.class_name;
  case Condition::Kind::negation:
    return "NOT (" + to_source(c.operands[0]) + ")";
  case Condition::Kind::all_of:
  case Condition::Kind::any_of: {
    std::string out;
    for (const auto &sub : c.operands) {
      if (!out.empty()) out += c.kind == Condition::Kind::all_of ? " AND " : " OR ";
      out += "(" + to_source(sub) + ")";
    }
    return out;
  }
  }
  return {};
}

std::string serialize(const SourceUnit &unit) { return Writer(unit).run(); }

} // namespace apify
