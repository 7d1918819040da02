#include "apify/parser.hpp"

#include "apify/errors.hpp"
#include "apify/read_write.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>
#include <string>

namespace apify {
namespace {

using Kind = Token::Kind;
using StopSet = std::set<std::string, std::less<>>;

const std::set<std::string_view> kVerbs = {
    "MOVE", "COMPUTE", "ADD",   "SUBTRACT",   "MULTIPLY", "DIVIDE", "IF",   "EVALUATE",
    "PERFORM", "GO",   "CALL",  "EXEC",       "READ",     "WRITE",  "REWRITE", "DISPLAY",
    "ACCEPT", "INITIALIZE", "GOBACK", "STOP", "EXIT",     "CONTINUE", "SET"};

const std::set<std::string_view> kKeywords = {
    "TO",        "FROM",        "BY",          "INTO",       "GIVING",      "REMAINDER",
    "ROUNDED",   "ELSE",        "THEN",        "END-IF",     "END-EVALUATE", "END-PERFORM",
    "END-COMPUTE", "END-ADD",   "END-SUBTRACT", "END-MULTIPLY", "END-DIVIDE", "END-CALL",
    "END-READ",  "END-WRITE",   "END-REWRITE", "END-EXEC",   "WHEN",        "OTHER",
    "AND",       "OR",          "NOT",         "UNTIL",      "TIMES",       "VARYING",
    "THRU",      "THROUGH",     "USING",       "OF",         "IN",          "IS",
    "ON",        "SIZE",        "ERROR",       "KEY",        "AT",          "END",
    "ALSO",      "TRUE",        "FALSE",       "EQUAL",      "EQUALS",      "GREATER",
    "LESS",      "THAN",        "NUMERIC",     "ALPHABETIC", "POSITIVE",    "NEGATIVE",
    "UPON",      "WITH",        "NO",          "ADVANCING",  "TEST",        "BEFORE",
    "AFTER",     "REFERENCE",   "CONTENT",     "VALUE",      "ANY",         "NEXT",
    "RECORD",    "ALL",         "CORRESPONDING", "CORR",     "UP",          "DOWN",
    "ADDRESS",   "DEPENDING",   "PROCEDURE",   "DIVISION",   "SECTION",     "INVALID",
    "SENTENCE",  "RUN",         "PROGRAM"};

const std::set<std::string_view> kFigurative = {
    "SPACE", "SPACES", "ZERO", "ZEROS", "ZEROES", "LOW-VALUE", "LOW-VALUES", "HIGH-VALUE",
    "HIGH-VALUES", "QUOTE", "QUOTES"};

const std::set<std::string_view> kEntryClauses = {
    "PIC", "PICTURE", "REDEFINES", "OCCURS", "VALUE", "VALUES", "USAGE", "COMP", "COMP-1",
    "COMP-2", "COMP-3", "COMP-4", "COMP-5", "COMPUTATIONAL", "COMPUTATIONAL-3", "BINARY",
    "PACKED-DECIMAL", "DISPLAY", "SIGN", "JUST", "JUSTIFIED", "SYNC", "SYNCHRONIZED", "BLANK",
    "GLOBAL", "EXTERNAL", "LEADING", "TRAILING"};

const std::set<std::string_view> kClassConditions = {
    "NUMERIC", "ALPHABETIC", "ALPHABETIC-LOWER", "ALPHABETIC-UPPER", "POSITIVE", "NEGATIVE", "ZERO"};

std::string spell_token(const Token &t) {
  if (t.kind == Kind::string) {
    std::string out = "'";
    for (char c : t.text) {
      out.push_back(c);
      if (c == '\'') out.push_back('\'');
    }
    return out + "'";
  }
  return t.text;
}

std::string join_spelling(const std::vector<Token> &tokens, std::size_t from, std::size_t to) {
  std::string out;
  for (std::size_t i = from; i < to; ++i) {
    const Token &t = tokens[i];
    const bool glue_left = t.kind == Kind::rparen || t.kind == Kind::comma || t.kind == Kind::dot ||
                           (i > from && (tokens[i - 1].kind == Kind::lparen || tokens[i - 1].kind == Kind::dot ||
                                         tokens[i - 1].kind == Kind::colon));
    if (!out.empty() && !glue_left) out.push_back(' ');
    out += spell_token(t);
  }
  return out;
}

Literal figurative(std::string_view word) {
  Literal lit;
  if (word.starts_with("SPACE"))
    lit.kind = Literal::Kind::space;
  else if (word.starts_with("ZERO"))
    lit.kind = Literal::Kind::zero;
  else if (word.starts_with("LOW"))
    lit.kind = Literal::Kind::low_value;
  else if (word.starts_with("HIGH"))
    lit.kind = Literal::Kind::high_value;
  else {
    lit.kind = Literal::Kind::alphanumeric;
    lit.text = "\"";
  }
  return lit;
}

std::size_t picture_size(const std::string &pic, Usage usage, int line) {
  std::size_t chars = 0;
  std::size_t digits = 0;
  for (std::size_t i = 0; i < pic.size(); ++i) {
    const char c = pic[i];
    std::size_t repeat = 1;
    if (i + 1 < pic.size() && pic[i + 1] == '(') {
      const auto close = pic.find(')', i + 2);
      if (close == std::string::npos) throw SyntaxError(line, "malformed PICTURE " + pic);
      const std::string count = pic.substr(i + 2, close - i - 2);
      if (std::from_chars(count.data(), count.data() + count.size(), repeat).ec != std::errc{} || repeat == 0)
        throw SyntaxError(line, "malformed PICTURE repeat " + pic);
      i = close;
    }
    switch (c) {
    case 'S':
    case 'V':
    case 'P':
      if (c == 'P') digits += repeat;
      break;
    case '9':
      digits += repeat;
      chars += repeat;
      break;
    case 'X':
    case 'A':
    case 'Z':
    case 'B':
    case '0':
    case '/':
    case ',':
    case '.':
    case '+':
    case '-':
    case '*':
    case '$':
    case 'C':
    case 'R':
    case 'D':
    case 'E':
      if (c == 'Z' || c == '*') digits += repeat;
      chars += repeat;
      break;
    default:
      throw SyntaxError(line, std::string("unsupported PICTURE symbol '") + c + "' in " + pic);
    }
  }
  switch (usage) {
  case Usage::binary:
    return digits <= 4 ? 2 : digits <= 9 ? 4 : 8;
  case Usage::packed:
    return digits / 2 + 1;
  case Usage::display:
    break;
  }
  if (chars == 0) throw SyntaxError(line, "PICTURE " + pic + " describes no characters");
  return chars;
}

class Parser {
public:
  Parser(std::vector<Token> tokens, std::span<const ScreenMap> maps) : toks_(std::move(tokens)), maps_(maps) {}

  SourceUnit run() {
    parse_identification();
    skip_environment();
    if (at_word("DATA")) parse_data_division();
    finish_data_items();
    if (uses_sql() && !unit_.find_item("SQLCODE")) add_sqlca();
    parse_procedure_division();
    for (auto &st : unit_.statements) {
      auto rw = read_write_sets(st, unit_, maps_);
      st.reads = std::move(rw.reads);
      st.writes = std::move(rw.writes);
    }
    return std::move(unit_);
  }

private:
  // ---- token access -------------------------------------------------------

  const Token &peek(std::size_t k = 0) const {
    const auto i = std::min(pos_ + k, toks_.size() - 1);
    return toks_[i];
  }
  const Token &next() {
    const Token &t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  int line() const { return peek().line; }
  int last_line() const { return pos_ == 0 ? peek().line : toks_[pos_ - 1].line; }
  bool at_word(std::string_view w, std::size_t k = 0) const { return peek(k).is_word(w); }
  bool at(Kind k, std::size_t ahead = 0) const { return peek(ahead).kind == k; }
  bool accept_word(std::string_view w) {
    if (!at_word(w)) return false;
    next();
    return true;
  }
  void expect_word(std::string_view w) {
    if (!accept_word(w)) fail("expected " + std::string(w) + ", found '" + describe(peek()) + "'");
  }
  void expect(Kind k, const char *what) {
    if (!at(k)) fail(std::string("expected ") + what + ", found '" + describe(peek()) + "'");
    next();
  }
  void accept_periods() {
    while (at(Kind::period)) next();
  }
  [[noreturn]] void fail(const std::string &msg) const { throw SyntaxError(line(), msg); }
  static std::string describe(const Token &t) { return t.kind == Kind::eof ? "end of file" : spell_token(t); }

  bool is_identifier_start(std::size_t k = 0) const {
    const Token &t = peek(k);
    return t.kind == Kind::word && !kKeywords.contains(t.text) && !kVerbs.contains(t.text) &&
           !kFigurative.contains(t.text);
  }

  Statement &S(StmtId id) { return unit_.statements[index(id)]; }

  // ---- identification / environment -------------------------------------

  void parse_identification() {
    if (!accept_word("IDENTIFICATION")) expect_word("ID");
    expect_word("DIVISION");
    expect(Kind::period, "'.'");
    expect_word("PROGRAM-ID");
    expect(Kind::period, "'.'");
    if (at(Kind::word) || at(Kind::string))
      unit_.program_id = upper(next().text);
    else
      fail("expected program name");
    accept_periods();
    while (!at(Kind::eof) && !(at_word("ENVIRONMENT") || at_word("DATA") || at_word("PROCEDURE")))
      next();
  }

  static std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
  }

  void skip_environment() {
    if (!at_word("ENVIRONMENT")) return;
    while (!at(Kind::eof) && !(at_word("DATA") && at_word("DIVISION", 1)) &&
           !(at_word("PROCEDURE") && at_word("DIVISION", 1)))
      next();
  }

  // ---- data division -------------------------------------------------------

  struct PendingRedefines {
    ItemId item;
    std::string target;
    int line;
  };

  void parse_data_division() {
    expect_word("DATA");
    expect_word("DIVISION");
    expect(Kind::period, "'.'");
    while (!at(Kind::eof) && !(at_word("PROCEDURE") && at_word("DIVISION", 1))) {
      if ((at_word("WORKING-STORAGE") || at_word("LOCAL-STORAGE")) && at_word("SECTION", 1)) {
        section_ = Section::working_storage;
        next();
        next();
        expect(Kind::period, "'.'");
        stack_.clear();
      } else if (at_word("LINKAGE") && at_word("SECTION", 1)) {
        section_ = Section::linkage;
        next();
        next();
        expect(Kind::period, "'.'");
        stack_.clear();
      } else if (at_word("FILE") && at_word("SECTION", 1)) {
        fail("FILE SECTION is not part of MiniCOBOL; use READ ... INTO");
      } else if (at_word("EXEC") && at_word("SQL", 1)) {
        next();
        next();
        const bool sqlca = at_word("INCLUDE") && at_word("SQLCA", 1);
        while (!at(Kind::eof) && !at_word("END-EXEC")) next();
        expect_word("END-EXEC");
        accept_periods();
        if (sqlca && !unit_.find_item("SQLCODE")) add_sqlca();
      } else if (at(Kind::number)) {
        parse_entry();
      } else {
        fail("expected a data description entry, found '" + describe(peek()) + "'");
      }
    }
  }

  std::optional<Literal> parse_literal() {
    const Token &t = peek();
    if (t.kind == Kind::string) {
      next();
      return Literal{Literal::Kind::alphanumeric, t.text};
    }
    if (t.kind == Kind::number) {
      next();
      return Literal{Literal::Kind::numeric, t.text};
    }
    if ((t.is_op("-") || t.is_op("+")) && peek(1).kind == Kind::number) {
      const std::string sign = t.text == "-" ? "-" : "";
      next();
      return Literal{Literal::Kind::numeric, sign + next().text};
    }
    if (t.kind == Kind::word && kFigurative.contains(t.text)) {
      next();
      return figurative(t.text);
    }
    if (t.is_word("ALL") && peek(1).kind == Kind::string) {
      next();
      return Literal{Literal::Kind::alphanumeric, next().text};
    }
    return std::nullopt;
  }

  void parse_entry() {
    const Token level_tok = next();
    int level = 0;
    std::from_chars(level_tok.text.data(), level_tok.text.data() + level_tok.text.size(), level);
    if (!((level >= 1 && level <= 49) || level == 77 || level == 88))
      throw SyntaxError(level_tok.line, "unsupported level number " + level_tok.text);

    DataItem d;
    d.level = level;
    d.line = level_tok.line;
    d.copybook = level_tok.copybook;
    d.section = section_;
    if (at_word("FILLER")) {
      next();
      d.filler = true;
      d.name = "FILLER";
    } else if (at(Kind::word) && !kEntryClauses.contains(peek().text)) {
      d.name = next().text;
    } else {
      d.filler = true;
      d.name = "FILLER";
    }

    std::optional<std::string> redefines;
    while (!at(Kind::period)) {
      if (at(Kind::eof)) fail("unterminated data description entry");
      const Token t = next();
      if (t.is_word("REDEFINES")) {
        if (!at(Kind::word)) fail("expected name after REDEFINES");
        redefines = next().text;
      } else if (t.is_word("PIC") || t.is_word("PICTURE")) {
        accept_word("IS");
        if (!at(Kind::picture)) fail("expected PICTURE string");
        d.picture = next().text;
      } else if (t.is_word("OCCURS")) {
        if (!at(Kind::number)) fail("expected OCCURS count");
        int n = 0;
        const auto &txt = next().text;
        std::from_chars(txt.data(), txt.data() + txt.size(), n);
        if (n <= 0) fail("OCCURS count must be positive");
        d.occurs = n;
        accept_word("TIMES");
        if (accept_word("DEPENDING")) {
          accept_word("ON");
          next();
        }
        if (accept_word("INDEXED")) {
          accept_word("BY");
          while (at(Kind::word) && !kEntryClauses.contains(peek().text)) next();
        }
      } else if (t.is_word("VALUE") || t.is_word("VALUES")) {
        accept_word("IS");
        accept_word("ARE");
        for (;;) {
          auto lit = parse_literal();
          if (!lit) break;
          ConditionValue cv{*lit, std::nullopt};
          if (accept_word("THRU") || accept_word("THROUGH")) {
            auto hi = parse_literal();
            if (!hi) fail("expected literal after THRU");
            cv.high = *hi;
          }
          if (!d.value) d.value = cv.low;
          d.condition_values.push_back(std::move(cv));
          if (at(Kind::comma)) next();
        }
        if (d.condition_values.empty()) fail("expected literal after VALUE");
      } else if (t.is_word("USAGE")) {
        accept_word("IS");
        apply_usage(d, next());
      } else if (t.is_word("COMP") || t.is_word("COMP-3") || t.is_word("COMP-4") || t.is_word("COMP-5") ||
                 t.is_word("BINARY") || t.is_word("PACKED-DECIMAL") || t.is_word("COMPUTATIONAL") ||
                 t.is_word("COMPUTATIONAL-3") || t.is_word("DISPLAY")) {
        apply_usage(d, t);
      } else if (t.is_word("SIGN")) {
        accept_word("IS");
        if (!accept_word("LEADING")) accept_word("TRAILING");
        if (accept_word("SEPARATE")) accept_word("CHARACTER");
      } else if (t.is_word("LEADING") || t.is_word("TRAILING")) {
        if (accept_word("SEPARATE")) accept_word("CHARACTER");
      } else if (t.is_word("JUST") || t.is_word("JUSTIFIED")) {
        accept_word("RIGHT");
      } else if (t.is_word("SYNC") || t.is_word("SYNCHRONIZED")) {
        if (!accept_word("LEFT")) accept_word("RIGHT");
      } else if (t.is_word("BLANK")) {
        accept_word("WHEN");
        if (!accept_word("ZERO") && !accept_word("ZEROS")) accept_word("ZEROES");
      } else if (t.is_word("GLOBAL") || t.is_word("EXTERNAL")) {
      } else {
        throw SyntaxError(t.line, "unexpected '" + describe(t) + "' in data description of " + d.name);
      }
    }
    next(); // period

    if (level == 88) {
      if (d.picture) throw SyntaxError(d.line, "level-88 item " + d.name + " cannot have a PICTURE");
      if (d.condition_values.empty()) throw SyntaxError(d.line, "level-88 item " + d.name + " needs VALUE");
    }
    attach(std::move(d), redefines);
  }

  void apply_usage(DataItem &d, const Token &t) {
    if (t.is_word("DISPLAY"))
      d.usage = Usage::display;
    else if (t.is_word("COMP-3") || t.is_word("PACKED-DECIMAL") || t.is_word("COMPUTATIONAL-3"))
      d.usage = Usage::packed;
    else if (t.is_word("COMP") || t.is_word("COMP-4") || t.is_word("COMP-5") || t.is_word("BINARY") ||
             t.is_word("COMPUTATIONAL"))
      d.usage = Usage::binary;
    else
      throw SyntaxError(t.line, "unsupported USAGE " + t.text);
  }

  std::string path_of(std::optional<ItemId> parent) const {
    return parent ? unit_.qualified_name(*parent) : std::string("<record level>");
  }

  void attach(DataItem d, const std::optional<std::string> &redefines) {
    const auto id = ItemId(unit_.data_items.size());
    const int level = d.level;
    const int line = d.line;
    if (level == 88) {
      if (stack_.empty()) throw SyntaxError(line, "level-88 item " + d.name + " has no conditional variable");
      d.parent = stack_.back().second;
      unit_.data_items.push_back(std::move(d));
      unit_.data_items[index(*unit_.data_items.back().parent)].conditions.push_back(id);
      return;
    }
    if (level == 1 || level == 77) {
      stack_.clear();
      if (!d.filler) {
        for (const auto &other : unit_.data_items)
          if (!other.parent && !other.filler && other.name == d.name)
            throw DuplicateDataItem(d.name, path_of(std::nullopt));
      }
    } else {
      while (!stack_.empty() && stack_.back().first >= level) stack_.pop_back();
      if (stack_.empty()) throw SyntaxError(line, "level " + std::to_string(level) + " item " + d.name +
                                                      " has no enclosing record");
      if (stack_.back().first == 77) throw SyntaxError(line, "level-77 items cannot have subordinates");
      d.parent = stack_.back().second;
      const auto &siblings = unit_.data_items[index(*d.parent)].children;
      if (!d.filler)
        for (auto s : siblings)
          if (unit_.item(s).name == d.name) throw DuplicateDataItem(d.name, path_of(d.parent));
    }
    if (redefines) pending_redefines_.push_back({id, *redefines, line});
    const auto parent = d.parent;
    unit_.data_items.push_back(std::move(d));
    if (parent) unit_.data_items[index(*parent)].children.push_back(id);
    stack_.emplace_back(level, id);
  }

  void finish_data_items() {
    auto &items = unit_.data_items;
    for (const auto &p : pending_redefines_) {
      const auto &item = items[index(p.item)];
      std::optional<ItemId> target;
      for (std::size_t i = 0; i < index(p.item); ++i) {
        const auto &cand = items[i];
        if (cand.name == p.target && cand.parent == item.parent && !cand.is_condition() &&
            (item.parent || cand.section == item.section))
          target = ItemId(i);
      }
      if (!target) throw UnresolvedName(p.target, p.line, "REDEFINES target must be a preceding sibling");
      items[index(p.item)].redefines = target;
    }
    for (const auto &item : items) {
      if (item.is_condition()) continue;
      if (item.is_group() && item.children.empty())
        throw SyntaxError(item.line, "group item " + item.name + " has no PICTURE and no subordinate items");
      if (item.is_elementary() && !item.children.empty())
        throw SyntaxError(item.line, "elementary item " + item.name + " has subordinate items");
    }
    // Sizes: children always follow their parent, so a reverse sweep sees
    // every child before its group.
    for (std::size_t i = items.size(); i-- > 0;) {
      auto &item = items[i];
      if (item.is_condition()) continue;
      std::size_t one = 0;
      if (item.is_elementary()) {
        one = picture_size(*item.picture, item.usage, item.line);
      } else {
        std::size_t cursor = 0;
        std::vector<std::pair<ItemId, std::size_t>> placed;
        for (auto c : item.children) {
          const auto &child = items[index(c)];
          std::size_t at = cursor;
          if (child.redefines) {
            for (auto &[pid, poff] : placed)
              if (pid == *child.redefines) at = poff;
          }
          placed.emplace_back(c, at);
          cursor = std::max(cursor, at + child.byte_size);
        }
        one = cursor;
      }
      item.byte_size = one * static_cast<std::size_t>(item.occurs.value_or(1));
      if (item.byte_size == 0) item.byte_size = 1;
    }
    // Offsets and storage roots, parents first.
    for (std::size_t i = 0; i < items.size(); ++i) {
      auto &item = items[i];
      if (item.is_condition()) continue;
      if (!item.parent) {
        item.byte_offset = 0;
        item.storage_root = item.redefines ? items[index(*item.redefines)].storage_root : ItemId(i);
      }
      if (item.is_group()) {
        std::size_t cursor = item.byte_offset;
        for (auto c : item.children) {
          auto &child = items[index(c)];
          child.storage_root = item.storage_root;
          child.byte_offset = child.redefines ? items[index(*child.redefines)].byte_offset : cursor;
          if (!child.redefines) cursor = child.byte_offset + child.byte_size;
          else cursor = std::max(cursor, child.byte_offset + child.byte_size);
        }
      }
    }
    for (auto &item : items) {
      if (!item.is_condition()) continue;
      const auto &parent = items[index(*item.parent)];
      item.byte_offset = parent.byte_offset;
      item.byte_size = parent.byte_size;
      item.storage_root = parent.storage_root;
      item.section = parent.section;
    }
  }

  bool uses_sql() const {
    for (std::size_t i = pos_; i + 1 < toks_.size(); ++i)
      if (toks_[i].is_word("EXEC") && toks_[i + 1].is_word("SQL")) return true;
    return false;
  }

  void add_sqlca() {
    const auto root = ItemId(unit_.data_items.size());
    DataItem sqlca;
    sqlca.name = "SQLCA";
    sqlca.level = 1;
    sqlca.section = Section::working_storage;
    sqlca.storage_root = root;
    sqlca.byte_size = 4;
    DataItem code;
    code.name = "SQLCODE";
    code.level = 5;
    code.picture = "S9(9)";
    code.usage = Usage::binary;
    code.section = Section::working_storage;
    code.parent = root;
    code.storage_root = root;
    code.byte_size = 4;
    sqlca.children.push_back(ItemId(index(root) + 1));
    unit_.data_items.push_back(std::move(sqlca));
    unit_.data_items.push_back(std::move(code));
  }

  // ---- procedure division -----------------------------------------------

  void parse_procedure_division() {
    if (at(Kind::eof)) fail("missing PROCEDURE DIVISION");
    unit_.procedure_line = line();
    expect_word("PROCEDURE");
    expect_word("DIVISION");
    if (accept_word("USING")) {
      while (!at(Kind::period) && !at(Kind::eof)) {
        if (accept_word("BY")) {
          if (!accept_word("REFERENCE") && !accept_word("VALUE")) fail("expected REFERENCE or VALUE");
          continue;
        }
        const Token &t = next();
        auto id = unit_.find_item(t.text);
        if (!id) throw UnresolvedName(t.text, t.line);
        const auto &item = unit_.item(*id);
        if (item.section != Section::linkage || item.parent)
          throw SyntaxError(t.line, "USING parameter " + t.text + " must be a linkage-section record");
        unit_.using_parameters.push_back(*id);
      }
    }
    expect(Kind::period, "'.'");

    while (!at(Kind::eof)) {
      if (at_word("END") && at_word("PROGRAM", 1)) {
        while (!at(Kind::eof)) next();
        break;
      }
      if (at(Kind::word) && !kVerbs.contains(peek().text) &&
          (at(Kind::period, 1) || (at_word("SECTION", 1) && at(Kind::period, 2)))) {
        start_paragraph();
        continue;
      }
      if (unit_.paragraphs.empty()) fail("statement outside of a paragraph");
      auto block = parse_block({});
      auto &para = unit_.paragraphs.back();
      para.statements.insert(para.statements.end(), block.begin(), block.end());
      if (!at(Kind::period) && !at(Kind::eof))
        fail("expected '.' or a statement, found '" + describe(peek()) + "'");
      para.end_line = last_line();
      accept_periods();
    }
  }

  void start_paragraph() {
    const Token name = next();
    if (at_word("SECTION")) next();
    next(); // period
    if (unit_.find_paragraph(name.text)) throw SyntaxError(name.line, "duplicate paragraph " + name.text);
    Paragraph p;
    p.name = name.text;
    p.line = name.line;
    p.end_line = name.line;
    unit_.paragraphs.push_back(std::move(p));
  }

  std::vector<StmtId> parse_block(const StopSet &stops) {
    std::vector<StmtId> ids;
    for (;;) {
      const Token &t = peek();
      if (t.kind == Kind::period || t.kind == Kind::eof) break;
      if (t.kind == Kind::word && stops.contains(t.text)) break;
      if (t.kind == Kind::word && kVerbs.contains(t.text)) {
        ids.push_back(parse_statement(stops));
        continue;
      }
      fail("expected a statement, found '" + describe(t) + "'");
    }
    return ids;
  }

  StmtId begin(StmtKind kind) {
    Statement st;
    st.id = StmtId(unit_.statements.size());
    st.line = line();
    st.kind = kind;
    st.verb = peek().text;
    st.paragraph = unit_.paragraphs.size() - 1;
    if (!parents_.empty()) st.parent = parents_.back();
    unit_.statements.push_back(std::move(st));
    return unit_.statements.back().id;
  }

  void finish(StmtId id) { S(id).end_line = std::max(S(id).line, last_line()); }

  StmtId parse_statement(const StopSet &stops) {
    const std::string verb = peek().text;
    StmtId id{};
    if (verb == "MOVE")
      id = parse_move();
    else if (verb == "COMPUTE")
      id = parse_compute();
    else if (verb == "ADD" || verb == "SUBTRACT" || verb == "MULTIPLY" || verb == "DIVIDE")
      id = parse_arithmetic(verb);
    else if (verb == "IF")
      id = parse_if(stops);
    else if (verb == "EVALUATE")
      id = parse_evaluate(stops);
    else if (verb == "PERFORM")
      id = parse_perform(stops);
    else if (verb == "GO")
      id = parse_goto();
    else if (verb == "CALL")
      id = parse_call();
    else if (verb == "EXEC")
      id = parse_exec();
    else if (verb == "READ")
      id = parse_read();
    else if (verb == "WRITE" || verb == "REWRITE")
      id = parse_write();
    else if (verb == "DISPLAY")
      id = parse_display();
    else if (verb == "ACCEPT")
      id = parse_accept();
    else if (verb == "INITIALIZE")
      id = parse_initialize();
    else if (verb == "SET")
      id = parse_set();
    else
      id = parse_simple(verb);
    finish(id);
    return id;
  }

  // ---- operands -------------------------------------------------------------

  Operand parse_identifier() {
    if (!is_identifier_start()) fail("expected an identifier, found '" + describe(peek()) + "'");
    const std::size_t start = pos_;
    const Token name = next();
    std::vector<std::string> qualifiers;
    while ((at_word("OF") || at_word("IN")) && at(Kind::word, 1)) {
      next();
      qualifiers.push_back(next().text);
    }
    Operand op;
    op.kind = Operand::Kind::item;
    op.item = resolve(name.text, qualifiers, name.line);
    if (at(Kind::lparen)) {
      next();
      int depth = 1;
      while (depth > 0) {
        if (at(Kind::eof) || at(Kind::period)) fail("unterminated subscript");
        if (at(Kind::lparen)) {
          ++depth;
          next();
        } else if (at(Kind::rparen)) {
          --depth;
          next();
        } else if (is_identifier_start()) {
          auto sub = parse_identifier();
          op.subscript_reads.push_back(sub.item);
          op.subscript_reads.insert(op.subscript_reads.end(), sub.subscript_reads.begin(),
                                    sub.subscript_reads.end());
        } else {
          next();
        }
      }
    }
    op.spelling = join_spelling(toks_, start, pos_);
    return op;
  }

  ItemId resolve(const std::string &name, const std::vector<std::string> &qualifiers, int at_line) const {
    std::vector<ItemId> found;
    for (std::size_t i = 0; i < unit_.data_items.size(); ++i) {
      const auto &item = unit_.data_items[i];
      if (item.filler || item.name != name) continue;
      auto anc = item.parent;
      std::size_t q = 0;
      while (anc && q < qualifiers.size()) {
        if (unit_.item(*anc).name == qualifiers[q]) ++q;
        anc = unit_.item(*anc).parent;
      }
      if (q == qualifiers.size()) found.push_back(ItemId(i));
    }
    if (found.empty()) throw UnresolvedName(name, at_line);
    if (found.size() > 1) throw UnresolvedName(name, at_line, "ambiguous reference; qualify with OF");
    return found.front();
  }

  Operand parse_value() {
    const std::size_t start = pos_;
    if (auto lit = parse_literal()) {
      Operand op;
      op.kind = Operand::Kind::literal;
      op.literal = *lit;
      op.spelling = join_spelling(toks_, start, pos_);
      return op;
    }
    return parse_identifier();
  }

  bool at_value() const {
    const Token &t = peek();
    return t.kind == Kind::string || t.kind == Kind::number ||
           ((t.is_op("-") || t.is_op("+")) && peek(1).kind == Kind::number) ||
           (t.kind == Kind::word && kFigurative.contains(t.text)) || (t.is_word("ALL") && at(Kind::string, 1)) ||
           is_identifier_start();
  }

  // Arithmetic expression; collapses to the single operand when trivial.
  Operand parse_expression() {
    const std::size_t start = pos_;
    std::vector<Operand> terms;
    parse_sum(terms);
    if (pos_ - start == 0) fail("expected an expression");
    if (terms.size() == 1) {
      const auto &only = terms.front();
      const bool single = (only.kind == Operand::Kind::item || only.kind == Operand::Kind::literal) &&
                          join_spelling(toks_, start, pos_) == only.spelling;
      if (single) return only;
    }
    Operand op;
    op.kind = Operand::Kind::expression;
    op.spelling = join_spelling(toks_, start, pos_);
    for (const auto &t : terms) {
      if (t.kind != Operand::Kind::item) continue;
      op.expression_reads.push_back(t.item);
      op.expression_reads.insert(op.expression_reads.end(), t.subscript_reads.begin(), t.subscript_reads.end());
    }
    return op;
  }

  void parse_sum(std::vector<Operand> &terms) {
    parse_product(terms);
    while (peek().is_op("+") || peek().is_op("-")) {
      next();
      parse_product(terms);
    }
  }
  void parse_product(std::vector<Operand> &terms) {
    parse_power(terms);
    while (peek().is_op("*") || peek().is_op("/")) {
      next();
      parse_power(terms);
    }
  }
  void parse_power(std::vector<Operand> &terms) {
    parse_unary(terms);
    while (peek().is_op("**")) {
      next();
      parse_unary(terms);
    }
  }
  void parse_unary(std::vector<Operand> &terms) {
    if ((peek().is_op("-") || peek().is_op("+")) && peek(1).kind != Kind::number) next();
    if (at(Kind::lparen)) {
      next();
      parse_sum(terms);
      expect(Kind::rparen, "')'");
      return;
    }
    terms.push_back(parse_value());
  }

  // ---- conditions ------------------------------------------------------------

  Condition parse_condition() {
    Condition first = parse_and();
    if (!at_word("OR")) return first;
    Condition any;
    any.kind = Condition::Kind::any_of;
    any.operands.push_back(std::move(first));
    while (accept_word("OR")) any.operands.push_back(parse_and());
    return any;
  }

  Condition parse_and() {
    Condition first = parse_not();
    if (!at_word("AND")) return first;
    Condition all;
    all.kind = Condition::Kind::all_of;
    all.operands.push_back(std::move(first));
    while (accept_word("AND")) all.operands.push_back(parse_not());
    return all;
  }

  Condition parse_not() {
    if (accept_word("NOT")) {
      Condition neg;
      neg.kind = Condition::Kind::negation;
      neg.operands.push_back(parse_not());
      return neg;
    }
    return parse_primary_condition();
  }

  bool at_relop() const {
    const Token &t = peek();
    if (t.kind == Kind::op)
      return t.text == "=" || t.text == ">" || t.text == "<" || t.text == ">=" || t.text == "<=" || t.text == "<>";
    return t.is_word("EQUAL") || t.is_word("EQUALS") || t.is_word("GREATER") || t.is_word("LESS");
  }

  bool at_arith_op() const {
    const Token &t = peek();
    return t.is_op("+") || t.is_op("-") || t.is_op("*") || t.is_op("/") || t.is_op("**");
  }

  Condition parse_primary_condition() {
    if (at(Kind::lparen)) {
      const std::size_t save = pos_;
      const auto saved_last = last_compare_;
      try {
        next();
        Condition inner = parse_condition();
        expect(Kind::rparen, "')'");
        if (!at_relop() && !at_arith_op() && !at_word("IS") && !at_word("NOT")) return inner;
      } catch (const SyntaxError &) {
      }
      pos_ = save;
      last_compare_ = saved_last;
    }
    return parse_simple_condition();
  }

  RelOp parse_relop() {
    const Token t = next();
    if (t.is_op("=") || t.is_word("EQUALS")) return RelOp::eq;
    if (t.is_word("EQUAL")) {
      accept_word("TO");
      return RelOp::eq;
    }
    if (t.is_op(">")) return RelOp::gt;
    if (t.is_op("<")) return RelOp::lt;
    if (t.is_op(">=")) return RelOp::ge;
    if (t.is_op("<=")) return RelOp::le;
    if (t.is_op("<>")) return RelOp::ne;
    const bool greater = t.is_word("GREATER");
    accept_word("THAN");
    if (at_word("OR") && at_word("EQUAL", 1)) {
      next();
      next();
      accept_word("TO");
      return greater ? RelOp::ge : RelOp::le;
    }
    return greater ? RelOp::gt : RelOp::lt;
  }

  static RelOp negate(RelOp op) {
    switch (op) {
    case RelOp::eq:
      return RelOp::ne;
    case RelOp::ne:
      return RelOp::eq;
    case RelOp::lt:
      return RelOp::ge;
    case RelOp::le:
      return RelOp::gt;
    case RelOp::gt:
      return RelOp::le;
    case RelOp::ge:
      return RelOp::lt;
    }
    return op;
  }

  Condition parse_simple_condition() {
    Operand lhs = parse_expression();
    accept_word("IS");
    const bool negated = accept_word("NOT");
    Condition c;
    if (at_relop()) {
      RelOp op = parse_relop();
      if (negated) op = negate(op);
      c.kind = Condition::Kind::compare;
      c.op = op;
      c.lhs = std::move(lhs);
      c.rhs = parse_expression();
      last_compare_ = std::make_pair(c.lhs, c.op);
      return c;
    }
    if (at(Kind::word) && kClassConditions.contains(peek().text)) {
      c.kind = Condition::Kind::class_test;
      c.class_name = next().text;
      c.lhs = std::move(lhs);
      if (!negated) return c;
      Condition neg;
      neg.kind = Condition::Kind::negation;
      neg.operands.push_back(std::move(c));
      return neg;
    }
    if (negated) fail("expected a relational operator after NOT");
    if (lhs.kind == Operand::Kind::item && unit_.item(lhs.item).is_condition()) {
      c.kind = Condition::Kind::condition_name;
      c.condition_item = lhs.item;
      c.lhs = std::move(lhs);
      return c;
    }
    if (last_compare_) {
      // Abbreviated combined relation: A = 1 OR 2.
      c.kind = Condition::Kind::compare;
      c.lhs = last_compare_->first;
      c.op = last_compare_->second;
      c.rhs = std::move(lhs);
      return c;
    }
    fail("expected a condition");
  }

  Condition parse_full_condition() {
    last_compare_.reset();
    auto c = parse_condition();
    last_compare_.reset();
    return c;
  }

  // ---- statements ------------------------------------------------------------

  std::vector<Operand> parse_identifiers() {
    std::vector<Operand> out;
    while (is_identifier_start()) {
      out.push_back(parse_identifier());
      accept_word("ROUNDED");
      if (at(Kind::comma)) next();
    }
    return out;
  }

  StmtId parse_move() {
    const StmtId id = begin(StmtKind::move);
    next();
    if (at_word("CORRESPONDING") || at_word("CORR")) fail("MOVE CORRESPONDING is not supported");
    S(id).sources.push_back(parse_value());
    expect_word("TO");
    S(id).targets = parse_identifiers();
    if (S(id).targets.empty()) fail("MOVE needs at least one receiving item");
    return id;
  }

  StmtId parse_compute() {
    const StmtId id = begin(StmtKind::arithmetic);
    next();
    S(id).targets = parse_identifiers();
    if (S(id).targets.empty()) fail("COMPUTE needs a receiving item");
    if (!accept_word("EQUAL")) {
      if (!peek().is_op("=")) fail("expected '=' in COMPUTE");
      next();
    }
    S(id).sources.push_back(parse_expression());
    reject_size_error();
    accept_word("END-COMPUTE");
    return id;
  }

  void reject_size_error() {
    if (at_word("ON") || at_word("SIZE") || (at_word("NOT") && at_word("ON", 1)))
      fail("ON SIZE ERROR is not supported");
  }

  StmtId parse_arithmetic(const std::string &verb) {
    const StmtId id = begin(StmtKind::arithmetic);
    next();
    if (at_word("CORRESPONDING") || at_word("CORR")) fail(verb + " CORRESPONDING is not supported");
    std::vector<Operand> sources;
    while (at_value() && !(is_identifier_start() && false)) {
      sources.push_back(parse_value());
      if (at(Kind::comma)) next();
      if (verb == "MULTIPLY" || verb == "DIVIDE") break;
    }
    if (sources.empty()) fail("expected operands after " + verb);
    std::string link;
    if (verb == "ADD" && accept_word("TO"))
      link = "TO";
    else if (verb == "SUBTRACT" && accept_word("FROM"))
      link = "FROM";
    else if (verb == "MULTIPLY" && accept_word("BY"))
      link = "BY";
    else if (verb == "DIVIDE" && accept_word("INTO"))
      link = "INTO";
    else if (verb == "DIVIDE" && accept_word("BY"))
      link = "BY";
    std::vector<Operand> targets;
    if (!link.empty()) {
      while (at_value()) {
        targets.push_back(parse_value());
        accept_word("ROUNDED");
        if (at(Kind::comma)) next();
      }
      if (targets.empty()) fail("expected operands after " + link);
    }
    std::vector<Operand> giving;
    if (accept_word("GIVING")) giving = parse_identifiers();
    if (accept_word("REMAINDER")) {
      auto rem = parse_identifiers();
      giving.insert(giving.end(), rem.begin(), rem.end());
    }
    if (link.empty() && giving.empty()) fail(verb + " needs TO/FROM/BY/INTO or GIVING");
    if (giving.empty())
      for (const auto &t : targets)
        if (t.kind != Operand::Kind::item) fail(verb + " receiving operand must be an identifier");
    reject_size_error();
    accept_word("END-" + verb);
    auto &st = S(id);
    st.sources = std::move(sources);
    st.targets = std::move(targets);
    st.giving = std::move(giving);
    st.detail = link;
    return id;
  }

  StopSet with(const StopSet &stops, std::initializer_list<const char *> extra) {
    StopSet out = stops;
    for (auto e : extra) out.insert(e);
    return out;
  }

  StmtId parse_if(const StopSet &stops) {
    const StmtId id = begin(StmtKind::if_);
    next();
    S(id).condition = parse_full_condition();
    accept_word("THEN");
    if (at_word("NEXT") && at_word("SENTENCE", 1)) fail("NEXT SENTENCE is not supported");
    parents_.push_back(id);
    auto then_block = parse_block(with(stops, {"ELSE", "END-IF"}));
    std::vector<StmtId> else_block;
    if (accept_word("ELSE")) else_block = parse_block(with(stops, {"ELSE", "END-IF"}));
    parents_.pop_back();
    accept_word("END-IF");
    S(id).then_block = std::move(then_block);
    S(id).else_block = std::move(else_block);
    return id;
  }

  StmtId parse_evaluate(const StopSet &stops) {
    const StmtId id = begin(StmtKind::evaluate_when);
    next();
    std::optional<Operand> subject;
    if (!accept_word("TRUE")) subject = parse_expression();
    if (at_word("ALSO")) fail("EVALUATE ... ALSO is not supported");
    S(id).subject = subject;
    parents_.push_back(id);
    std::vector<WhenArm> arms;
    if (!at_word("WHEN")) fail("EVALUATE needs at least one WHEN");
    while (at_word("WHEN")) {
      WhenArm arm;
      arm.line = line();
      while (accept_word("WHEN")) {
        if (accept_word("OTHER")) {
          arm.other = true;
          break;
        }
        WhenChoice choice;
        if (accept_word("ANY")) {
          choice.kind = WhenChoice::Kind::any;
        } else if (!subject) {
          choice.kind = WhenChoice::Kind::condition;
          choice.condition = parse_full_condition();
        } else {
          if (at_word("NOT")) fail("WHEN NOT is not supported");
          choice.value = parse_expression();
          if (accept_word("THRU") || accept_word("THROUGH")) {
            choice.kind = WhenChoice::Kind::range;
            choice.thru = parse_expression();
          }
        }
        arm.choices.push_back(std::move(choice));
      }
      arm.body = parse_block(with(stops, {"WHEN", "END-EVALUATE"}));
      const bool other = arm.other;
      arms.push_back(std::move(arm));
      if (other && at_word("WHEN")) fail("WHEN OTHER must be the last WHEN phrase");
    }
    parents_.pop_back();
    accept_word("END-EVALUATE");
    S(id).arms = std::move(arms);
    return id;
  }

  void parse_loop_phrase(PerformSpec &spec) {
    if (accept_word("WITH")) {
      expect_word("TEST");
      if (accept_word("AFTER"))
        spec.test_after = true;
      else
        expect_word("BEFORE");
    } else if (at_word("TEST")) {
      next();
      if (accept_word("AFTER"))
        spec.test_after = true;
      else
        expect_word("BEFORE");
    }
    if (accept_word("UNTIL")) {
      spec.loop = PerformSpec::Loop::until;
      spec.until = parse_full_condition();
    } else if (accept_word("VARYING")) {
      spec.loop = PerformSpec::Loop::varying;
      spec.varying = parse_identifier();
      expect_word("FROM");
      spec.from = parse_value();
      expect_word("BY");
      spec.by = parse_value();
      expect_word("UNTIL");
      spec.until = parse_full_condition();
      if (at_word("AFTER")) fail("PERFORM VARYING ... AFTER is not supported");
    } else if (at_value() && at_word("TIMES", 1)) {
      spec.loop = PerformSpec::Loop::times;
      spec.times = parse_value();
      expect_word("TIMES");
    } else if (spec.test_after) {
      fail("expected UNTIL after WITH TEST");
    }
  }

  StmtId parse_perform(const StopSet &stops) {
    const StmtId id = begin(StmtKind::perform);
    next();
    PerformSpec spec;
    const bool inline_form = at_word("UNTIL") || at_word("VARYING") || at_word("WITH") || at_word("TEST") ||
                             (at_value() && at_word("TIMES", 1)) || (at(Kind::word) && kVerbs.contains(peek().text));
    if (!inline_form) {
      if (!at(Kind::word)) fail("expected a paragraph name after PERFORM");
      spec.target = next().text;
      S(id).call_target = spec.target;
      if (accept_word("THRU") || accept_word("THROUGH")) {
        if (!at(Kind::word)) fail("expected a paragraph name after THRU");
        spec.thru = next().text;
      }
      parse_loop_phrase(spec);
      S(id).perform = std::move(spec);
      return id;
    }
    parse_loop_phrase(spec);
    S(id).perform = std::move(spec);
    parents_.push_back(id);
    auto body = parse_block(with(stops, {"END-PERFORM"}));
    parents_.pop_back();
    expect_word("END-PERFORM");
    S(id).body = std::move(body);
    return id;
  }

  StmtId parse_goto() {
    const StmtId id = begin(StmtKind::goto_);
    next();
    accept_word("TO");
    if (!at(Kind::word) || kKeywords.contains(peek().text)) fail("expected a paragraph name after GO TO");
    S(id).call_target = next().text;
    if (at_word("DEPENDING")) fail("GO TO ... DEPENDING is not supported");
    return id;
  }

  StmtId parse_call() {
    const StmtId id = begin(StmtKind::call);
    next();
    if (at(Kind::string)) {
      S(id).call_target = upper(next().text);
    } else {
      auto target = parse_identifier();
      S(id).call_target = unit_.item(target.item).name;
      S(id).dynamic_call = true;
      S(id).sources.push_back(std::move(target));
    }
    if (accept_word("USING")) {
      for (;;) {
        if (accept_word("BY")) {
          if (!accept_word("REFERENCE") && !accept_word("CONTENT") && !accept_word("VALUE"))
            fail("expected REFERENCE, CONTENT or VALUE");
          continue;
        }
        if (!is_identifier_start()) break;
        auto arg = parse_identifier();
        S(id).call_arguments.push_back(arg.item);
        S(id).targets.push_back(std::move(arg));
        if (at(Kind::comma)) next();
      }
      if (S(id).call_arguments.empty()) fail("CALL ... USING needs arguments");
    }
    if (at_word("ON") || at_word("EXCEPTION") || at_word("OVERFLOW")) fail("CALL exception phrases are not supported");
    accept_word("END-CALL");
    return id;
  }

  StmtId parse_exec() {
    if (at_word("CICS", 1)) return parse_cics();
    if (at_word("SQL", 1)) return parse_sql();
    fail("expected CICS or SQL after EXEC");
  }

  struct CicsOption {
    std::string name;
    std::optional<Operand> value;
    std::optional<std::string> literal;
  };

  StmtId parse_cics() {
    const StmtId id = begin(StmtKind::other);
    next();
    next();
    const std::size_t text_start = pos_;
    if (!at(Kind::word)) fail("expected a CICS command");
    const std::string command = next().text;
    if (command == "XCTL") fail("EXEC CICS XCTL is not supported");
    std::vector<CicsOption> options;
    while (!at_word("END-EXEC")) {
      if (at(Kind::eof) || at(Kind::period)) fail("unterminated EXEC CICS");
      if (!at(Kind::word)) fail("unexpected '" + describe(peek()) + "' in EXEC CICS");
      CicsOption opt;
      opt.name = next().text;
      if (at(Kind::lparen)) {
        next();
        if (at(Kind::string)) {
          opt.literal = next().text;
        } else if (at(Kind::number)) {
          opt.literal = next().text;
        } else if ((at_word("LENGTH") || at_word("ADDRESS")) && at_word("OF", 1)) {
          next();
          next();
          opt.value = parse_identifier();
        } else {
          opt.value = parse_identifier();
        }
        expect(Kind::rparen, "')'");
      }
      options.push_back(std::move(opt));
    }
    const std::size_t text_end = pos_;
    next(); // END-EXEC

    CicsSpec spec;
    spec.command = command;
    spec.text = join_spelling(toks_, text_start, text_end);
    auto find = [&](std::string_view name) -> const CicsOption * {
      for (const auto &o : options)
        if (o.name == name) return &o;
      return nullptr;
    };
    auto &st = S(id);
    for (const auto &o : options) {
      if (!o.value) continue;
      if (o.name == "RESP" || o.name == "RESP2") st.targets.push_back(*o.value);
    }
    const auto *map = find("MAP");
    if (command == "RECEIVE" && map) {
      st.kind = StmtKind::cics_receive_map;
      spec.map = map->literal ? upper(*map->literal) : map->value ? unit_.item(map->value->item).name : "";
      if (const auto *into = find("INTO"); into && into->value) spec.data_area = into->value;
    } else if (command == "SEND" && map) {
      st.kind = StmtKind::cics_send_map;
      spec.map = map->literal ? upper(*map->literal) : map->value ? unit_.item(map->value->item).name : "";
      if (const auto *from = find("FROM"); from && from->value) spec.data_area = from->value;
    } else if (command == "LINK") {
      st.kind = StmtKind::cics_link;
      const auto *program = find("PROGRAM");
      if (!program) fail("EXEC CICS LINK needs PROGRAM");
      if (program->literal) {
        spec.program = upper(*program->literal);
        st.call_target = spec.program;
      } else if (program->value) {
        st.call_target = unit_.item(program->value->item).name;
        st.dynamic_call = true;
        st.sources.push_back(*program->value);
      }
      if (const auto *ca = find("COMMAREA"); ca && ca->value) {
        spec.data_area = ca->value;
        st.call_arguments.push_back(ca->value->item);
      }
    } else if (command == "RETURN") {
      st.kind = StmtKind::cics_return;
      st.terminates = true;
      if (const auto *ca = find("COMMAREA"); ca && ca->value) spec.data_area = ca->value;
    } else {
      for (const auto &o : options) {
        if (!o.value) continue;
        if (o.name == "INTO" || o.name == "SET")
          st.targets.push_back(*o.value);
        else if (o.name != "RESP" && o.name != "RESP2")
          st.sources.push_back(*o.value);
      }
    }
    if (const auto *ms = find("MAPSET"); ms && ms->literal) spec.mapset = upper(*ms->literal);
    if (map) spec.map = spec.map ? spec.map : std::optional<std::string>{};
    st.cics = std::move(spec);
    return id;
  }

  Operand parse_host_variable() {
    // ':' already consumed.
    if (!at(Kind::word)) fail("expected a host variable after ':'");
    const Token first = next();
    std::vector<std::string> qualifiers;
    std::string name = first.text;
    if (at(Kind::dot) && at(Kind::word, 1)) {
      next();
      qualifiers.push_back(name);
      name = next().text;
    }
    Operand op;
    op.kind = Operand::Kind::item;
    op.item = resolve(name, qualifiers, first.line);
    op.spelling = qualifiers.empty() ? name : qualifiers.front() + "." + name;
    return op;
  }

  StmtId parse_sql() {
    const StmtId id = begin(StmtKind::other);
    next();
    next();
    const std::size_t text_start = pos_;
    SqlSpec spec;
    if (!at(Kind::word)) fail("expected an SQL statement");
    spec.verb = peek().text;
    if (spec.verb == "INCLUDE") fail("EXEC SQL INCLUDE belongs in the DATA DIVISION");

    enum class Clause { head, select_list, into, from, rest };
    Clause clause = Clause::head;
    std::string column;
    int depth = 0;
    auto flush_column = [&] {
      if (!column.empty()) spec.columns.push_back(column);
      column.clear();
    };
    bool table_expected = false;
    while (!at_word("END-EXEC")) {
      if (at(Kind::eof) || at(Kind::period)) fail("unterminated EXEC SQL");
      const Token &t = peek();
      if (t.kind == Kind::colon) {
        next();
        auto hv = parse_host_variable();
        const bool indicator = clause == Clause::into && at(Kind::colon);
        if (clause == Clause::into)
          spec.into.push_back(std::move(hv));
        else
          spec.inputs.push_back(std::move(hv));
        if (indicator) {
          next();
          spec.indicators.push_back(parse_host_variable());
        }
        continue;
      }
      if (t.is_word("INDICATOR") && at(Kind::colon, 1)) {
        next();
        next();
        auto ind = parse_host_variable();
        if (clause == Clause::into)
          spec.indicators.push_back(std::move(ind));
        else
          spec.inputs.push_back(std::move(ind));
        continue;
      }
      if (depth == 0 && t.kind == Kind::word) {
        if (clause == Clause::head && t.text == "SELECT" && spec.verb == "SELECT") {
          clause = Clause::select_list;
          next();
          accept_word("DISTINCT");
          continue;
        }
        if (t.text == "INTO" && (clause == Clause::select_list || spec.verb == "FETCH")) {
          flush_column();
          clause = Clause::into;
          next();
          continue;
        }
        if (t.text == "FROM" && (clause == Clause::into || clause == Clause::select_list ||
                                 (spec.verb == "DELETE" && clause == Clause::head))) {
          flush_column();
          clause = Clause::from;
          table_expected = true;
          next();
          continue;
        }
        if (clause == Clause::from &&
            (t.text == "WHERE" || t.text == "GROUP" || t.text == "ORDER" || t.text == "HAVING" ||
             t.text == "FETCH" || t.text == "FOR" || t.text == "WITH" || t.text == "UNION")) {
          clause = Clause::rest;
          next();
          continue;
        }
        if (clause == Clause::head && ((spec.verb == "INSERT" && t.text == "INTO") || (spec.verb == "UPDATE" && t.text == "UPDATE"))) {
          next();
          if (at(Kind::word)) spec.tables.push_back(next().text);
          if (spec.verb == "INSERT" && at(Kind::lparen)) {
            next();
            while (!at(Kind::rparen) && !at_word("END-EXEC")) {
              if (at(Kind::word)) spec.columns.push_back(peek().text);
              next();
            }
            if (at(Kind::rparen)) next();
          }
          clause = Clause::rest;
          continue;
        }
      }
      if (clause == Clause::select_list) {
        if (t.kind == Kind::lparen) ++depth;
        if (t.kind == Kind::rparen) --depth;
        if (t.kind == Kind::comma && depth == 0) {
          flush_column();
        } else {
          const bool glue = column.empty() || t.kind == Kind::dot || t.kind == Kind::rparen ||
                            t.kind == Kind::lparen || column.back() == '.' || column.back() == '(';
          if (!glue) column.push_back(' ');
          column += spell_token(t);
        }
        next();
        continue;
      }
      if (clause == Clause::from) {
        if (t.kind == Kind::comma) {
          table_expected = true;
        } else if (table_expected && t.kind == Kind::word) {
          spec.tables.push_back(t.text);
          table_expected = false;
        }
        next();
        continue;
      }
      next();
    }
    flush_column();
    const std::size_t text_end = pos_;
    next(); // END-EXEC
    spec.text = join_spelling(toks_, text_start, text_end);

    auto &st = S(id);
    if (spec.verb == "SELECT" || spec.verb == "FETCH")
      st.kind = StmtKind::sql_select;
    else if (spec.verb == "INSERT")
      st.kind = StmtKind::sql_insert;
    else if (spec.verb == "UPDATE")
      st.kind = StmtKind::sql_update;
    else if (spec.verb == "DELETE")
      st.kind = StmtKind::sql_delete;
    else
      st.kind = StmtKind::other;
    st.sql = std::move(spec);
    return id;
  }

  StmtId parse_read() {
    const StmtId id = begin(StmtKind::file_read);
    next();
    if (!at(Kind::word)) fail("expected a file name after READ");
    S(id).file = next().text;
    accept_word("NEXT");
    accept_word("RECORD");
    if (accept_word("INTO")) S(id).targets.push_back(parse_identifier());
    if (accept_word("KEY")) {
      accept_word("IS");
      S(id).sources.push_back(parse_identifier());
    }
    if (at_word("AT") || at_word("END") || at_word("INVALID") || at_word("NOT"))
      fail("READ exception phrases are not supported");
    accept_word("END-READ");
    return id;
  }

  StmtId parse_write() {
    const StmtId id = begin(StmtKind::file_write);
    const std::string verb = next().text;
    auto record = parse_identifier();
    S(id).file = record.spelling;
    S(id).sources.push_back(std::move(record));
    if (accept_word("FROM")) S(id).sources.push_back(parse_identifier());
    if (at_word("INVALID") || at_word("NOT")) fail(verb + " exception phrases are not supported");
    accept_word("END-" + verb);
    return id;
  }

  StmtId parse_display() {
    const StmtId id = begin(StmtKind::display);
    next();
    while (at_value()) {
      S(id).sources.push_back(parse_value());
      if (at(Kind::comma)) next();
    }
    if (accept_word("UPON")) S(id).detail = next().text;
    if (accept_word("WITH")) {
      expect_word("NO");
      expect_word("ADVANCING");
    } else if (at_word("NO") && at_word("ADVANCING", 1)) {
      next();
      next();
    }
    return id;
  }

  StmtId parse_accept() {
    const StmtId id = begin(StmtKind::accept);
    next();
    S(id).targets.push_back(parse_identifier());
    if (accept_word("FROM")) S(id).detail = next().text;
    return id;
  }

  StmtId parse_initialize() {
    const StmtId id = begin(StmtKind::initialize);
    next();
    S(id).targets = parse_identifiers();
    if (S(id).targets.empty()) fail("INITIALIZE needs an identifier");
    if (at_word("REPLACING")) fail("INITIALIZE REPLACING is not supported");
    return id;
  }

  StmtId parse_set() {
    const StmtId id = begin(StmtKind::other);
    next();
    if (at_word("ADDRESS") && at_word("OF", 1)) {
      next();
      next();
      S(id).detail = "ADDRESS";
      S(id).targets.push_back(parse_identifier());
      expect_word("TO");
      if (!accept_word("NULL")) {
        if (at_word("ADDRESS") && at_word("OF", 1)) {
          next();
          next();
        }
        S(id).sources.push_back(parse_identifier());
      }
      return id;
    }
    S(id).targets = parse_identifiers();
    if (S(id).targets.empty()) fail("SET needs an identifier");
    if (accept_word("TO")) {
      S(id).detail = "TO";
      if (accept_word("TRUE")) {
        for (const auto &t : S(id).targets)
          if (!unit_.item(t.item).is_condition()) fail("SET ... TO TRUE needs a condition name");
        S(id).detail = "TRUE";
      } else {
        S(id).sources.push_back(parse_value());
      }
    } else if (at_word("UP") || at_word("DOWN")) {
      S(id).detail = next().text;
      expect_word("BY");
      auto targets = S(id).targets;
      S(id).sources = targets;
      S(id).sources.push_back(parse_value());
    } else {
      fail("expected TO, UP BY or DOWN BY in SET");
    }
    return id;
  }

  StmtId parse_simple(const std::string &verb) {
    StmtKind kind = StmtKind::other;
    if (verb == "GOBACK")
      kind = StmtKind::goback;
    else if (verb == "STOP")
      kind = StmtKind::stop_run;
    else if (verb == "EXIT")
      kind = StmtKind::exit;
    const StmtId id = begin(kind);
    next();
    auto &st = S(id);
    if (verb == "GOBACK") {
      st.terminates = true;
    } else if (verb == "STOP") {
      expect_word("RUN");
      S(id).terminates = true;
    } else if (verb == "EXIT") {
      if (accept_word("PROGRAM")) {
        S(id).detail = "PROGRAM";
        S(id).terminates = true;
      } else if (accept_word("PARAGRAPH")) {
        S(id).detail = "PARAGRAPH";
      }
    }
    return id;
  }

  std::vector<Token> toks_;
  std::span<const ScreenMap> maps_;
  std::size_t pos_ = 0;
  SourceUnit unit_;
  Section section_ = Section::working_storage;
  std::vector<std::pair<int, ItemId>> stack_;
  std::vector<PendingRedefines> pending_redefines_;
  std::vector<StmtId> parents_;
  std::optional<std::pair<Operand, RelOp>> last_compare_;
};

} // namespace

SourceUnit parse_source(std::string_view text, const CopybookResolver &copybooks, std::span<const ScreenMap> maps) {
  auto expanded = tokenize_with_copybooks(text, copybooks);
  SourceUnit unit = Parser(std::move(expanded.tokens), maps).run();
  unit.copybooks_used = std::move(expanded.copybooks_used);
  std::istringstream in{std::string(text)};
  std::string raw;
  int n = 0;
  while (std::getline(in, raw)) unit.source_lines.push_back({++n, raw});
  return unit;
}

SourceUnit parse_copybook(std::string_view copybook_text) {
  auto tokens = tokenize(copybook_text);
  std::string body(copybook_text);
  const auto first = std::find_if(tokens.begin(), tokens.end(), [](const Token &t) { return t.kind == Token::Kind::number; });
  if (first != tokens.end() && first->text != "01" && first->text != "1" && first->text != "77")
    body = "01 COPYBOOK-ROOT.\n" + body;
  const std::string program = "IDENTIFICATION DIVISION.\nPROGRAM-ID. COPYBOOK.\nDATA DIVISION.\n"
                              "LINKAGE SECTION.\nCOPY SLICE.\nPROCEDURE DIVISION.\nMAIN.\n    GOBACK.\n";
  return parse_source(program, [&](const std::string &) { return std::optional<std::string>(body); });
}

} // namespace apify
