#pragma once

#include "apify/item_set.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace apify {

enum class Section { working_storage, linkage };
enum class Usage { display, binary, packed };

std::string_view to_string(Section s);

/// A literal as written in source. Figurative constants keep their own kind so
/// the constant evaluator can compare them against either class of item.
struct Literal {
  enum class Kind { numeric, alphanumeric, space, zero, low_value, high_value };
  Kind kind = Kind::alphanumeric;
  std::string text;

  bool operator==(const Literal &) const = default;
};

/// Source spelling of a literal (quoted for alphanumerics).
std::string spell(const Literal &lit);

/// `VALUE a [THRU b]` of a level-88 condition name.
struct ConditionValue {
  Literal low;
  std::optional<Literal> high;
};

struct DataItem {
  std::string name;
  int level = 1;
  std::optional<std::string> picture;
  Section section = Section::working_storage;
  std::optional<ItemId> parent;
  /// Subordinate data items; level-88 condition names are kept in `conditions`.
  std::vector<ItemId> children;
  std::vector<ItemId> conditions;
  std::optional<int> occurs;
  std::optional<ItemId> redefines;
  std::size_t byte_offset = 0;
  std::size_t byte_size = 1;
  Usage usage = Usage::display;
  std::optional<Literal> value;
  std::vector<ConditionValue> condition_values;
  /// Copybook the entry was expanded from, if any.
  std::optional<std::string> copybook;
  int line = 0;
  /// The 01/77 record whose storage this item occupies (REDEFINES resolved).
  ItemId storage_root{};
  bool filler = false;

  bool is_condition() const { return level == 88; }
  bool is_elementary() const { return picture.has_value(); }
  bool is_group() const { return !picture && !is_condition(); }
};

enum class RelOp { eq, ne, lt, le, gt, ge };

/// An operand as it appears in a statement: a data reference, a literal, or an
/// arithmetic expression. Subscript and expression terms are recorded as plain
/// item ids; read closures are applied later by read_write_sets.
struct Operand {
  enum class Kind { item, literal, expression };
  Kind kind = Kind::literal;
  ItemId item{};
  /// Source spelling of an item reference including OF/IN qualifiers and
  /// subscripts, or the token spelling of an expression.
  std::string spelling;
  Literal literal;
  std::vector<ItemId> subscript_reads;
  std::vector<ItemId> expression_reads;

  bool is_item() const { return kind == Kind::item; }
};

struct Condition {
  enum class Kind { compare, condition_name, class_test, all_of, any_of, negation };
  Kind kind = Kind::compare;
  RelOp op = RelOp::eq;
  Operand lhs;
  Operand rhs;
  /// Level-88 item for condition_name.
  ItemId condition_item{};
  /// NUMERIC, ALPHABETIC, POSITIVE, NEGATIVE or ZERO for class_test.
  std::string class_name;
  std::vector<Condition> operands;
};

struct WhenChoice {
  enum class Kind { value, range, condition, any };
  Kind kind = Kind::value;
  Operand value;
  Operand thru;
  Condition condition;
};

struct WhenArm {
  int line = 0;
  bool other = false;
  std::vector<WhenChoice> choices;
  std::vector<StmtId> body;
};

struct PerformSpec {
  enum class Loop { once, times, until, varying };
  Loop loop = Loop::once;
  /// Out-of-line target paragraph; absent for inline PERFORM ... END-PERFORM.
  std::optional<std::string> target;
  std::optional<std::string> thru;
  std::optional<Operand> times;
  std::optional<Condition> until;
  bool test_after = false;
  std::optional<Operand> varying;
  std::optional<Operand> from;
  std::optional<Operand> by;
};

struct SqlSpec {
  std::string verb;
  std::vector<std::string> columns;
  std::vector<std::string> tables;
  /// SELECT ... INTO host variables, aligned with `columns` where possible.
  std::vector<Operand> into;
  /// Null-indicator variables of INTO host variables.
  std::vector<Operand> indicators;
  /// Host variables read by WHERE, VALUES and SET clauses.
  std::vector<Operand> inputs;
  /// Token spelling between EXEC SQL and END-EXEC.
  std::string text;
};

struct CicsSpec {
  std::string command;
  std::optional<std::string> map;
  std::optional<std::string> mapset;
  std::optional<std::string> program;
  /// INTO / FROM / COMMAREA operand.
  std::optional<Operand> data_area;
  std::string text;
};

enum class StmtKind {
  move,
  arithmetic,
  if_,
  evaluate_when,
  perform,
  goto_,
  call,
  cics_receive_map,
  cics_send_map,
  cics_link,
  cics_return,
  sql_select,
  sql_insert,
  sql_update,
  sql_delete,
  file_read,
  file_write,
  display,
  accept,
  initialize,
  goback,
  stop_run,
  exit,
  other
};

std::string_view to_string(StmtKind kind);

struct Statement {
  StmtId id{};
  int line = 0;
  /// Last source line covered by the statement including nested blocks.
  int end_line = 0;
  StmtKind kind = StmtKind::other;
  /// Leading verb as written (MOVE, ADD, REWRITE, SET, CONTINUE, ...).
  std::string verb;
  std::size_t paragraph = 0;
  std::optional<StmtId> parent;

  ItemSet reads;
  ItemSet writes;

  /// PERFORM / GO TO paragraph, or CALL / LINK program (identifier name for a
  /// dynamic CALL).
  std::optional<std::string> call_target;
  bool dynamic_call = false;
  std::vector<ItemId> call_arguments;

  std::vector<Operand> sources;
  std::vector<Operand> targets;
  /// GIVING and REMAINDER receivers of ADD/SUBTRACT/MULTIPLY/DIVIDE.
  std::vector<Operand> giving;
  std::optional<Condition> condition;
  /// EVALUATE subject; empty means EVALUATE TRUE.
  std::optional<Operand> subject;
  std::vector<WhenArm> arms;
  std::vector<StmtId> then_block;
  std::vector<StmtId> else_block;
  /// Inline PERFORM body.
  std::vector<StmtId> body;
  std::optional<PerformSpec> perform;
  std::optional<SqlSpec> sql;
  std::optional<CicsSpec> cics;
  /// File name for READ, record name for WRITE/REWRITE.
  std::string file;
  /// Verb-specific keyword: INTO/BY for DIVIDE, TO/UP/DOWN for SET, the
  /// source device for ACCEPT FROM, PROGRAM for EXIT PROGRAM.
  std::string detail;
  /// GOBACK, STOP RUN, EXIT PROGRAM and CICS RETURN end the program.
  bool terminates = false;
};

struct Paragraph {
  std::string name;
  int line = 0;
  int end_line = 0;
  std::vector<StmtId> statements;
};

struct SourceLine {
  int number = 0;
  std::string text;
};

struct SourceUnit {
  std::string program_id;
  std::vector<DataItem> data_items;
  std::vector<Paragraph> paragraphs;
  std::vector<Statement> statements;
  std::vector<ItemId> using_parameters;
  std::vector<std::string> copybooks_used;
  std::vector<SourceLine> source_lines;
  int procedure_line = 0;

  const DataItem &item(ItemId id) const { return data_items.at(index(id)); }
  const Statement &stmt(StmtId id) const { return statements.at(index(id)); }

  std::optional<std::size_t> find_paragraph(std::string_view name) const;
  /// Unqualified lookup; returns nothing when absent or ambiguous.
  std::optional<ItemId> find_item(std::string_view name) const;
  /// Dotted path from the 01/77 level, e.g. DFHCOMMAREA.CA-CUSTOMER-NUM.
  std::string qualified_name(ItemId id) const;
  bool is_ancestor(ItemId ancestor, ItemId item) const;
  /// Items whose storage intersects `a` and `b` share at least one byte.
  bool overlaps(ItemId a, ItemId b) const;
  /// Top-level data items of the linkage section bound by PROCEDURE DIVISION
  /// USING, or DFHCOMMAREA / the sole linkage record when USING is absent.
  std::vector<ItemId> parameters() const;
  /// Every statement id nested under `id` (excluding `id`).
  std::vector<StmtId> nested(StmtId id) const;
  std::size_t item_count() const { return data_items.size(); }
};

} // namespace apify
