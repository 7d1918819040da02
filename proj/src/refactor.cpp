#include "apify/refactor.hpp"

#include "apify/errors.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace apify {

std::string_view to_string(SuggestionKind k) {
  switch (k) {
  case SuggestionKind::guard_terminal_command:
    return "guard_terminal_command";
  case SuggestionKind::remove_sanity_check_candidate:
    return "remove_sanity_check_candidate";
  case SuggestionKind::narrow_sql:
    return "narrow_sql";
  case SuggestionKind::slice_copybook:
    return "slice_copybook";
  case SuggestionKind::caller_mapping:
    return "caller_mapping";
  }
  return "guard_terminal_command";
}

namespace {

bool terminal(const Statement &st) {
  return st.kind == StmtKind::cics_send_map || st.kind == StmtKind::cics_receive_map || st.kind == StmtKind::display ||
         st.kind == StmtKind::accept;
}

std::string command_text(const Statement &st) {
  if (st.cics) return "EXEC CICS " + st.cics->command;
  return st.verb;
}

} // namespace

std::vector<RefactorSuggestion> refactor_report(const SourceUnit &unit, const CodeRegion &region,
                                                const ApiSignature &signature) {
  std::vector<RefactorSuggestion> out;
  ItemSet read_in_region;
  for (auto s : region.statements)
    if (!unit.stmt(s).sql) read_in_region |= unit.stmt(s).reads;
  for (auto s : region.statements) {
    const auto &st = unit.stmt(s);
    if (terminal(st)) {
      RefactorSuggestion r{SuggestionKind::guard_terminal_command, unit.program_id, st.line, nlohmann::ordered_json::object(),
                           "terminal I/O cannot run when the block is invoked as an API; guard it with a "
                           "caller-mode flag or remove it"};
      r.detail["command"] = command_text(st);
      if (st.cics && st.cics->map) r.detail["map"] = *st.cics->map;
      out.push_back(std::move(r));
    }
    if (st.kind == StmtKind::sql_select && st.sql && !st.sql->into.empty()) {
      const auto &sql = *st.sql;
      const bool aligned = sql.columns.size() == sql.into.size();
      auto droppable = nlohmann::ordered_json::array();
      auto keep = nlohmann::ordered_json::array();
      for (std::size_t i = 0; i < sql.into.size(); ++i) {
        const auto &host = sql.into[i];
        if (!host.is_item()) continue;
        nlohmann::ordered_json entry{{"host_variable", unit.qualified_name(host.item)}};
        if (aligned) entry["column"] = sql.columns[i];
        const bool used = signature.response_items.contains(host.item) || read_in_region.contains(host.item);
        (used ? keep : droppable).push_back(std::move(entry));
      }
      if (!droppable.empty()) {
        RefactorSuggestion r{SuggestionKind::narrow_sql, unit.program_id, st.line, nlohmann::ordered_json::object(),
                             "the API neither returns nor reads these host variables, so the query need not fetch them"};
        r.detail["droppable"] = std::move(droppable);
        r.detail["keep"] = std::move(keep);
        r.detail["tables"] = sql.tables;
        out.push_back(std::move(r));
      }
    }
    if (st.kind == StmtKind::if_) {
      const auto inner = unit.nested(s);
      bool only_terminal = !inner.empty();
      bool any_terminal = false;
      for (auto n : inner) {
        const auto &x = unit.stmt(n);
        const bool io = x.kind == StmtKind::display || x.kind == StmtKind::accept;
        any_terminal = any_terminal || io;
        if (!io && x.verb != "CONTINUE") only_terminal = false;
      }
      if (only_terminal && any_terminal) {
        RefactorSuggestion r{SuggestionKind::remove_sanity_check_candidate, unit.program_id, st.line,
                             nlohmann::ordered_json::object(),
                             "candidate only: the branch does nothing but terminal I/O, which suggests an "
                             "interactive sanity check"};
        r.detail["end_line"] = st.end_line;
        r.detail["statements"] = inner.size();
        out.push_back(std::move(r));
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const RefactorSuggestion &a, const RefactorSuggestion &b) {
    return std::pair(a.line, a.kind) < std::pair(b.line, b.kind);
  });
  return out;
}

CopybookSlice slice_copybook(const SourceUnit &unit, const std::vector<FieldRole> &fields, std::string_view role) {
  CopybookSlice out;
  std::set<ItemId> keep;
  for (const auto &f : fields) {
    if (!unit.item(f.item).copybook) {
      out.skipped.push_back(f.qualified_name);
      continue;
    }
    for (std::optional<ItemId> cur = f.item; cur; cur = unit.item(*cur).parent) keep.insert(*cur);
  }
  if (keep.empty()) throw EmptySlice(std::string(role));

  std::ostringstream text;
  for (auto id : keep) {
    const auto &d = unit.item(id);
    std::size_t depth = 0;
    for (auto p = d.parent; p; p = unit.item(*p).parent) ++depth;
    const auto level = depth == 0 ? 1 : static_cast<int>(depth * 5);
    text << std::string(4 * depth, ' ') << (level < 10 ? "0" : "") << level << ' ' << d.name;
    if (d.occurs) text << " OCCURS " << *d.occurs;
    if (d.picture) text << " PIC " << *d.picture;
    if (d.usage == Usage::binary) text << " COMP";
    if (d.usage == Usage::packed) text << " COMP-3";
    text << ".\n";
  }
  out.text = text.str();
  return out;
}

RefactorSuggestion caller_mapping_report(const SourceUnit &caller, const Statement &call_site, const SourceUnit &callee,
                                         const ApiSignature &callee_signature, const std::string &callee_api_name) {
  const auto params = callee.parameters();
  const auto &args = call_site.call_arguments;
  if (args.size() > params.size())
    throw BindingMismatch("argument " + std::to_string(params.size() + 1) + " of the call at line " +
                          std::to_string(call_site.line) + " has no parameter in " + callee.program_id);

  RefactorSuggestion r{SuggestionKind::caller_mapping, caller.program_id, call_site.line, nlohmann::ordered_json::object(),
                       "replace the call with an API invocation; arguments feed the request fields and response "
                       "fields are copied back"};
  bool degraded = args.size() != params.size();
  auto bindings = nlohmann::ordered_json::array();
  auto requests = nlohmann::ordered_json::array();
  auto responses = nlohmann::ordered_json::array();

  auto overlapping = [&](std::size_t i, const FieldRole &f) {
    const auto &p = callee.item(params[i]);
    const auto &x = callee.item(f.item);
    const auto b = bind_range(caller, args[i], callee, params[i], x.byte_offset - p.byte_offset, x.byte_size);
    degraded = degraded || b.mismatch;
    std::vector<std::string> names;
    b.reads.for_each([&](ItemId y) {
      if (caller.item(y).is_elementary()) names.push_back(caller.qualified_name(y));
    });
    return names;
  };
  auto param_of = [&](const FieldRole &f) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < args.size(); ++i)
      if (callee.item(f.item).storage_root == callee.item(params[i]).storage_root) return i;
    return std::nullopt;
  };

  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto &a = caller.item(args[i]);
    const auto &p = callee.item(params[i]);
    degraded = degraded || a.byte_size != p.byte_size;
    bindings.push_back({{"argument", caller.qualified_name(args[i])},
                        {"parameter", callee.qualified_name(params[i])},
                        {"argument_size", a.byte_size},
                        {"parameter_size", p.byte_size}});
  }
  for (const auto &f : callee_signature.requests)
    if (auto i = param_of(f))
      for (const auto &from : overlapping(*i, f)) requests.push_back({{"from", from}, {"to", f.field}});
  for (const auto &f : callee_signature.responses)
    if (auto i = param_of(f))
      for (const auto &to : overlapping(*i, f)) responses.push_back({{"from", f.field}, {"to", to}});

  auto body = nlohmann::ordered_json::array();
  for (const auto &f : callee_signature.requests) body.push_back(f.field);
  auto result = nlohmann::ordered_json::array();
  for (const auto &f : callee_signature.responses) result.push_back(f.field);

  r.detail["callee"] = callee.program_id;
  r.detail["bindings"] = std::move(bindings);
  r.detail["request_mapping"] = std::move(requests);
  r.detail["response_mapping"] = std::move(responses);
  r.detail["degraded"] = degraded;
  r.detail["invocation"] = {{"method", std::string(to_string(callee_signature.method))},
                            {"path", "/apis/" + callee_api_name},
                            {"request_body", std::move(body)},
                            {"response_body", std::move(result)}};
  if (degraded) r.detail["note"] = "argument and parameter sizes differ; only the overlapping prefix is mapped";
  return r;
}

} // namespace apify
