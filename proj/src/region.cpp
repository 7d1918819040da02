#include "apify/region.hpp"

#include "apify/errors.hpp"

namespace apify {

CodeRegion make_region(const SourceUnit &unit, int start_line, int end_line) {
  if (start_line > end_line)
    throw InvalidRegion("region " + unit.program_id + ":" + std::to_string(start_line) + "-" +
                        std::to_string(end_line) + " has p > q");
  CodeRegion r{unit.program_id, start_line, end_line, {}};
  for (const auto &st : unit.statements)
    if (st.line >= start_line && st.line <= end_line) r.statements.push_back(st.id);
  if (r.statements.empty())
    throw InvalidRegion("region " + unit.program_id + ":" + std::to_string(start_line) + "-" +
                        std::to_string(end_line) + " contains no statements");
  return r;
}

CodeRegion whole_program_region(const SourceUnit &unit) {
  if (unit.statements.empty()) throw InvalidRegion("program " + unit.program_id + " has no statements");
  int first = unit.statements.front().line;
  int last = first;
  for (const auto &st : unit.statements) {
    first = std::min(first, st.line);
    last = std::max(last, st.end_line);
  }
  return make_region(unit, first, last);
}

RegionScope::RegionScope(const Cfg &cfg, const CodeRegion &region) : cfg_(&cfg) {
  const auto &unit = cfg.unit();
  const auto n = unit.statements.size();
  member_.assign(n, false);
  std::vector<StmtId> todo(region.statements.begin(), region.statements.end());
  std::vector<bool> para_done(unit.paragraphs.size(), false);
  while (!todo.empty()) {
    const auto s = todo.back();
    todo.pop_back();
    if (member_[index(s)]) continue;
    member_[index(s)] = true;
    const auto &st = unit.stmt(s);
    if (st.kind != StmtKind::perform || !st.perform->target) continue;
    const auto first = *unit.find_paragraph(*st.perform->target);
    const auto last = st.perform->thru ? *unit.find_paragraph(*st.perform->thru) : first;
    for (auto p = first; p <= last; ++p) {
      if (para_done[p]) continue;
      para_done[p] = true;
      for (auto top : unit.paragraphs[p].statements) {
        todo.push_back(top);
        for (auto inner : unit.nested(top)) todo.push_back(inner);
      }
    }
  }
  succ_.resize(n);
  leaves_.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (!member_[i]) continue;
    statements_.push_back(StmtId(i));
    const auto &all = cfg.successors(StmtId(i));
    if (cfg.may_end(StmtId(i))) leaves_[i] = true;
    for (auto s : all) {
      if (member_[index(s)])
        succ_[i].push_back(s);
      else
        leaves_[i] = true;
    }
  }
  entry_ = region.statements.front();

  std::vector<bool> visited(n, false);
  std::vector<std::pair<StmtId, std::size_t>> stack{{entry_, 0}};
  visited[index(entry_)] = true;
  while (!stack.empty()) {
    auto &[node, next] = stack.back();
    const auto &succ = succ_[index(node)];
    if (next < succ.size()) {
      const auto s = succ[next++];
      if (!visited[index(s)]) {
        visited[index(s)] = true;
        stack.emplace_back(s, 0);
      }
      continue;
    }
    post_order_.push_back(node);
    stack.pop_back();
  }
}

} // namespace apify
