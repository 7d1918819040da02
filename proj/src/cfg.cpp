#include "apify/cfg.hpp"

#include "apify/errors.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <variant>

namespace apify {
namespace {

struct ParaEntry {
  std::size_t para;
};
struct ParaEnd {
  std::size_t para;
};
using Target = std::variant<StmtId, ParaEntry, ParaEnd>;

bool is_loop(const PerformSpec &p) { return p.loop != PerformSpec::Loop::once; }

} // namespace

class CfgBuilder {
public:
  explicit CfgBuilder(const SourceUnit &unit) : unit_(unit), cont_(unit.statements.size()) {}

  Cfg run() {
    Cfg cfg;
    cfg.unit_ = &unit_;
    const auto n = unit_.statements.size();
    cfg.succ_.resize(n);
    cfg.pred_.resize(n);
    cfg.reachable_.assign(n, false);
    cfg.ends_.assign(n, false);
    for (std::size_t p = 0; p < unit_.paragraphs.size(); ++p)
      link_block(unit_.paragraphs[p].statements, ParaEnd{p});
    collect_perform_ranges();

    cfg.branches_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::set<StmtId> out;
      falls_off_ = false;
      for (const auto &[branch, target] : successor_targets(StmtId(i))) {
        std::set<StmtId> resolved;
        resolve(target, resolved);
        Branch b = branch;
        b.targets.assign(resolved.begin(), resolved.end());
        cfg.branches_[i].push_back(std::move(b));
        out.insert(resolved.begin(), resolved.end());
      }
      cfg.succ_[i].assign(out.begin(), out.end());
      cfg.ends_[i] = out.empty() || falls_off_;
      for (auto s : out) cfg.pred_[index(s)].push_back(StmtId(i));
    }
    if (!unit_.paragraphs.empty()) {
      std::set<StmtId> first;
      resolve(ParaEntry{0}, first);
      if (!first.empty()) cfg.entry_ = *first.begin();
    }
    if (cfg.entry_) {
      std::vector<StmtId> todo{*cfg.entry_};
      cfg.reachable_[index(*cfg.entry_)] = true;
      while (!todo.empty()) {
        const auto cur = todo.back();
        todo.pop_back();
        for (auto s : cfg.succ_[index(cur)])
          if (!cfg.reachable_[index(s)]) {
            cfg.reachable_[index(s)] = true;
            todo.push_back(s);
          }
      }
    }
    return cfg;
  }

private:
  // Records, for every statement, where control goes after it completes.
  void link_block(const std::vector<StmtId> &block, Target after) {
    for (std::size_t i = 0; i < block.size(); ++i) {
      const Target next = i + 1 < block.size() ? Target{block[i + 1]} : after;
      cont_[index(block[i])] = next;
      const auto &st = unit_.stmt(block[i]);
      link_block(st.then_block, next);
      link_block(st.else_block, next);
      for (const auto &arm : st.arms) link_block(arm.body, next);
      if (!st.body.empty()) link_block(st.body, st.perform && is_loop(*st.perform) ? Target{st.id} : next);
    }
  }

  std::size_t paragraph_index(const std::string &name, int line) const {
    auto p = unit_.find_paragraph(name);
    if (!p) throw UnknownParagraph(name, line);
    return *p;
  }

  void collect_perform_ranges() {
    for (const auto &st : unit_.statements) {
      if (st.kind == StmtKind::goto_) paragraph_index(*st.call_target, st.line);
      if (st.kind != StmtKind::perform || !st.perform->target) continue;
      const auto first = paragraph_index(*st.perform->target, st.line);
      const auto last = st.perform->thru ? paragraph_index(*st.perform->thru, st.line) : first;
      if (last < first)
        throw SyntaxError(st.line, "PERFORM THRU range " + *st.perform->target + " .. " + *st.perform->thru +
                                       " runs backwards");
      // A looping PERFORM re-tests its condition after each pass.
      const Target back = is_loop(*st.perform) ? Target{st.id} : cont_[index(st.id)];
      returns_.emplace_back(last, back);
    }
  }

  std::vector<std::pair<Branch, Target>> successor_targets(StmtId id) const {
    using K = Branch::Kind;
    const auto &st = unit_.stmt(id);
    const Target next = cont_[index(id)];
    if (st.terminates) return {};
    auto first_or = [](const std::vector<StmtId> &block, Target fallback) {
      return block.empty() ? fallback : Target{block.front()};
    };
    switch (st.kind) {
    case StmtKind::if_:
      return {{Branch{K::if_true, 0, {}}, first_or(st.then_block, next)},
              {Branch{K::if_false, 0, {}}, first_or(st.else_block, next)}};
    case StmtKind::evaluate_when: {
      std::vector<std::pair<Branch, Target>> out;
      bool has_other = false;
      for (std::size_t a = 0; a < st.arms.size(); ++a) {
        out.push_back({Branch{K::arm, a, {}}, first_or(st.arms[a].body, next)});
        has_other = has_other || st.arms[a].other;
      }
      if (!has_other) out.push_back({Branch{K::no_match, 0, {}}, next});
      return out;
    }
    case StmtKind::perform: {
      const auto &p = *st.perform;
      const Target body = p.target ? Target{ParaEntry{*unit_.find_paragraph(*p.target)}}
                                   : first_or(st.body, is_loop(p) ? Target{id} : next);
      if (!is_loop(p)) return {{Branch{K::always, 0, {}}, body}};
      return {{Branch{K::loop_body, 0, {}}, body}, {Branch{K::loop_exit, 0, {}}, next}};
    }
    case StmtKind::goto_:
      return {{Branch{K::always, 0, {}}, ParaEntry{*unit_.find_paragraph(*st.call_target)}}};
    default:
      return {{Branch{K::always, 0, {}}, next}};
    }
  }

  void resolve(const Target &t, std::set<StmtId> &out) {
    std::set<std::pair<int, std::size_t>> seen;
    resolve(t, out, seen);
  }

  void resolve(const Target &t, std::set<StmtId> &out, std::set<std::pair<int, std::size_t>> &seen) {
    if (const auto *s = std::get_if<StmtId>(&t)) {
      out.insert(*s);
      return;
    }
    if (const auto *e = std::get_if<ParaEntry>(&t)) {
      if (!seen.insert({0, e->para}).second) return;
      const auto &stmts = unit_.paragraphs[e->para].statements;
      if (!stmts.empty())
        out.insert(stmts.front());
      else
        resolve(ParaEnd{e->para}, out, seen);
      return;
    }
    const auto p = std::get<ParaEnd>(t).para;
    if (!seen.insert({1, p}).second) return;
    if (p + 1 < unit_.paragraphs.size())
      resolve(ParaEntry{p + 1}, out, seen);
    else
      falls_off_ = true;
    for (const auto &[last, back] : returns_)
      if (last == p) resolve(back, out, seen);
  }

  const SourceUnit &unit_;
  std::vector<Target> cont_;
  std::vector<std::pair<std::size_t, Target>> returns_;
  bool falls_off_ = false;
};

std::vector<StmtId> Cfg::exits() const {
  std::vector<StmtId> out;
  for (std::size_t i = 0; i < succ_.size(); ++i)
    if (succ_[i].empty()) out.push_back(StmtId(i));
  return out;
}

std::size_t Cfg::edge_count() const {
  std::size_t n = 0;
  for (const auto &s : succ_) n += s.size();
  return n;
}

Cfg build_cfg(const SourceUnit &unit) { return CfgBuilder(unit).run(); }

std::vector<StmtId> post_order(const Cfg &cfg) {
  std::vector<StmtId> order;
  if (!cfg.entry()) return order;
  std::vector<bool> visited(cfg.node_count(), false);
  std::vector<std::pair<StmtId, std::size_t>> stack{{*cfg.entry(), 0}};
  visited[index(*cfg.entry())] = true;
  while (!stack.empty()) {
    auto &[node, next] = stack.back();
    const auto &succ = cfg.successors(node);
    if (next < succ.size()) {
      const auto s = succ[next++];
      if (!visited[index(s)]) {
        visited[index(s)] = true;
        stack.emplace_back(s, 0);
      }
      continue;
    }
    order.push_back(node);
    stack.pop_back();
  }
  return order;
}

std::string to_dot(const Cfg &cfg) {
  std::ostringstream out;
  out << "digraph \"" << cfg.unit().program_id << "\" {\n";
  for (std::size_t i = 0; i < cfg.node_count(); ++i) {
    const auto &st = cfg.unit().statements[i];
    out << "  n" << i << " [label=\"" << st.line << ": " << st.verb << "\"";
    if (!cfg.reachable(StmtId(i))) out << " style=dashed";
    out << "];\n";
  }
  for (std::size_t i = 0; i < cfg.node_count(); ++i)
    for (auto s : cfg.successors(StmtId(i))) out << "  n" << i << " -> n" << index(s) << ";\n";
  out << "}\n";
  return out.str();
}

} // namespace apify
