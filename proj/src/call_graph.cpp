#include "apify/call_graph.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace apify {

CallGraph build_call_graph(const std::map<std::string, SourceUnit> &units) {
  CallGraph g;
  for (const auto &[id, unit] : units) {
    g.nodes.push_back(id);
    for (const auto &st : unit.statements) {
      if (st.kind != StmtKind::call && st.kind != StmtKind::cics_link) continue;
      if (!st.call_target) continue;
      if (st.dynamic_call || !units.contains(*st.call_target)) {
        g.unresolved.push_back({id, st.id, *st.call_target, st.dynamic_call});
        continue;
      }
      g.edges.push_back({id, st.id, *st.call_target});
    }
  }
  for (const auto &comp : g.components()) {
    const bool self_loop = comp.size() == 1 && std::any_of(g.edges.begin(), g.edges.end(), [&](const CallEdge &e) {
                             return e.caller == comp[0] && e.callee == comp[0];
                           });
    if (comp.size() > 1 || self_loop) g.cycles.push_back(comp);
  }
  std::sort(g.cycles.begin(), g.cycles.end());
  return g;
}

std::vector<std::string> CallGraph::callees(const std::string &caller) const {
  std::set<std::string> out;
  for (const auto &e : edges)
    if (e.caller == caller) out.insert(e.callee);
  return {out.begin(), out.end()};
}

std::vector<std::vector<std::string>> CallGraph::components() const {
  // Tarjan; emits each component once all of its callees' components are out.
  std::map<std::string, int> idx, low;
  std::set<std::string> on_stack;
  std::vector<std::string> stack;
  std::vector<std::vector<std::string>> out;
  int counter = 0;
  std::function<void(const std::string &)> visit = [&](const std::string &v) {
    idx[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    for (const auto &w : callees(v)) {
      if (!idx.contains(w)) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack.contains(w)) {
        low[v] = std::min(low[v], idx[w]);
      }
    }
    if (low[v] != idx[v]) return;
    std::vector<std::string> comp;
    for (;;) {
      auto w = stack.back();
      stack.pop_back();
      on_stack.erase(w);
      comp.push_back(w);
      if (w == v) break;
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  };
  for (const auto &n : nodes)
    if (!idx.contains(n)) visit(n);
  return out;
}

std::string to_dot(const CallGraph &graph) {
  std::ostringstream out;
  out << "digraph calls {\n";
  for (const auto &n : graph.nodes) out << "  \"" << n << "\";\n";
  for (const auto &e : graph.edges) out << "  \"" << e.caller << "\" -> \"" << e.callee << "\";\n";
  for (const auto &u : graph.unresolved)
    out << "  \"" << u.caller << "\" -> \"?" << u.target << "\" [style=dashed];\n";
  out << "}\n";
  return out.str();
}

} // namespace apify
