#pragma once

#include "apify/source_unit.hpp"

#include <map>
#include <string>
#include <vector>

namespace apify {

struct CallEdge {
  std::string caller;
  StmtId call_site{};
  std::string callee;

  bool operator==(const CallEdge &) const = default;
};

struct UnresolvedCall {
  std::string caller;
  StmtId call_site{};
  /// Literal target absent from the workspace, or the identifier of a dynamic CALL.
  std::string target;
  bool dynamic = false;
};

struct CallGraph {
  std::vector<std::string> nodes;
  std::vector<CallEdge> edges;
  /// Non-trivial strongly connected components (more than one node, or a
  /// self-loop); members sorted, components sorted.
  std::vector<std::vector<std::string>> cycles;
  std::vector<UnresolvedCall> unresolved;

  std::vector<std::string> callees(const std::string &caller) const;
  /// Strongly connected components in reverse topological order (callees
  /// before callers), including trivial ones.
  std::vector<std::vector<std::string>> components() const;
};

/// `units` maps program id to parsed unit.
CallGraph build_call_graph(const std::map<std::string, SourceUnit> &units);

std::string to_dot(const CallGraph &graph);

} // namespace apify
