#pragma once

#include "apify/call_graph.hpp"
#include "apify/cfg.hpp"
#include "apify/item_set.hpp"
#include "apify/region.hpp"
#include "apify/source_unit.hpp"
#include "apify/use_def.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace apify {

enum class Flow { fi, fs, ps };
enum class HttpMethod { get, post, put, del };
enum class Role { request, response, both };

std::string_view to_string(Flow f);
std::string_view to_string(HttpMethod m);
std::string_view to_string(Role r);
std::optional<Flow> parse_flow(std::string_view text);

struct Variant {
  Flow flow = Flow::fs;
  bool call_chain = false;
};

struct PathLimits {
  std::size_t max_paths = 4096;
  std::size_t unroll = 3;
  std::size_t max_statements = 200;
};

/// Raw request/response sets of one analysis run plus its iteration counts.
struct SignatureSets {
  ItemSet requests;
  ItemSet responses;
  /// FI: always 1. FS: round-robin passes until nothing changed.
  std::size_t passes = 0;
  std::size_t pass_cap = 0;
  /// PS: paths enumerated.
  std::size_t paths = 0;
};

SignatureSets flow_insensitive(const RegionScope &scope, const UseDefSets &sets);

/// Backward liveness over the scope; successors outside it contribute nothing.
/// Throws NonTerminatingFixpoint past |items| x |statements| + 1 passes.
SignatureSets flow_sensitive(const RegionScope &scope, const UseDefSets &sets);

/// Union over feasible paths from the scope entry. A path ends where control
/// leaves the scope, at a program exit, or where a node would be visited more
/// than `unroll` + 1 times. Throws PathBudgetExceeded.
SignatureSets path_sensitive(const RegionScope &scope, const UseDefSets &sets, const PathLimits &limits = {});

/// Items read after control leaves the scope: live-in at every out-of-scope
/// successor, plus `at_exit` when a scope node ends the program. Liveness is
/// computed over the whole program with `at_exit` live at program exits.
ItemSet post_context_auto(const RegionScope &scope, const UseDefSets &sets, const ItemSet &at_exit);

/// All-paths facts over the scope, by intersection from the entry onwards.
struct Surety {
  ItemSet must_read;
  ItemSet must_write;
  /// Items read / written by some reachable scope node.
  ItemSet read;
  ItemSet written;
};

Surety surety(const RegionScope &scope, const UseDefSets &sets);

/// delete > put > post > get over the given statements.
HttpMethod classify_http_method(const SourceUnit &unit, const std::vector<StmtId> &statements);

struct FieldRole {
  ItemId item{};
  std::string field;
  std::string qualified_name;
  Role role = Role::request;
  bool optional = true;
  Section section = Section::working_storage;
  std::optional<std::string> picture;
  std::size_t byte_size = 0;
};

struct AnalysisStats {
  std::size_t passes = 0;
  std::size_t pass_cap = 0;
  std::size_t paths = 0;
  /// Interprocedural rounds over the largest call-graph cycle met, and its cap.
  std::size_t summary_rounds = 0;
  std::size_t summary_cap = 0;
};

struct ApiSignature {
  CodeRegion region;
  Variant variant;
  std::vector<FieldRole> requests;
  std::vector<FieldRole> responses;
  HttpMethod method = HttpMethod::get;
  bool degraded = false;
  AnalysisStats stats;
  /// Unfiltered sets, before the export rules drop groups and SQLCA.
  ItemSet request_items;
  ItemSet response_items;
};

/// Items that appear in exported field lists: named elementary items, with
/// the SQLCA communication area only on request.
bool exported(const SourceUnit &unit, ItemId item, bool include_sqlcode);

/// Builds sorted field lists with surety flags from raw sets.
void annotate(ApiSignature &sig, const SourceUnit &unit, const Surety &facts, bool include_sqlcode);

struct AnalysisOptions {
  Variant variant;
  PathLimits limits;
  /// Missing callees raise MissingCallee instead of degrading the site.
  bool strict = false;
  bool include_sqlcode = false;
  /// Responses are restricted to these items when set (FS and PS only).
  std::optional<ItemSet> post_context;
  bool post_context_auto = false;
};

/// Effect of a program on its parameters, in the program's own item ids.
struct CallSummary {
  ItemSet requests;
  ItemSet responses;
  bool degraded = false;

  bool operator==(const CallSummary &) const = default;
};

/// Caller items bound to a callee item range through one argument/parameter
/// pair. Reads map to every caller item overlapping the range; writes only to
/// caller items lying entirely inside it.
struct Binding {
  ItemSet reads;
  ItemSet writes;
  bool mismatch = false;
};

Binding bind_range(const SourceUnit &caller, ItemId argument, const SourceUnit &callee, ItemId parameter,
                   std::size_t offset, std::size_t size);

/// Translates a callee summary to caller items at one call site.
Binding translate_summary(const SourceUnit &caller, const Statement &site, const SourceUnit &callee,
                          const CallSummary &summary);

/// Signature computation over a workspace. CFGs, transfer sets and callee
/// summaries are memoised per program; each key is written once.
class Analyzer {
public:
  Analyzer(const std::map<std::string, SourceUnit> &units, const CallGraph &graph);
  ~Analyzer();

  const SourceUnit &unit(const std::string &program) const;
  const Cfg &cfg(const std::string &program);

  /// Transfer sets for a program. With call chain, resolved call sites use
  /// callee summaries computed with `summary_flow`.
  const UseDefSets &sets(const std::string &program, bool call_chain, Flow summary_flow, bool strict);
  bool sets_degraded(const std::string &program, bool call_chain, Flow summary_flow, bool strict);

  const CallSummary &summary(const std::string &program, Flow summary_flow, bool strict);
  /// Rounds used by the cyclic component containing `program` (1 when acyclic).
  std::size_t summary_rounds(const std::string &program, Flow summary_flow, bool strict);
  std::size_t summary_cap(const std::string &program) const;

  /// HTTP method of a region; with call chain, reachable callees count too.
  HttpMethod method(const CodeRegion &region, bool call_chain);

  ApiSignature signature(const CodeRegion &region, const AnalysisOptions &options);

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace apify
