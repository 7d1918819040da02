#include "apify/signature.hpp"

#include "apify/const_eval.hpp"
#include "apify/errors.hpp"
#include "apify/read_write.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <tuple>

namespace apify {

std::string_view to_string(Flow f) {
  switch (f) {
  case Flow::fi:
    return "fi";
  case Flow::fs:
    return "fs";
  case Flow::ps:
    return "ps";
  }
  return "fs";
}

std::string_view to_string(HttpMethod m) {
  switch (m) {
  case HttpMethod::get:
    return "get";
  case HttpMethod::post:
    return "post";
  case HttpMethod::put:
    return "put";
  case HttpMethod::del:
    return "delete";
  }
  return "get";
}

std::string_view to_string(Role r) {
  switch (r) {
  case Role::request:
    return "request";
  case Role::response:
    return "response";
  case Role::both:
    return "both";
  }
  return "request";
}

std::optional<Flow> parse_flow(std::string_view text) {
  if (text == "fi") return Flow::fi;
  if (text == "fs") return Flow::fs;
  if (text == "ps") return Flow::ps;
  return std::nullopt;
}

SignatureSets flow_insensitive(const RegionScope &scope, const UseDefSets &sets) {
  SignatureSets out;
  for (auto s : scope.statements()) {
    out.requests |= sets.gen(s);
    out.responses |= sets.resp(s);
  }
  out.passes = 1;
  out.pass_cap = 1;
  return out;
}

SignatureSets flow_sensitive(const RegionScope &scope, const UseDefSets &sets) {
  SignatureSets out;
  for (auto s : scope.statements()) out.responses |= sets.resp(s);

  const auto &unit = scope.cfg().unit();
  std::vector<ItemSet> live_in(unit.statements.size());
  out.pass_cap = unit.data_items.size() * scope.statements().size() + 1;
  bool changed = true;
  while (changed) {
    if (++out.passes > out.pass_cap) throw NonTerminatingFixpoint("flow-sensitive liveness");
    changed = false;
    for (auto n : scope.post_order()) {
      ItemSet live_out;
      for (auto k : scope.successors(n)) live_out |= live_in[index(k)];
      ItemSet in = sets.gen(n) | (live_out - sets.kill(n));
      if (!(in == live_in[index(n)])) {
        live_in[index(n)] = std::move(in);
        changed = true;
      }
    }
  }
  out.requests = live_in[index(scope.entry())];
  return out;
}

namespace {

class PathWalker {
public:
  PathWalker(const RegionScope &scope, const UseDefSets &sets, const PathLimits &limits)
      : scope_(scope), sets_(sets), limits_(limits), visits_(scope.cfg().node_count(), 0) {}

  SignatureSets run() {
    walk(scope_.entry(), ConstEnv(scope_.cfg().unit()), {}, {}, {});
    out_.paths = paths_;
    return out_;
  }

private:
  void walk(StmtId n, ConstEnv env, ItemSet requests, ItemSet written, ItemSet responses) {
    ++visits_[index(n)];
    requests |= sets_.gen(n) - written;
    written |= sets_.kill(n);
    responses |= sets_.resp(n);
    env.apply(scope_.cfg().unit().stmt(n), sets_.kill(n));

    const auto next = env.feasible_successors(scope_.cfg(), n);
    bool ends = next.empty();
    for (const auto &[s, branch_env] : next) {
      if (!scope_.contains(s) || visits_[index(s)] > limits_.unroll)
        ends = true;
      else
        walk(s, branch_env, requests, written, responses);
    }
    if (ends) {
      if (++paths_ > limits_.max_paths) throw PathBudgetExceeded(paths_);
      out_.requests |= requests;
      out_.responses |= responses;
    }
    --visits_[index(n)];
  }

  const RegionScope &scope_;
  const UseDefSets &sets_;
  PathLimits limits_;
  std::vector<std::size_t> visits_;
  std::size_t paths_ = 0;
  SignatureSets out_;
};

} // namespace

SignatureSets path_sensitive(const RegionScope &scope, const UseDefSets &sets, const PathLimits &limits) {
  if (scope.statements().size() > limits.max_statements) throw PathBudgetExceeded(0);
  return PathWalker(scope, sets, limits).run();
}

ItemSet post_context_auto(const RegionScope &scope, const UseDefSets &sets, const ItemSet &at_exit) {
  const auto &cfg = scope.cfg();
  const auto n = cfg.node_count();
  std::vector<ItemSet> live_in(n);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = n; i-- > 0;) {
      const auto s = StmtId(i);
      ItemSet live_out = cfg.may_end(s) ? at_exit : ItemSet{};
      for (auto k : cfg.successors(s)) live_out |= live_in[index(k)];
      ItemSet in = sets.gen(s) | (live_out - sets.kill(s));
      if (!(in == live_in[i])) {
        live_in[i] = std::move(in);
        changed = true;
      }
    }
  }
  ItemSet context;
  for (auto s : scope.statements()) {
    if (cfg.may_end(s)) context |= at_exit;
    for (auto k : cfg.successors(s))
      if (!scope.contains(k)) context |= live_in[index(k)];
  }
  return context;
}

Surety surety(const RegionScope &scope, const UseDefSets &sets) {
  const auto &unit = scope.cfg().unit();
  const auto top = ItemSet::all(unit.data_items.size());
  Surety out;
  for (auto s : scope.post_order()) {
    out.read |= sets.gen(s);
    out.written |= sets.kill(s);
  }
  auto must = [&](auto &&transfer) {
    std::vector<ItemSet> in(unit.statements.size(), top);
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto n : scope.post_order()) {
        ItemSet after = scope.leaves(n) ? ItemSet{} : top;
        for (auto k : scope.successors(n)) after &= in[index(k)];
        ItemSet now = transfer(n) | after;
        if (!(now == in[index(n)])) {
          in[index(n)] = std::move(now);
          changed = true;
        }
      }
    }
    return in[index(scope.entry())];
  };
  out.must_read = must([&](StmtId n) -> const ItemSet & { return sets.gen(n); });
  out.must_write = must([&](StmtId n) -> const ItemSet & { return sets.kill(n); });
  return out;
}

HttpMethod classify_http_method(const SourceUnit &unit, const std::vector<StmtId> &statements) {
  auto method = HttpMethod::get;
  for (auto s : statements) {
    const auto &st = unit.stmt(s);
    auto m = HttpMethod::get;
    if (st.kind == StmtKind::sql_delete)
      m = HttpMethod::del;
    else if (st.kind == StmtKind::sql_update || (st.kind == StmtKind::file_write && st.verb == "REWRITE"))
      m = HttpMethod::put;
    else if (st.kind == StmtKind::sql_insert || (st.kind == StmtKind::file_write && st.verb == "WRITE"))
      m = HttpMethod::post;
    method = std::max(method, m);
  }
  return method;
}

bool exported(const SourceUnit &unit, ItemId item, bool include_sqlcode) {
  const auto &d = unit.item(item);
  if (!d.is_elementary() || d.filler || d.is_condition()) return false;
  if (include_sqlcode) return true;
  return d.name != "SQLCODE" && unit.item(d.storage_root).name != "SQLCA";
}

void annotate(ApiSignature &sig, const SourceUnit &unit, const Surety &facts, bool include_sqlcode) {
  auto field = [&](ItemId id, bool is_request) {
    const auto &d = unit.item(id);
    FieldRole f;
    f.item = id;
    f.field = d.name;
    f.qualified_name = unit.qualified_name(id);
    f.section = d.section;
    f.picture = d.picture;
    f.byte_size = d.byte_size;
    const bool twice = sig.request_items.contains(id) && sig.response_items.contains(id);
    f.role = twice ? Role::both : (is_request ? Role::request : Role::response);
    if (is_request)
      f.optional = twice || !facts.must_read.contains(id) || facts.written.contains(id);
    else
      f.optional = twice || !facts.must_write.contains(id) || facts.read.contains(id);
    return f;
  };
  auto build = [&](const ItemSet &items, bool is_request) {
    std::vector<FieldRole> out;
    items.for_each([&](ItemId id) {
      if (exported(unit, id, include_sqlcode)) out.push_back(field(id, is_request));
    });
    std::sort(out.begin(), out.end(),
              [](const FieldRole &a, const FieldRole &b) { return a.qualified_name < b.qualified_name; });
    return out;
  };
  sig.requests = build(sig.request_items, true);
  sig.responses = build(sig.response_items, false);
}

Binding bind_range(const SourceUnit &caller, ItemId argument, const SourceUnit &callee, ItemId parameter,
                   std::size_t offset, std::size_t size) {
  Binding b;
  const auto &a = caller.item(argument);
  const auto &p = callee.item(parameter);
  if (a.byte_size != p.byte_size || offset + size > a.byte_size) b.mismatch = true;
  const auto lo = a.byte_offset + std::min(offset, a.byte_size);
  const auto hi = a.byte_offset + std::min(offset + size, a.byte_size);
  if (lo >= hi) return b;
  for (std::size_t i = 0; i < caller.data_items.size(); ++i) {
    const auto &y = caller.data_items[i];
    if (y.is_condition() || y.storage_root != a.storage_root) continue;
    const auto y_lo = y.byte_offset;
    const auto y_hi = y.byte_offset + y.byte_size;
    if (y_hi <= lo || hi <= y_lo) continue;
    const bool inside = lo <= y_lo && y_hi <= hi;
    if (y.is_elementary() || inside) b.reads.insert(ItemId(i));
    if (inside && (ItemId(i) == argument || caller.is_ancestor(argument, ItemId(i)))) b.writes.insert(ItemId(i));
  }
  return b;
}

Binding translate_summary(const SourceUnit &caller, const Statement &site, const SourceUnit &callee,
                          const CallSummary &summary) {
  Binding out;
  const auto params = callee.parameters();
  const auto &args = site.call_arguments;
  if (params.size() != args.size()) out.mismatch = true;
  for (std::size_t i = 0; i < std::min(params.size(), args.size()); ++i) {
    const auto &p = callee.item(params[i]);
    if (p.byte_size != caller.item(args[i]).byte_size) out.mismatch = true;
    auto map = [&](const ItemSet &items, bool reads) {
      items.for_each([&](ItemId x) {
        const auto &d = callee.item(x);
        if (d.storage_root != p.storage_root || d.byte_offset < p.byte_offset) return;
        auto b = bind_range(caller, args[i], callee, params[i], d.byte_offset - p.byte_offset, d.byte_size);
        if (reads)
          out.reads |= b.reads;
        else
          out.writes |= b.writes;
      });
    };
    map(summary.requests, true);
    map(summary.responses, false);
  }
  return out;
}

namespace {

struct ProgramSets {
  UseDefSets sets;
  std::vector<bool> degraded_site;
};

using SummaryKey = std::tuple<std::string, Flow, bool>;

} // namespace

struct Analyzer::Impl {
  const std::map<std::string, SourceUnit> &units;
  const CallGraph &graph;
  std::map<std::string, std::unique_ptr<Cfg>> cfgs;
  std::map<std::string, ProgramSets> local;
  std::map<SummaryKey, ProgramSets> chained;
  std::map<SummaryKey, CallSummary> summaries;
  std::map<SummaryKey, std::size_t> rounds;
  std::size_t cap = 1;

  Impl(const std::map<std::string, SourceUnit> &u, const CallGraph &g) : units(u), graph(g) {
    std::size_t linkage = 0;
    for (const auto &[_, unit] : units)
      for (const auto &d : unit.data_items)
        if (d.section == Section::linkage && !d.is_condition()) ++linkage;
    cap = units.size() * linkage + 1;
  }

  const Cfg &cfg(const std::string &program) {
    auto &slot = cfgs[program];
    if (!slot) slot = std::make_unique<Cfg>(build_cfg(units.at(program)));
    return *slot;
  }

  static bool is_call(const Statement &st) { return st.kind == StmtKind::call || st.kind == StmtKind::cics_link; }

  const SourceUnit *callee_of(const Statement &st) const {
    if (!is_call(st) || st.dynamic_call || !st.call_target) return nullptr;
    auto it = units.find(*st.call_target);
    return it == units.end() ? nullptr : &it->second;
  }

  ProgramSets build(const SourceUnit &unit, bool strict, const std::function<const CallSummary &(const std::string &)> &lookup) {
    ProgramSets out{local_use_def(unit), std::vector<bool>(unit.statements.size(), false)};
    for (const auto &st : unit.statements) {
      if (!is_call(st)) continue;
      const auto *callee = callee_of(st);
      if (!callee) {
        if (strict && !st.dynamic_call && st.call_target) throw MissingCallee(*st.call_target);
        out.degraded_site[index(st.id)] = true;
        continue;
      }
      const auto &summary = lookup(callee->program_id);
      const auto b = translate_summary(unit, st, *callee, summary);
      ItemSet writes = b.writes;
      if (st.cics)
        for (const auto &t : st.targets)
          if (t.is_item()) writes |= write_closure(unit, t.item);
      out.sets.req_gen[index(st.id)] = st.reads | b.reads;
      out.sets.req_kill[index(st.id)] = writes;
      out.sets.resp_gen[index(st.id)] = writes;
      out.degraded_site[index(st.id)] = b.mismatch || summary.degraded;
    }
    return out;
  }

  CallSummary compute_summary(const std::string &program, Flow flow, bool strict,
                              const std::function<const CallSummary &(const std::string &)> &lookup) {
    const auto &unit = units.at(program);
    CallSummary s;
    if (unit.statements.empty()) return s;
    auto ps = build(unit, strict, lookup);
    RegionScope scope(cfg(program), whole_program_region(unit));
    const auto raw = flow == Flow::fi ? flow_insensitive(scope, ps.sets) : flow_sensitive(scope, ps.sets);
    std::set<ItemId> roots;
    for (auto p : unit.parameters()) roots.insert(unit.item(p).storage_root);
    for (std::size_t i = 0; i < unit.data_items.size(); ++i) {
      if (!roots.count(unit.data_items[i].storage_root)) continue;
      if (raw.requests.contains(ItemId(i))) s.requests.insert(ItemId(i));
      if (raw.responses.contains(ItemId(i))) s.responses.insert(ItemId(i));
    }
    for (auto n : scope.statements()) s.degraded = s.degraded || ps.degraded_site[index(n)];
    return s;
  }

  const CallSummary &summary(const std::string &program, Flow flow, bool strict) {
    const SummaryKey key{program, flow, strict};
    if (auto it = summaries.find(key); it != summaries.end()) return it->second;

    std::vector<std::string> component{program};
    for (const auto &c : graph.components())
      if (std::find(c.begin(), c.end(), program) != c.end()) component = c;
    auto in_component = [&](const std::string &p) {
      return std::find(component.begin(), component.end(), p) != component.end();
    };
    for (const auto &member : component)
      for (const auto &callee : graph.callees(member))
        if (!in_component(callee)) summary(callee, flow, strict);

    bool cyclic = component.size() > 1;
    for (const auto &e : graph.edges) cyclic = cyclic || (e.caller == program && e.callee == program);

    std::map<std::string, CallSummary> working;
    for (const auto &m : component) working[m] = {};
    auto lookup = [&](const std::string &p) -> const CallSummary & {
      if (in_component(p)) return working.at(p);
      return summaries.at({p, flow, strict});
    };
    std::size_t round = 0;
    if (!cyclic) {
      working[program] = compute_summary(program, flow, strict, lookup);
      round = 1;
    } else {
      // Joined Gauss-Seidel rounds from (empty, empty); joining keeps every
      // summary growing, so the loop ends once a full round changes nothing.
      bool changed = true;
      while (changed) {
        if (++round > cap) throw NonTerminatingFixpoint("call summaries of " + program);
        changed = false;
        for (const auto &m : component) {
          auto next = compute_summary(m, flow, strict, lookup);
          next.requests |= working[m].requests;
          next.responses |= working[m].responses;
          next.degraded = next.degraded || working[m].degraded;
          if (!(next == working[m])) {
            working[m] = std::move(next);
            changed = true;
          }
        }
      }
    }
    for (auto &[m, s] : working) {
      summaries[{m, flow, strict}] = std::move(s);
      rounds[{m, flow, strict}] = round;
    }
    return summaries.at(key);
  }

  /// Programs reachable through resolved call sites of the scope, sorted.
  std::vector<std::string> reachable_callees(const RegionScope &scope) const {
    const auto &unit = scope.cfg().unit();
    std::set<std::string> seen;
    std::vector<std::string> todo;
    for (auto s : scope.statements())
      if (const auto *callee = callee_of(unit.stmt(s)))
        if (seen.insert(callee->program_id).second) todo.push_back(callee->program_id);
    while (!todo.empty()) {
      const auto p = todo.back();
      todo.pop_back();
      for (const auto &next : graph.callees(p))
        if (seen.insert(next).second) todo.push_back(next);
    }
    return {seen.begin(), seen.end()};
  }

  const ProgramSets &program_sets(const std::string &program, bool call_chain, Flow flow, bool strict) {
    const auto &unit = units.at(program);
    if (!call_chain) {
      auto it = local.find(program);
      if (it == local.end()) {
        ProgramSets ps{local_use_def(unit), std::vector<bool>(unit.statements.size(), false)};
        for (const auto &st : unit.statements) ps.degraded_site[index(st.id)] = is_call(st) && !callee_of(st);
        it = local.emplace(program, std::move(ps)).first;
      }
      return it->second;
    }
    const SummaryKey key{program, flow, strict};
    if (auto it = chained.find(key); it != chained.end()) return it->second;
    for (const auto &st : unit.statements)
      if (const auto *callee = callee_of(st)) summary(callee->program_id, flow, strict);
    auto ps = build(unit, strict, [&](const std::string &p) -> const CallSummary & {
      return summaries.at({p, flow, strict});
    });
    return chained.emplace(key, std::move(ps)).first->second;
  }
};

Analyzer::Analyzer(const std::map<std::string, SourceUnit> &units, const CallGraph &graph)
    : impl_(std::make_unique<Impl>(units, graph)) {}

Analyzer::~Analyzer() = default;

const SourceUnit &Analyzer::unit(const std::string &program) const { return impl_->units.at(program); }

const Cfg &Analyzer::cfg(const std::string &program) { return impl_->cfg(program); }

const UseDefSets &Analyzer::sets(const std::string &program, bool call_chain, Flow summary_flow, bool strict) {
  return impl_->program_sets(program, call_chain, summary_flow, strict).sets;
}

bool Analyzer::sets_degraded(const std::string &program, bool call_chain, Flow summary_flow, bool strict) {
  const auto &d = impl_->program_sets(program, call_chain, summary_flow, strict).degraded_site;
  return std::find(d.begin(), d.end(), true) != d.end();
}

const CallSummary &Analyzer::summary(const std::string &program, Flow summary_flow, bool strict) {
  return impl_->summary(program, summary_flow, strict);
}

std::size_t Analyzer::summary_rounds(const std::string &program, Flow summary_flow, bool strict) {
  impl_->summary(program, summary_flow, strict);
  return impl_->rounds.at({program, summary_flow, strict});
}

std::size_t Analyzer::summary_cap(const std::string &) const { return impl_->cap; }

HttpMethod Analyzer::method(const CodeRegion &region, bool call_chain) {
  const auto &unit = this->unit(region.program);
  const RegionScope scope(cfg(region.program), region);
  auto m = classify_http_method(unit, scope.statements());
  if (call_chain)
    for (const auto &p : impl_->reachable_callees(scope)) {
      const auto &callee = this->unit(p);
      std::vector<StmtId> all;
      for (const auto &st : callee.statements) all.push_back(st.id);
      m = std::max(m, classify_http_method(callee, all));
    }
  return m;
}

ApiSignature Analyzer::signature(const CodeRegion &region, const AnalysisOptions &options) {
  const auto &unit = this->unit(region.program);
  const auto &graph = this->cfg(region.program);
  const RegionScope scope(graph, region);
  const auto flow = options.variant.flow;
  const bool chain = options.variant.call_chain;
  const auto &ps = impl_->program_sets(region.program, chain, flow, options.strict);

  ApiSignature sig;
  sig.region = region;
  sig.variant = options.variant;

  SignatureSets raw;
  switch (flow) {
  case Flow::fi:
    raw = flow_insensitive(scope, ps.sets);
    break;
  case Flow::fs:
    raw = flow_sensitive(scope, ps.sets);
    break;
  case Flow::ps:
    raw = path_sensitive(scope, ps.sets, options.limits);
    break;
  }
  if (flow != Flow::fi) {
    if (options.post_context_auto) {
      ItemSet linkage;
      for (std::size_t i = 0; i < unit.data_items.size(); ++i)
        if (unit.data_items[i].section == Section::linkage && !unit.data_items[i].is_condition())
          linkage.insert(ItemId(i));
      raw.responses &= post_context_auto(scope, ps.sets, linkage);
    }
    if (options.post_context) raw.responses &= *options.post_context;
  }
  sig.request_items = raw.requests;
  sig.response_items = raw.responses;
  sig.stats.passes = raw.passes;
  sig.stats.pass_cap = raw.pass_cap;
  sig.stats.paths = raw.paths;

  sig.method = method(region, chain);
  for (auto s : scope.statements())
    if (chain && ps.degraded_site[index(s)]) sig.degraded = true;
  if (chain)
    for (const auto &p : impl_->reachable_callees(scope)) {
      sig.stats.summary_rounds = std::max(sig.stats.summary_rounds, summary_rounds(p, flow, options.strict));
      sig.stats.summary_cap = impl_->cap;
    }

  annotate(sig, unit, surety(scope, ps.sets), options.include_sqlcode);
  return sig;
}

} // namespace apify
