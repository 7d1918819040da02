#include "apify/cli.hpp"

#include "apify/discovery.hpp"
#include "apify/errors.hpp"
#include "apify/oracle.hpp"
#include "apify/refactor.hpp"
#include "apify/report.hpp"
#include "apify/signature.hpp"
#include "apify/workspace.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <memory>
#include <sstream>

namespace apify {

namespace {

using json = nlohmann::ordered_json;

struct Globals {
  std::string config;
  bool stats = false;
  bool include_sqlcode = false;
};

class Session {
public:
  explicit Session(const Globals &g) {
    if (g.config.empty()) throw ConfigError("--config is required for this command");
    ws_ = load_workspace(load_config(g.config));
    analyzer_ = std::make_unique<Analyzer>(ws_.units, ws_.graph);
  }

  Workspace &ws() { return ws_; }
  Analyzer &analyzer() { return *analyzer_; }

  const std::vector<ApiCandidate> &candidates() {
    if (!candidates_) candidates_ = discover_candidates(*analyzer_, ws_.units, ws_.graph, ws_.inputs);
    return *candidates_;
  }

  const SourceUnit &unit(const std::string &program) const {
    auto it = ws_.units.find(program);
    if (it == ws_.units.end()) throw UnresolvedSelector("no program " + program + " in the workspace");
    return it->second;
  }

private:
  Workspace ws_;
  std::unique_ptr<Analyzer> analyzer_;
  std::optional<std::vector<ApiCandidate>> candidates_;
};

struct Selector {
  std::string region;
  std::string api;

  void attach(CLI::App *cmd) {
    cmd->add_option("--region", region, "Line range PROG:p-q");
    cmd->add_option("--api", api, "Name of a discovered candidate");
  }
};

struct Target {
  ApiCandidate candidate;
};

Target resolve(Session &s, const Selector &sel) {
  if (sel.region.empty() == sel.api.empty()) throw UnresolvedSelector("give exactly one of --region or --api");
  Target t;
  if (!sel.region.empty()) {
    t.candidate.region = parse_region_selector(s.ws().units, sel.region);
    const auto &r = t.candidate.region;
    t.candidate.suggested_name = slug(r.program + "-" + std::to_string(r.start_line) + "-" + std::to_string(r.end_line));
    t.candidate.seed_kind = SeedKind::user_region;
    t.candidate.evidence = "user region";
    return t;
  }
  for (const auto &c : s.candidates())
    if (c.suggested_name == sel.api) {
      t.candidate = c;
      return t;
    }
  throw UnresolvedSelector("no API candidate named " + sel.api);
}

struct VariantFlags {
  std::string flow;
  bool call_chain = false;
  bool no_call_chain = false;
  std::optional<std::size_t> ps_bound;
  std::optional<std::size_t> ps_unroll;
  bool strict = false;

  void attach(CLI::App *cmd) {
    cmd->add_option("--flow", flow, "Analysis variant")->check(CLI::IsMember({"fi", "fs", "ps"}));
    auto *on = cmd->add_flag("--call-chain", call_chain, "Analyse called programs through summaries");
    auto *off = cmd->add_flag("--no-call-chain", no_call_chain, "Treat call sites as opaque");
    on->excludes(off);
    cmd->add_option("--ps-bound", ps_bound, "Path budget of the path-sensitive variant");
    cmd->add_option("--ps-unroll", ps_unroll, "Loop unrolling of the path-sensitive variant");
    cmd->add_flag("--strict", strict, "Fail on callees missing from the workspace");
  }

  AnalysisOptions options(const WorkspaceConfig &config, const Globals &g) const {
    AnalysisOptions o;
    o.variant.flow = flow.empty() ? config.defaults.flow : *parse_flow(flow);
    o.variant.call_chain = call_chain || (config.defaults.call_chain && !no_call_chain);
    o.limits.max_paths = ps_bound.value_or(config.defaults.ps_bound);
    o.limits.unroll = ps_unroll.value_or(config.defaults.ps_unroll);
    o.strict = strict;
    o.include_sqlcode = g.include_sqlcode || config.defaults.include_sqlcode;
    return o;
  }
};

ItemSet named_items(const SourceUnit &unit, const std::string &list) {
  ItemSet out;
  std::stringstream in(list);
  std::string name;
  while (std::getline(in, name, ',')) {
    if (name.empty()) continue;
    for (auto &c : name) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    std::optional<ItemId> id = unit.find_item(name);
    for (std::size_t i = 0; !id && i < unit.item_count(); ++i)
      if (unit.qualified_name(ItemId(i)) == name) id = ItemId(i);
    if (!id) throw UnresolvedSelector("post-context item " + name + " is not declared in " + unit.program_id);
    for (std::size_t i = 0; i < unit.item_count(); ++i)
      if (ItemId(i) == *id || unit.is_ancestor(*id, ItemId(i))) out.insert(ItemId(i));
  }
  return out;
}

void write_file(const std::filesystem::path &p, const std::string &text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + p.string());
  f << text;
}

int cmd_identify(const Globals &g, const std::vector<std::string> &dynamic, const std::string &dot_cfg,
                 bool dot_callgraph, std::string &out) {
  Session s(g);
  if (!dot_cfg.empty()) {
    std::string program = dot_cfg;
    for (auto &c : program) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    s.unit(program);
    out = to_dot(s.analyzer().cfg(program));
    return exit_ok;
  }
  if (dot_callgraph) {
    out = to_dot(s.ws().graph);
    return exit_ok;
  }
  auto list = s.candidates();
  for (auto program : dynamic) {
    for (auto &c : program) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    list.push_back(dynamic_query_candidate(s.unit(program)));
  }
  std::stable_sort(list.begin(), list.end(), [](const ApiCandidate &a, const ApiCandidate &b) {
    return std::tie(a.region.program, a.region.start_line, a.region.end_line) <
           std::tie(b.region.program, b.region.start_line, b.region.end_line);
  });
  json doc = json::array();
  for (const auto &c : list) doc.push_back(candidate_json(c));
  out = render(doc);
  return exit_ok;
}

int cmd_signature(const Globals &g, const Selector &sel, const VariantFlags &vf, const std::string &post_context,
                  std::string &out) {
  Session s(g);
  const auto t = resolve(s, sel);
  auto options = vf.options(s.ws().config, g);
  if (post_context == "auto")
    options.post_context_auto = true;
  else if (!post_context.empty())
    options.post_context = named_items(s.unit(t.candidate.region.program), post_context);
  const auto sig = s.analyzer().signature(t.candidate.region, options);
  out = render(signature_json({t.candidate.suggested_name, t.candidate.seed_kind}, sig, g.stats));
  return exit_ok;
}

int cmd_refactor(const Globals &g, const Selector &sel, const VariantFlags &vf, const std::string &out_dir,
                 std::string &out) {
  Session s(g);
  const auto t = resolve(s, sel);
  const auto &region = t.candidate.region;
  const auto &unit = s.unit(region.program);
  auto options = vf.options(s.ws().config, g);
  // Responses nobody reads after the API are what SQL narrowing may drop.
  options.post_context_auto = options.variant.flow != Flow::fi;
  const auto sig = s.analyzer().signature(region, options);

  auto report = refactor_report(unit, region, sig);
  for (const auto &[fields, role, suffix] :
       {std::tuple(&sig.requests, "request", "REQ"), std::tuple(&sig.responses, "response", "RESP")}) {
    RefactorSuggestion r{SuggestionKind::slice_copybook, unit.program_id, region.start_line, json::object(),
                         "copybook holding only the fields the API exchanges"};
    const auto file = t.candidate.suggested_name + "-" + suffix + ".cpy";
    r.detail["role"] = role;
    r.detail["file"] = file;
    try {
      const auto slice = slice_copybook(unit, *fields, role);
      r.detail["text"] = slice.text;
      r.detail["skipped"] = slice.skipped;
      if (!out_dir.empty()) write_file(std::filesystem::path(out_dir) / file, slice.text);
    } catch (const EmptySlice &e) {
      r.detail["text"] = nullptr;
      r.detail["skipped"] = json::array();
      for (const auto &f : *fields) r.detail["skipped"].push_back(f.qualified_name);
      r.rationale = e.what();
    }
    report.push_back(std::move(r));
  }

  AnalysisOptions callee_options = options;
  callee_options.post_context_auto = false;
  for (auto id : region.statements) {
    const auto &st = unit.stmt(id);
    if ((st.kind != StmtKind::call && st.kind != StmtKind::cics_link) || st.dynamic_call || !st.call_target) continue;
    auto it = s.ws().units.find(*st.call_target);
    if (it == s.ws().units.end()) continue;
    const auto &callee = it->second;
    const auto callee_sig = s.analyzer().signature(whole_program_region(callee), callee_options);
    try {
      report.push_back(caller_mapping_report(unit, st, callee, callee_sig, slug(callee.program_id)));
    } catch (const BindingMismatch &e) {
      report.push_back({SuggestionKind::caller_mapping, unit.program_id, st.line,
                        json{{"callee", callee.program_id}, {"error", e.what()}},
                        "arguments cannot be bound to the callee parameters"});
    }
  }
  std::stable_sort(report.begin(), report.end(), [](const RefactorSuggestion &a, const RefactorSuggestion &b) {
    return std::pair(a.line, a.kind) < std::pair(b.line, b.kind);
  });
  json doc = json::array();
  for (const auto &r : report) doc.push_back(suggestion_json(r));
  out = render(doc);
  return exit_ok;
}

int cmd_export(const Globals &g, const std::vector<std::string> &names, const std::vector<std::string> &dynamic,
               const VariantFlags &vf, std::string &out) {
  Session s(g);
  const auto options = vf.options(s.ws().config, g);
  std::vector<ExportedApi> apis;
  for (const auto &c : s.candidates())
    if (names.empty() || std::find(names.begin(), names.end(), c.suggested_name) != names.end())
      apis.push_back({c, s.analyzer().signature(c.region, options)});
  for (const auto &n : names)
    if (std::none_of(apis.begin(), apis.end(), [&](const ExportedApi &a) { return a.candidate.suggested_name == n; }))
      throw UnresolvedSelector("no API candidate named " + n);
  for (auto program : dynamic) {
    for (auto &c : program) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    apis.push_back({dynamic_query_candidate(s.unit(program)), std::nullopt});
  }
  out = render(openapi_json(apis));
  return exit_ok;
}

int cmd_oracle(const Globals &g, const Selector &sel, std::size_t bound, std::size_t max_paths, std::string &out) {
  Session s(g);
  const auto t = resolve(s, sel);
  const auto &region = t.candidate.region;
  const auto &sets = s.analyzer().sets(region.program, false, Flow::fs, false);
  const RegionScope scope(s.analyzer().cfg(region.program), region);
  const auto paths = enumerate_paths(scope, sets, bound, max_paths);
  const auto result = oracle_signature(paths.paths, sets);
  out = render(oracle_json(s.unit(region.program), region, paths, result));
  return exit_ok;
}

int cmd_verify(const Globals &g, const VerifyOptions &options, std::string &out) {
  const auto r = verify(options);
  std::ostringstream text;
  text << r.passed << " passed, " << r.failed << " failed\n";
  if (g.stats) {
    for (const auto &[name, count] : r.checks) text << "check " << name << ": " << count << "\n";
    text << "max fs passes: " << r.max_fs_passes << "\n";
    text << "seconds: " << r.seconds << "\n";
  }
  if (r.failed > 0) {
    text << "first failure: seed " << r.first_failing_seed << ": " << r.first_failure << "\n";
    text << "counterexample:\n" << r.counterexample;
    if (!r.counterexample.empty() && r.counterexample.back() != '\n') text << "\n";
  }
  out = text.str();
  return r.failed > 0 ? exit_verify : exit_ok;
}

/// "A..B", inclusive; B < A denotes the empty range.
std::pair<std::uint64_t, std::uint64_t> seed_range(const std::string &text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const auto a = std::stoull(text);
      return {a, a + 1};
    }
    const auto a = std::stoll(text.substr(0, dots));
    const auto b = std::stoll(text.substr(dots + 2));
    if (a < 0) throw std::invalid_argument(text);
    return {static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(std::max(a, b + 1))};
  } catch (const std::logic_error &) {
    throw ConfigError("seed range must be A..B, got " + text);
  }
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Discovers API candidates in COBOL programs and computes their signatures", "apify"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Workspace config file (JSON)");
  app.add_flag("--stats", g.stats, "Report iteration counts");
  app.add_flag("--include-sqlcode", g.include_sqlcode, "Keep SQLCODE and the SQLCA in field lists");

  auto *identify = app.add_subcommand("identify", "List API candidates");
  std::vector<std::string> dynamic;
  std::string dot_cfg;
  bool dot_callgraph = false;
  identify->add_option("--dynamic-query", dynamic, "Add a dynamic-query API over a program's data layer");
  identify->add_option("--dot-cfg", dot_cfg, "Print one program's control-flow graph as DOT");
  identify->add_flag("--dot-callgraph", dot_callgraph, "Print the call graph as DOT");

  auto *signature = app.add_subcommand("signature", "Compute the request and response fields of a region");
  Selector sig_sel;
  VariantFlags sig_flags;
  std::string post_context;
  sig_sel.attach(signature);
  sig_flags.attach(signature);
  signature->add_option("--post-context", post_context, "\"auto\" or a comma list of items read after the API");

  auto *refactor = app.add_subcommand("refactor", "Refactoring report and copybook slices for a region");
  Selector ref_sel;
  VariantFlags ref_flags;
  std::string out_dir;
  ref_sel.attach(refactor);
  ref_flags.attach(refactor);
  refactor->add_option("--out-dir", out_dir, "Directory for the generated copybooks")->check(CLI::ExistingDirectory);

  auto *exporter = app.add_subcommand("export", "OpenAPI document for the discovered APIs");
  std::vector<std::string> export_names;
  std::vector<std::string> export_dynamic;
  VariantFlags export_flags;
  exporter->add_option("--api", export_names, "Candidates to export (default: all)");
  exporter->add_option("--dynamic-query", export_dynamic, "Add a dynamic-query API over a program's data layer");
  export_flags.attach(exporter);

  auto *oracle = app.add_subcommand("oracle", "Enumerate paths of a region and evaluate them one by one");
  Selector oracle_sel;
  std::size_t bound = 3;
  std::size_t max_paths = 1u << 20;
  oracle_sel.attach(oracle);
  oracle->add_option("--bound", bound, "Loop unrolling bound");
  oracle->add_option("--max-paths", max_paths, "Path budget");

  auto *verifier = app.add_subcommand("verify", "Check soundness and precision on generated programs");
  std::string seeds = "0..999";
  VerifyOptions vo;
  verifier->add_option("--seeds", seeds, "Inclusive seed range A..B");
  verifier->add_option("--size", vo.size, "Statements per program");
  verifier->add_option("--vars", vo.vars, "Variables per program");
  verifier->add_option("--bound", vo.bound, "Loop unrolling bound of the oracle");
  verifier->add_flag("--corrupt-kill", vo.corrupt_kill, "Negative control: analyses see every item killed");

  std::vector<std::string> argv_store{"apify"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char *> argv;
  for (const auto &a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_error;
  }

  std::string text;
  int code = exit_ok;
  try {
    if (identify->parsed())
      code = cmd_identify(g, dynamic, dot_cfg, dot_callgraph, text);
    else if (signature->parsed())
      code = cmd_signature(g, sig_sel, sig_flags, post_context, text);
    else if (refactor->parsed())
      code = cmd_refactor(g, ref_sel, ref_flags, out_dir, text);
    else if (exporter->parsed())
      code = cmd_export(g, export_names, export_dynamic, export_flags, text);
    else if (oracle->parsed())
      code = cmd_oracle(g, oracle_sel, bound, max_paths, text);
    else if (verifier->parsed()) {
      std::tie(vo.first_seed, vo.last_seed) = seed_range(seeds);
      code = cmd_verify(g, vo, text);
    }
  } catch (const FrontendError &e) {
    err << "error: " << e.what() << "\n";
    return exit_frontend;
  } catch (const UnresolvedSelector &e) {
    err << "error: " << e.what() << "\n";
    return exit_selector;
  } catch (const InvalidRegion &e) {
    err << "error: " << e.what() << "\n";
    return exit_selector;
  } catch (const PathBudgetExceeded &e) {
    err << "error: " << e.what() << "; rerun with --flow fs or a larger --ps-bound\n";
    return exit_path_budget;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return exit_error;
  }
  out << text;
  return code;
}

} // namespace apify
