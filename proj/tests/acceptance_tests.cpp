// Acceptance suite: one PASS/FAIL line per criterion; exits non-zero when
// any criterion fails.

#include "apify/cli.hpp"
#include "apify/discovery.hpp"
#include "apify/errors.hpp"
#include "apify/oracle.hpp"
#include "apify/refactor.hpp"
#include "apify/report.hpp"
#include "apify/signature.hpp"

#include "test_support.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace apify;
using namespace apify::testing;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double verify_time_limit_seconds = 120.0;
constexpr std::uint64_t verify_seeds = 1000;
constexpr std::size_t verify_size = 30;
constexpr std::size_t verify_vars = 10;
constexpr std::size_t verify_bound = 3;
constexpr std::size_t max_summary_rounds = 3;

using Names = std::set<std::string>;

int failures = 0;

void report(int criterion, bool ok, const std::string &detail) {
  std::cout << "criterion " << criterion << ": " << (ok ? "PASS" : "FAIL") << " - " << detail << std::endl;
  if (!ok) ++failures;
}

std::string show(const Names &n) {
  std::string out = "{";
  for (const auto &s : n) out += (out.size() > 1 ? "," : "") + s;
  return out + "}";
}

Names fields(const std::vector<FieldRole> &list) {
  Names out;
  for (const auto &f : list) out.insert(f.field);
  return out;
}

struct Cli {
  int code = 0;
  std::string out;
};

Cli cli(const std::vector<std::string> &args) {
  std::ostringstream out;
  std::ostringstream err;
  Cli r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  return r;
}

struct Corpus {
  Workspace ws;
  Analyzer analyzer;
  explicit Corpus(const std::string &name) : ws(load_fixture(name)), analyzer(ws.units, ws.graph) {}

  ApiSignature run(const CodeRegion &region, Flow flow, bool chain, std::optional<ItemSet> post = {}) {
    AnalysisOptions o;
    o.variant = {flow, chain};
    o.post_context = std::move(post);
    return analyzer.signature(region, o);
  }
  ApiSignature run(const std::string &program, int p, int q, Flow flow, bool chain = false) {
    return run(make_region(ws.units.at(program), p, q), flow, chain);
  }
};

void soundness_and_precision() {
  VerifyOptions o;
  o.first_seed = 0;
  o.last_seed = verify_seeds;
  o.size = verify_size;
  o.vars = verify_vars;
  o.bound = verify_bound;
  const auto r = verify(o);

  std::map<std::string, std::size_t> checks(r.checks.begin(), r.checks.end());
  const bool soundness_checked = checks["fs_requests_sound"] > 0 && checks["fi_requests_sound"] > 0 &&
                                 checks["responses_sound"] > 0;
  const bool precision_checked = checks["fs_requests_within_fi"] > 0 && checks["fs_fi_responses_equal"] > 0;
  std::ostringstream d;
  d << r.passed << "/" << verify_seeds << " programs clean, " << r.seconds << " s (limit " << verify_time_limit_seconds
    << " s)";
  if (r.failed > 0) d << "; first failure seed " << r.first_failing_seed << ": " << r.first_failure;
  report(1, r.failed == 0 && r.passed == verify_seeds && soundness_checked && r.seconds < verify_time_limit_seconds,
         d.str());

  std::ostringstream p;
  p << checks["fs_requests_within_fi"] << " FS-within-FI and " << checks["fs_fi_responses_equal"]
    << " response-equality checks, " << r.failed << " violating programs";
  report(2, r.failed == 0 && precision_checked, p.str());
}

void worked_examples() {
  Corpus c("worked");
  const auto fi = c.run("DEMO1", 10, 11, Flow::fi);
  const auto fs = c.run("DEMO1", 10, 11, Flow::fs);
  const auto post =
      c.run(make_region(c.ws.units.at("DEMO1"), 10, 11), Flow::fs, false, ItemSet{*c.ws.units.at("DEMO1").find_item("C")});
  const auto ps2 = c.run("DEMO2", 10, 19, Flow::ps);
  const auto fs2 = c.run("DEMO2", 10, 19, Flow::fs);
  const bool ok = fields(fi.requests) == Names{"A", "B"} && fields(fi.responses) == Names{"B", "C"} &&
                  fields(fs.requests) == Names{"A"} && fields(fs.responses) == Names{"B", "C"} &&
                  fields(post.responses) == Names{"C"} && fields(ps2.requests) == Names{"A"} &&
                  fields(fs2.requests).count("B") == 1;
  report(3, ok,
         "FI " + show(fields(fi.requests)) + "/" + show(fields(fi.responses)) + ", FS " + show(fields(fs.requests)) +
             "/" + show(fields(fs.responses)) + ", post {C} " + show(fields(post.responses)) + ", EVALUATE PS " +
             show(fields(ps2.requests)) + " FS " + show(fields(fs2.requests)));
}

std::optional<bool> optional_flag(const std::vector<FieldRole> &list, const std::string &name) {
  for (const auto &f : list)
    if (f.field == name) return f.optional;
  return std::nullopt;
}

void surety_cases() {
  Corpus c("worked");
  const auto one = c.run("SURETY", 12, 12, Flow::fs);
  const auto two = c.run("SURETY", 12, 13, Flow::fs);
  const auto branch = c.run("SURETY", 14, 18, Flow::fs);
  const bool ok = optional_flag(one.requests, "A") == false && optional_flag(one.responses, "B") == false &&
                  optional_flag(two.responses, "B") == true && optional_flag(branch.requests, "A") == true &&
                  optional_flag(branch.responses, "A") == true && optional_flag(branch.requests, "Y") == true &&
                  optional_flag(branch.responses, "Y") == true;
  report(4, ok, "MOVE A TO B: A, B certain; chained moves: B optional; IF/ELSE: A and Y optional");
}

json manifest() {
  std::ifstream in(fixture("minicorpus/manifest.json"));
  return json::parse(in);
}

bool has_call(const SourceUnit &u, const RegionScope &scope) {
  for (auto s : scope.statements()) {
    const auto k = u.stmt(s).kind;
    if (k == StmtKind::call || k == StmtKind::cics_link) return true;
  }
  return false;
}

void inquiry_shape() {
  Corpus c("minicorpus");
  const auto doc = manifest();
  const auto name = doc.at("inquiry_api").get<std::string>();
  const auto candidates = discover_candidates(c.analyzer, c.ws.units, c.ws.graph, c.ws.inputs);
  const ApiCandidate *inquiry = nullptr;
  for (const auto &cand : candidates)
    if (cand.suggested_name == name) inquiry = &cand;
  if (inquiry == nullptr) {
    report(5, false, "no candidate named " + name);
    return;
  }
  const auto sig = c.run(inquiry->region, Flow::fi, false);
  std::size_t linkage = 0;
  std::size_t working = 0;
  Names qualified;
  for (const auto &f : sig.requests) {
    (f.section == Section::linkage ? linkage : working) += 1;
    qualified.insert(f.qualified_name);
  }
  Names expected;
  for (const auto &q : doc.at("inquiry_requests")) expected.insert(q.get<std::string>());

  std::size_t compared = 0;
  std::size_t differing = 0;
  for (const auto &cand : candidates) {
    if (cand.seed_kind != SeedKind::data_access) continue;
    const auto &u = c.ws.units.at(cand.region.program);
    if (has_call(u, RegionScope(c.analyzer.cfg(cand.region.program), cand.region))) continue;
    for (auto flow : {Flow::fi, Flow::fs, Flow::ps}) {
      const auto a = c.run(cand.region, flow, false);
      const auto b = c.run(cand.region, flow, true);
      ++compared;
      const ApiHeader header{cand.suggested_name, cand.seed_kind};
      auto ja = signature_json(header, a, false);
      auto jb = signature_json(header, b, false);
      ja.erase("variant");
      jb.erase("variant");
      if (ja != jb) ++differing;
    }
  }
  std::ostringstream d;
  d << name << " FI without call chain: " << working << "+" << linkage << " request fields " << show(qualified) << "; "
    << compared << " call-free data-access signatures, " << differing << " differ with call chain";
  report(5, sig.requests.size() == 2 && working == 0 && linkage == 2 && qualified == expected && compared > 0 &&
                differing == 0,
         d.str());
}

void discovery_coverage() {
  Corpus c("minicorpus");
  const auto candidates = discover_candidates(c.analyzer, c.ws.units, c.ws.graph, c.ws.inputs);
  using Key = std::tuple<std::string, std::string, int, int>;
  std::set<Key> found;
  for (const auto &cand : candidates)
    found.insert({std::string(to_string(cand.seed_kind)), cand.region.program, cand.region.start_line,
                  cand.region.end_line});
  const auto doc = manifest();
  std::set<Key> planted;
  std::map<std::string, std::size_t> kinds;
  for (const auto &p : doc.at("planted")) {
    planted.insert({p.at("seed_kind").get<std::string>(), p.at("program").get<std::string>(),
                    p.at("start_line").get<int>(), p.at("end_line").get<int>()});
    ++kinds[p.at("seed_kind").get<std::string>()];
  }
  std::size_t hit = 0;
  for (const auto &k : planted) hit += found.count(k);
  const double recall = planted.empty() ? 0 : static_cast<double>(hit) / static_cast<double>(planted.size());
  const double precision = found.empty() ? 0 : static_cast<double>(hit) / static_cast<double>(found.size());
  const bool seeded = kinds["transaction"] >= 4 && kinds["data_access"] >= 3 && kinds["procedure"] >= 2 &&
                      kinds["screen"] >= 1;
  std::ostringstream d;
  d << "recall " << hit << "/" << planted.size() << ", precision " << hit << "/" << found.size() << "; planted "
    << kinds["transaction"] << " transaction, " << kinds["data_access"] << " data-access, " << kinds["procedure"]
    << " procedure, " << kinds["screen"] << " screen";
  report(6, recall == 1.0 && precision == 1.0 && seeded, d.str());
}

/// identify, signature and refactor for every API, then export, concatenated.
std::string pipeline(const std::string &config, const fs::path &out_dir) {
  std::string all;
  const auto ids = cli({"--config", config, "identify"});
  all += ids.out;
  for (const auto &c : json::parse(ids.out)) {
    const auto name = c.at("name").get<std::string>();
    for (const auto &flow : {"fi", "fs", "ps"})
      for (const auto &chain : {"--call-chain", "--no-call-chain"})
        all += cli({"--config", config, "signature", "--api", name, "--flow", flow, chain}).out;
    all += cli({"--config", config, "refactor", "--api", name, "--out-dir", out_dir.string()}).out;
  }
  all += cli({"--config", config, "export"}).out;
  for (const auto &e : fs::directory_iterator(out_dir)) {
    std::ifstream in(e.path());
    std::ostringstream s;
    s << in.rdbuf();
    all += e.path().filename().string() + "\n" + s.str();
  }
  return all;
}

void determinism() {
  const auto config = fixture("minicorpus/apify.json");
  const auto root = fs::temp_directory_path() / "apify-acceptance";
  fs::remove_all(root);
  fs::create_directories(root / "a");
  fs::create_directories(root / "b");
  const auto first = pipeline(config, root / "a");
  const auto second = pipeline(config, root / "b");
  fs::remove_all(root);
  report(7, !first.empty() && first == second,
         std::to_string(first.size()) + " bytes per run, " + (first == second ? "identical" : "different"));
}

void fixpoints() {
  std::size_t regions = 0;
  std::size_t max_fs = 0;
  bool ok = true;
  std::string problem;
  for (const auto *name : {"minicorpus", "worked", "cyclic"}) {
    const auto config = fixture(std::string(name) + "/apify.json");
    Corpus c(name);
    for (const auto &[id, unit] : c.ws.units) {
      const auto region = whole_program_region(unit);
      const auto selector = id + ":" + std::to_string(region.start_line) + "-" + std::to_string(region.end_line);
      for (const auto &chain : {"--no-call-chain", "--call-chain"}) {
        const auto fi = cli({"--config", config, "--stats", "signature", "--region", selector, "--flow", "fi", chain});
        const auto fs = cli({"--config", config, "--stats", "signature", "--region", selector, "--flow", "fs", chain});
        if (fi.code != exit_ok || fs.code != exit_ok) {
          ok = false;
          problem = selector + " failed";
          continue;
        }
        const auto a = json::parse(fi.out).at("stats");
        const auto b = json::parse(fs.out).at("stats");
        const auto passes = b.at("passes").get<std::size_t>();
        max_fs = std::max(max_fs, passes);
        if (a.at("passes") != 1 || passes < 1 || passes > b.at("pass_cap").get<std::size_t>()) {
          ok = false;
          problem = selector + " pass counts out of bounds";
        }
        ++regions;
      }
    }
  }
  Corpus cyclic("cyclic");
  const auto sig = cyclic.run("CYCA", 13, 18, Flow::fs, true);
  const auto rounds = sig.stats.summary_rounds;
  ok = ok && rounds >= 1 && rounds <= max_summary_rounds;
  std::ostringstream d;
  d << regions << " region/variant runs: FI passes 1, FS passes <= " << max_fs << " within cap; cyclic summary rounds "
    << rounds << " (limit " << max_summary_rounds << ")";
  if (!problem.empty()) d << "; " << problem;
  report(8, ok, d.str());
}

void slices() {
  Corpus c("minicorpus");
  const auto candidates = discover_candidates(c.analyzer, c.ws.units, c.ws.graph, c.ws.inputs);
  std::size_t checked = 0;
  std::size_t empty = 0;
  std::string problem;
  for (const auto &cand : candidates) {
    const auto &u = c.ws.units.at(cand.region.program);
    AnalysisOptions o;
    o.variant = {Flow::fs, false};
    o.post_context_auto = true;
    const auto sig = c.analyzer.signature(cand.region, o);
    for (const auto &[list, role] : {std::pair{&sig.requests, "request"}, std::pair{&sig.responses, "response"}}) {
      Names expected;
      for (const auto &f : *list)
        if (u.item(f.item).copybook)
          for (std::optional<ItemId> i = f.item; i; i = u.item(*i).parent) expected.insert(u.qualified_name(*i));
      if (expected.empty()) {
        ++empty;
        continue;
      }
      try {
        const auto parsed = parse_copybook(slice_copybook(u, *list, role).text);
        Names got;
        for (std::size_t i = 0; i < parsed.data_items.size(); ++i) got.insert(parsed.qualified_name(ItemId(i)));
        if (got != expected && problem.empty()) problem = cand.suggested_name + " " + role + " slice " + show(got);
      } catch (const Error &e) {
        if (problem.empty()) problem = cand.suggested_name + " " + role + ": " + e.what();
      }
      ++checked;
    }
  }
  std::ostringstream d;
  d << checked << " slices over " << candidates.size() << " APIs re-parsed, " << empty
    << " roles with no copybook field";
  if (!problem.empty()) d << "; mismatch: " << problem;
  report(9, problem.empty() && checked > 0, d.str());
}

} // namespace

int main() {
  const std::vector<std::pair<std::vector<int>, void (*)()>> criteria{
      {{1, 2}, soundness_and_precision}, {{3}, worked_examples}, {{4}, surety_cases}, {{5}, inquiry_shape},
      {{6}, discovery_coverage},         {{7}, determinism},     {{8}, fixpoints},    {{9}, slices}};
  for (const auto &[numbers, run] : criteria) {
    try {
      run();
    } catch (const std::exception &e) {
      for (int n : numbers) report(n, false, std::string("error: ") + e.what());
    }
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
