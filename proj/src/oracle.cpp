#include "apify/oracle.hpp"

#include "apify/cfg.hpp"
#include "apify/const_eval.hpp"
#include "apify/errors.hpp"
#include "apify/parser.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <random>
#include <sstream>

namespace apify {

PathEnumeration enumerate_paths(const RegionScope &scope, const UseDefSets &sets, std::size_t bound,
                                std::size_t max_paths) {
  if (scope.statements().size() > 200) throw PathBudgetExceeded(0);
  const auto &cfg = scope.cfg();
  const auto &unit = cfg.unit();
  struct Frame {
    std::vector<StmtId> path;
    ConstEnv env;
  };
  PathEnumeration out;
  std::vector<Frame> stack;
  stack.push_back({{scope.entry()}, ConstEnv(unit)});
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    const auto n = f.path.back();
    f.env.apply(unit.stmt(n), sets.kill(n));
    const auto feasible = f.env.feasible_successors(cfg, n);
    auto all = cfg.successors(n);
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    if (feasible.size() < all.size()) out.pruned_branch = true;

    bool ends = feasible.empty();
    for (auto it = feasible.rbegin(); it != feasible.rend(); ++it) {
      const auto &[s, env] = *it;
      const auto seen = static_cast<std::size_t>(std::count(f.path.begin(), f.path.end(), s));
      if (!scope.contains(s) || seen > bound) {
        ends = true;
        continue;
      }
      Frame next{f.path, env};
      next.path.push_back(s);
      stack.push_back(std::move(next));
    }
    if (!ends) continue;
    bool truncated = false;
    for (const auto &[s, _] : feasible)
      if (scope.contains(s)) truncated = true;
    out.paths.push_back({std::move(f.path), bound, truncated});
    if (out.paths.size() > max_paths) throw PathBudgetExceeded(out.paths.size());
  }
  return out;
}

OracleResult oracle_signature(const std::vector<ExecutionPath> &paths, const UseDefSets &sets) {
  OracleResult out;
  for (const auto &p : paths) {
    PathResult r;
    for (auto it = p.statements.rbegin(); it != p.statements.rend(); ++it) {
      r.requests -= sets.kill(*it);
      r.requests |= sets.gen(*it);
      r.responses |= sets.resp(*it);
    }
    out.union_req |= r.requests;
    out.union_resp |= r.responses;
    out.per_path.push_back(std::move(r));
  }
  return out;
}

namespace {

// Emits statement text line by line. Sizes count every statement, nested ones
// included, so a block of n statements is exactly n statement nodes.
class Generator {
public:
  Generator(std::uint64_t seed, std::size_t vars) : rng_(seed), vars_(std::max<std::size_t>(vars, 2)) {}

  std::string program(std::uint64_t seed, std::size_t size) {
    std::size_t sub = 0;
    if (size >= 4 && pick(3) == 0) sub = 1 + pick(std::min<std::size_t>(3, size - 3));
    has_sub_ = sub > 0;
    // GOBACK keeps the end of MAIN from falling into SUB.
    const auto main = size - sub - (sub > 0 ? 1 : 0);

    std::ostringstream out;
    out << "IDENTIFICATION DIVISION.\nPROGRAM-ID. RAND" << seed << ".\nDATA DIVISION.\nWORKING-STORAGE SECTION.\n";
    for (std::size_t v = 0; v < vars_; ++v) out << "01 V" << v << " PIC 9(4).\n";
    out << "PROCEDURE DIVISION.\nMAIN.\n";
    block(out, main, 0, false, true);
    if (sub > 0) {
      line(out, 0, "GOBACK", true);
      out << "SUB.\n";
      has_sub_ = false;
      block(out, sub, 0, false, true);
    }
    return out.str();
  }

private:
  std::size_t pick(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(rng_() % n); }
  std::string var() { return "V" + std::to_string(pick(vars_)); }
  std::string lit() { return std::to_string(pick(4)); }

  std::string condition() {
    switch (pick(3)) {
    case 0:
      return var() + " > " + lit();
    case 1:
      return var() + " = " + lit();
    default:
      return var() + " < " + var();
    }
  }

  void line(std::ostringstream &out, int depth, const std::string &text, bool top) {
    out << std::string(4 + 2 * depth, ' ') << text << (top ? ".\n" : "\n");
  }

  void simple(std::ostringstream &out, int depth, bool top) {
    const auto a = var();
    const auto b = var();
    switch (pick(8)) {
    case 0:
    case 1:
    case 2:
      line(out, depth, "MOVE " + a + " TO " + b, top);
      break;
    case 3:
      line(out, depth, "MOVE " + lit() + " TO " + b, top);
      break;
    case 4:
      line(out, depth, "ADD " + a + " TO " + b, top);
      break;
    case 5:
      line(out, depth, "COMPUTE " + b + " = " + a + " + " + var(), top);
      break;
    case 6:
      if (has_sub_) {
        // One call site only: spliced returns from several sites would
        // multiply paths without adding any behaviour worth checking.
        has_sub_ = false;
        line(out, depth, "PERFORM SUB", top);
        break;
      }
      line(out, depth, "DISPLAY " + a, top);
      break;
    default:
      line(out, depth, "SUBTRACT " + a + " FROM " + b, top);
      break;
    }
  }

  // Writes exactly n statements.
  void block(std::ostringstream &out, std::size_t n, int depth, bool in_loop, bool top) {
    while (n > 0) {
      if (n >= 2 && depth < 2 && compounds_ < 4 && pick(10) < 3) {
        const auto inner = 1 + pick(std::min<std::size_t>(n - 1, 5));
        compound(out, inner, depth, in_loop, top);
        n -= inner + 1;
        continue;
      }
      simple(out, depth, top);
      --n;
    }
  }

  void compound(std::ostringstream &out, std::size_t inner, int depth, bool in_loop, bool top) {
    ++compounds_;
    auto kind = pick(3);
    if (kind == 2 && (in_loop || loops_ >= 2)) kind = pick(2);
    if (kind == 1 && inner < 2) kind = 0;
    switch (kind) {
    case 0: {
      const auto then_n = 1 + pick(inner);
      line(out, depth, "IF " + condition(), false);
      block(out, then_n, depth + 1, in_loop, false);
      if (inner > then_n) {
        line(out, depth, "ELSE", false);
        block(out, inner - then_n, depth + 1, in_loop, false);
      }
      line(out, depth, "END-IF", top);
      break;
    }
    case 1: {
      line(out, depth, "EVALUATE " + var(), false);
      const auto first = 1 + pick(inner - 1);
      line(out, depth + 1, "WHEN " + lit(), false);
      block(out, first, depth + 2, in_loop, false);
      line(out, depth + 1, pick(2) == 0 ? "WHEN OTHER" : "WHEN " + lit(), false);
      block(out, inner - first, depth + 2, in_loop, false);
      line(out, depth, "END-EVALUATE", top);
      break;
    }
    default:
      ++loops_;
      line(out, depth, "PERFORM UNTIL " + condition(), false);
      block(out, inner, depth + 1, true, false);
      line(out, depth, "END-PERFORM", top);
      break;
    }
  }

  std::mt19937_64 rng_;
  std::size_t vars_;
  std::size_t compounds_ = 0;
  std::size_t loops_ = 0;
  bool has_sub_ = false;
};

} // namespace

std::string random_program_text(std::uint64_t seed, std::size_t size, std::size_t vars) {
  return Generator(seed, vars).program(seed, std::max<std::size_t>(size, 1));
}

SourceUnit random_program(std::uint64_t seed, std::size_t size, std::size_t vars) {
  return parse_source(random_program_text(seed, size, vars));
}

namespace {

std::string names(const SourceUnit &unit, const ItemSet &s) {
  std::string out = "{";
  s.for_each([&](ItemId id) {
    if (out.size() > 1) out += ", ";
    out += unit.item(id).name;
  });
  return out + "}";
}

} // namespace

VerifyReport verify(const VerifyOptions &options) {
  const auto start = std::chrono::steady_clock::now();
  VerifyReport report;
  std::map<std::string, std::size_t> checks;
  for (auto seed = options.first_seed; seed < options.last_seed; ++seed) {
    const auto text = random_program_text(seed, options.size, options.vars);
    std::string failure;
    auto check = [&](bool ok, const std::string &property, const std::string &what) {
      ++checks[property];
      if (!ok && failure.empty()) failure = property + ": " + what;
    };
    check(text == random_program_text(seed, options.size, options.vars), "generator_determinism", "text differs");

    const auto unit = parse_source(text);
    const auto cfg = build_cfg(unit);
    const auto truth = local_use_def(unit);
    auto seen = truth;
    if (options.corrupt_kill) {
      const auto everything = ItemSet::all(unit.data_items.size());
      for (auto &k : seen.req_kill) k = everything;
    }

    std::mt19937_64 pick(seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<CodeRegion> regions{whole_program_region(unit)};
    {
      const auto n = unit.statements.size();
      auto i = static_cast<std::size_t>(pick() % n);
      auto j = static_cast<std::size_t>(pick() % n);
      if (i > j) std::swap(i, j);
      regions.push_back(make_region(unit, unit.statements[i].line, unit.statements[j].line));
    }

    for (const auto &region : regions) {
      const RegionScope scope(cfg, region);
      const auto where = " in lines " + std::to_string(region.start_line) + "-" + std::to_string(region.end_line);
      const auto fi = flow_insensitive(scope, seen);
      const auto fs = flow_sensitive(scope, seen);
      const auto enumeration = enumerate_paths(scope, truth, options.bound);
      const auto oracle = oracle_signature(enumeration.paths, truth);
      report.max_fs_passes = std::max(report.max_fs_passes, fs.passes);

      check(fs.requests.includes(oracle.union_req), "fs_requests_sound",
            "FS requests " + names(unit, fs.requests) + " miss oracle " + names(unit, oracle.union_req) + where);
      check(fi.requests.includes(oracle.union_req), "fi_requests_sound",
            "FI requests " + names(unit, fi.requests) + " miss oracle " + names(unit, oracle.union_req) + where);
      check(fs.responses.includes(oracle.union_resp) && fi.responses.includes(oracle.union_resp),
            "responses_sound", "static responses miss oracle " + names(unit, oracle.union_resp) + where);
      check(fi.requests.includes(fs.requests), "fs_requests_within_fi",
            "FS " + names(unit, fs.requests) + " not within FI " + names(unit, fi.requests) + where);
      check(fs.responses == fi.responses, "fs_fi_responses_equal",
            "FS " + names(unit, fs.responses) + " vs FI " + names(unit, fi.responses) + where);
      check(fi.passes == 1 && fs.passes >= 1 && fs.passes <= fs.pass_cap, "pass_counts",
            "FI " + std::to_string(fi.passes) + " FS " + std::to_string(fs.passes) + where);

      bool loop_free = true;
      for (auto s : scope.statements()) {
        const auto &st = unit.stmt(s);
        if (st.kind == StmtKind::perform && st.perform->loop != PerformSpec::Loop::once) loop_free = false;
      }
      if (loop_free && !enumeration.pruned_branch)
        check(fs.requests == oracle.union_req, "fs_exact_loop_free",
              "FS " + names(unit, fs.requests) + " vs oracle " + names(unit, oracle.union_req) + where);

      const auto ps = path_sensitive(scope, seen, {1u << 20, options.bound, 200});
      check(fs.requests.includes(ps.requests) && fs.responses.includes(ps.responses), "ps_within_fs",
            "PS " + names(unit, ps.requests) + " not within FS " + names(unit, fs.requests) + where);
      check(ps.requests.includes(oracle.union_req) && ps.responses.includes(oracle.union_resp), "ps_sound",
            "PS " + names(unit, ps.requests) + " misses oracle " + names(unit, oracle.union_req) + where);
    }

    if (failure.empty()) {
      ++report.passed;
    } else {
      if (report.failed == 0) {
        report.first_failing_seed = seed;
        report.first_failure = failure;
        report.counterexample = text;
      }
      ++report.failed;
    }
  }
  report.checks.assign(checks.begin(), checks.end());
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

} // namespace apify
