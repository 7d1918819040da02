#include "apify/discovery.hpp"

#include "apify/errors.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>
#include <tuple>

namespace apify {

std::string_view to_string(SeedKind k) {
  switch (k) {
  case SeedKind::transaction:
    return "transaction";
  case SeedKind::control_flow_block:
    return "control_flow_block";
  case SeedKind::data_access:
    return "data_access";
  case SeedKind::procedure:
    return "procedure";
  case SeedKind::screen:
    return "screen";
  case SeedKind::inter_program_call:
    return "inter_program_call";
  case SeedKind::user_region:
    return "user_region";
  }
  return "user_region";
}

std::optional<SeedKind> parse_seed_kind(std::string_view text) {
  for (auto k : {SeedKind::transaction, SeedKind::control_flow_block, SeedKind::data_access, SeedKind::procedure,
                 SeedKind::screen, SeedKind::inter_program_call, SeedKind::user_region})
    if (to_string(k) == text) return k;
  return std::nullopt;
}

std::string slug(std::string_view text) {
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c))
      out.push_back(static_cast<char>(std::tolower(c)));
    else if (!out.empty() && out.back() != '-')
      out.push_back('-');
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out;
}

namespace {

std::map<std::string, std::string> parse_pairs(std::string_view text, const char *what) {
  std::map<std::string, std::string> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream words(raw);
    std::vector<std::string> w;
    for (std::string s; words >> s;) w.push_back(s);
    if (w.empty()) continue;
    if (w.size() != 2)
      throw ConfigError(std::string(what) + " line " + std::to_string(line) + ": expected two words");
    std::transform(w[0].begin(), w[0].end(), w[0].begin(), [](unsigned char c) { return std::toupper(c); });
    if (!out.emplace(w[0], w[1]).second)
      throw ConfigError(std::string(what) + " line " + std::to_string(line) + ": duplicate " + w[0]);
  }
  return out;
}

std::string_view verb(HttpMethod m) {
  switch (m) {
  case HttpMethod::get:
    return "get";
  case HttpMethod::post:
    return "create";
  case HttpMethod::put:
    return "update";
  case HttpMethod::del:
    return "delete";
  }
  return "get";
}

bool is_data_op(const Statement &st) {
  return st.sql.has_value() || st.kind == StmtKind::file_read || st.kind == StmtKind::file_write;
}

bool is_load(const Statement &st) {
  return st.kind == StmtKind::move || st.kind == StmtKind::arithmetic || st.kind == StmtKind::initialize;
}

/// Visits every statement list: paragraph bodies and all nested blocks.
void for_each_block(const SourceUnit &unit, const std::function<void(const std::vector<StmtId> &)> &f) {
  for (const auto &p : unit.paragraphs) f(p.statements);
  for (const auto &st : unit.statements) {
    if (!st.then_block.empty()) f(st.then_block);
    if (!st.else_block.empty()) f(st.else_block);
    if (!st.body.empty()) f(st.body);
    for (const auto &arm : st.arms)
      if (!arm.body.empty()) f(arm.body);
  }
}

int block_end(const SourceUnit &unit, const std::vector<StmtId> &block) {
  int end = 0;
  for (auto s : block) end = std::max(end, unit.stmt(s).end_line);
  return end;
}

class Discoverer {
public:
  Discoverer(Analyzer &analyzer, const std::map<std::string, SourceUnit> &units, const CallGraph &graph,
             const DiscoveryInputs &inputs)
      : analyzer_(analyzer), units_(units), graph_(graph), inputs_(inputs) {}

  std::vector<ApiCandidate> run() {
    transactions();
    for (const auto &[_, unit] : units_) {
      data_access(unit);
      procedures(unit);
    }
    screens();
    calls();
    for (const auto &u : inputs_.user_regions)
      add(SeedKind::user_region, u.region, "user-declared region",
          u.name.empty() ? std::string() : u.name);

    std::sort(out_.begin(), out_.end(), [](const ApiCandidate &a, const ApiCandidate &b) {
      return std::tuple(a.region.program, a.region.start_line, a.region.end_line, a.seed_kind) <
             std::tuple(b.region.program, b.region.start_line, b.region.end_line, b.seed_kind);
    });
    std::map<std::string, int> used;
    for (auto &c : out_) {
      const auto n = ++used[c.suggested_name];
      if (n > 1) c.suggested_name += "-" + std::to_string(n);
    }
    return std::move(out_);
  }

private:
  void add(SeedKind kind, CodeRegion region, std::string evidence, std::string base) {
    const auto key = std::tuple(kind, region.program, region.start_line, region.end_line);
    if (!seen_.insert(key).second) return;
    ApiCandidate c;
    c.seed_kind = kind;
    c.method = analyzer_.method(region, true);
    if (kind == SeedKind::user_region && !base.empty())
      c.suggested_name = base;
    else
      c.suggested_name = slug(std::string(verb(c.method)) + "-" + base);
    c.region = std::move(region);
    c.evidence = std::move(evidence);
    out_.push_back(std::move(c));
  }

  void transactions() {
    for (const auto &[txn, program] : inputs_.transactions) {
      auto it = units_.find(program);
      if (it == units_.end()) throw UnknownTransactionProgram(txn);
      const auto &unit = it->second;
      if (unit.statements.empty()) continue;
      const Statement *dispatch = nullptr;
      for (const auto &st : unit.statements)
        if (st.kind == StmtKind::evaluate_when) {
          dispatch = &st;
          break;
        }
      int first = 0;
      int last = 0;
      if (dispatch)
        for (const auto &arm : dispatch->arms) {
          if (arm.body.empty()) continue;
          const int start = unit.stmt(arm.body.front()).line;
          first = first == 0 ? start : std::min(first, start);
          last = std::max(last, block_end(unit, arm.body));
        }
      if (first == 0) {
        add(SeedKind::transaction, whole_program_region(unit),
            "transaction " + txn + " enters " + program + "; no dispatch EVALUATE, whole procedure division", txn);
        continue;
      }
      add(SeedKind::transaction, make_region(unit, first, last),
          "transaction " + txn + " enters " + program + "; dispatch EVALUATE at line " +
              std::to_string(dispatch->line),
          txn);
      for (std::size_t a = 0; a < dispatch->arms.size(); ++a) {
        const auto &arm = dispatch->arms[a];
        if (arm.body.empty()) continue;
        std::string label = "arm-" + std::to_string(a + 1);
        if (arm.other)
          label = "other";
        else if (!arm.choices.empty() && arm.choices.front().kind == WhenChoice::Kind::value &&
                 arm.choices.front().value.kind == Operand::Kind::literal)
          label = arm.choices.front().value.literal.text;
        add(SeedKind::control_flow_block,
            make_region(unit, unit.stmt(arm.body.front()).line, block_end(unit, arm.body)),
            "WHEN arm at line " + std::to_string(arm.line) + " of the " + txn + " dispatch",
            program + "-when-" + label);
      }
    }
  }

  void data_access(const SourceUnit &unit) {
    const auto sqlcode = unit.find_item("SQLCODE");
    auto is_check = [&](const Statement &st) {
      return (st.kind == StmtKind::if_ || st.kind == StmtKind::evaluate_when) && sqlcode && st.reads.contains(*sqlcode);
    };
    for_each_block(unit, [&](const std::vector<StmtId> &block) {
      const auto n = block.size();
      std::vector<bool> marked(n, false);
      for (std::size_t i = 0; i < n; ++i) {
        if (!is_data_op(unit.stmt(block[i]))) continue;
        marked[i] = true;
        for (std::size_t j = i; j-- > 0 && !marked[j] && is_load(unit.stmt(block[j]));) marked[j] = true;
        for (std::size_t k = i + 1; k < n && is_check(unit.stmt(block[k])); ++k) marked[k] = true;
      }
      for (std::size_t i = 0; i < n;) {
        if (!marked[i]) {
          ++i;
          continue;
        }
        auto j = i;
        std::set<std::string> targets;
        while (j < n && marked[j]) {
          const auto &st = unit.stmt(block[j]);
          if (st.sql)
            for (const auto &t : st.sql->tables) targets.insert(t);
          if (st.kind == StmtKind::file_read || st.kind == StmtKind::file_write) targets.insert(st.file);
          ++j;
        }
        std::vector<StmtId> run(block.begin() + static_cast<std::ptrdiff_t>(i), block.begin() + static_cast<std::ptrdiff_t>(j));
        std::string what;
        for (const auto &t : targets) what += (what.empty() ? "" : "-") + t;
        const auto &para = unit.paragraphs[unit.stmt(run.front()).paragraph].name;
        add(SeedKind::data_access, make_region(unit, unit.stmt(run.front()).line, block_end(unit, run)),
            "data access on " + (what.empty() ? std::string("SQL") : what) + " in paragraph " + para,
            unit.program_id + "-" + (what.empty() ? std::string("data") : what));
        i = j;
      }
    });
  }

  void procedures(const SourceUnit &unit) {
    for (std::size_t p = 0; p < unit.paragraphs.size(); ++p) {
      const auto &para = unit.paragraphs[p];
      if (para.statements.empty()) continue;
      bool performs = false;
      for (const auto &st : unit.statements)
        if (st.paragraph == p && st.kind == StmtKind::perform && st.perform && st.perform->target) performs = true;
      if (performs) continue;
      add(SeedKind::procedure,
          make_region(unit, unit.stmt(para.statements.front()).line, block_end(unit, para.statements)),
          "paragraph " + para.name + " performs no other paragraph", unit.program_id + "-" + para.name);
    }
  }

  void screens() {
    auto maps = inputs_.screen_maps;
    std::sort(maps.begin(), maps.end(), [](const ScreenMap &a, const ScreenMap &b) { return a.name < b.name; });
    for (const auto &map : maps) {
      bool found = false;
      for (const auto &[_, unit] : units_) {
        for (const auto &st : unit.statements) {
          if (st.kind != StmtKind::cics_receive_map || !st.cics || st.cics->map != map.name) continue;
          const auto &para = unit.paragraphs[st.paragraph];
          add(SeedKind::screen,
              make_region(unit, unit.stmt(para.statements.front()).line, block_end(unit, para.statements)),
              "RECEIVE MAP " + map.name + " at line " + std::to_string(st.line) + " in paragraph " + para.name,
              map.name + "-screen");
          found = true;
          break;
        }
        if (found) break;
      }
    }
  }

  void calls() {
    for (const auto &e : graph_.edges) {
      auto a = inputs_.partitions.find(e.caller);
      auto b = inputs_.partitions.find(e.callee);
      if (a == inputs_.partitions.end() || b == inputs_.partitions.end() || a->second == b->second) continue;
      const auto &unit = units_.at(e.caller);
      const auto &st = unit.stmt(e.call_site);
      add(SeedKind::inter_program_call, make_region(unit, st.line, st.end_line),
          "call from partition " + a->second + " to partition " + b->second,
          e.caller + "-to-" + e.callee);
    }
  }

  Analyzer &analyzer_;
  const std::map<std::string, SourceUnit> &units_;
  const CallGraph &graph_;
  const DiscoveryInputs &inputs_;
  std::vector<ApiCandidate> out_;
  std::set<std::tuple<SeedKind, std::string, int, int>> seen_;
};

} // namespace

std::map<std::string, std::string> parse_transaction_table(std::string_view text) {
  auto table = parse_pairs(text, "transaction table");
  for (auto &[_, program] : table)
    std::transform(program.begin(), program.end(), program.begin(), [](unsigned char c) { return std::toupper(c); });
  return table;
}

std::map<std::string, std::string> parse_partitions(std::string_view text) { return parse_pairs(text, "partition file"); }

std::vector<ApiCandidate> discover_candidates(Analyzer &analyzer, const std::map<std::string, SourceUnit> &units,
                                              const CallGraph &graph, const DiscoveryInputs &inputs) {
  return Discoverer(analyzer, units, graph, inputs).run();
}

ApiCandidate dynamic_query_candidate(const SourceUnit &unit) {
  const bool has_sql = std::any_of(unit.statements.begin(), unit.statements.end(),
                                   [](const Statement &st) { return st.sql.has_value(); });
  if (!has_sql) throw NoDataAccess(unit.program_id);
  ApiCandidate c;
  c.seed_kind = SeedKind::data_access;
  c.region = whole_program_region(unit);
  c.suggested_name = slug(unit.program_id) + "-dynamic-query";
  c.evidence = "dynamic query layer";
  // Arbitrary statements may change data, so the endpoint never claims to be safe.
  c.method = HttpMethod::post;
  c.fixed_signature = true;
  c.fixed_requests = {{"QUERY-TEXT", "X(1024)", 1024}};
  c.fixed_responses = {{"RESULT-ROWS", "X(4096)", 4096}, {"SQLCODE", "S9(9)", 9}};
  return c;
}

} // namespace apify
