#include "apify/call_graph.hpp"
#include "apify/cfg.hpp"
#include "apify/errors.hpp"
#include "apify/region.hpp"

#include "doctest.h"
#include "test_support.hpp"

#include <algorithm>
#include <random>

using namespace apify;
using namespace apify::testing;

namespace {

using Edge = std::pair<std::size_t, std::size_t>;

std::set<Edge> edges(const Cfg &cfg) {
  std::set<Edge> out;
  for (std::size_t n = 0; n < cfg.node_count(); ++n)
    for (auto s : cfg.successors(StmtId(n))) out.insert({n, index(s)});
  return out;
}

std::map<std::string, SourceUnit> units_of(const std::vector<std::string> &texts) {
  std::map<std::string, SourceUnit> out;
  for (const auto &t : texts) {
    auto u = parse(t);
    out.emplace(u.program_id, std::move(u));
  }
  return out;
}

std::string caller(const std::string &id, const std::vector<std::string> &callees) {
  std::string body;
  for (const auto &c : callees) body += "    CALL '" + c + "'.\n";
  return "IDENTIFICATION DIVISION.\nPROGRAM-ID. " + id + ".\nPROCEDURE DIVISION.\nMAIN.\n" + body + "    GOBACK.\n";
}

} // namespace

TEST_CASE("straight line gives a chain with one exit") {
  auto u = parse(program("01 A PIC X.\n01 B PIC X.", "    MOVE A TO B.\n    MOVE B TO A.\n    DISPLAY A."));
  auto cfg = build_cfg(u);
  CHECK(edges(cfg) == std::set<Edge>{{0, 1}, {1, 2}});
  CHECK(cfg.exits() == std::vector<StmtId>{StmtId(2)});
  CHECK(post_order(cfg) == std::vector<StmtId>{StmtId(2), StmtId(1), StmtId(0)});
}

TEST_CASE("if forms a diamond joining at the follower") {
  auto u = parse(program("01 A PIC 9.\n01 B PIC 9.",
                         "    IF A > 0\n      MOVE 1 TO B\n    ELSE\n      MOVE 2 TO B\n    END-IF.\n    DISPLAY B."));
  auto cfg = build_cfg(u);
  // 0 IF, 1 then-MOVE, 2 else-MOVE, 3 DISPLAY
  CHECK(edges(cfg) == std::set<Edge>{{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  const auto order = post_order(cfg);
  REQUIRE(order.size() == 4);
  CHECK(order.front() == StmtId(3));
  CHECK(order.back() == StmtId(0));
}

TEST_CASE("perform splices enter and return edges") {
  auto u = parse(program("01 A PIC X.\n01 B PIC X.",
                         "    PERFORM PARA-B.\n    DISPLAY A.\n    GOBACK.\nPARA-B.\n    MOVE A TO B."));
  auto cfg = build_cfg(u);
  // 0 PERFORM, 1 DISPLAY, 2 GOBACK, 3 MOVE: enumerated by hand.
  CHECK(edges(cfg) == std::set<Edge>{{0, 3}, {3, 1}, {1, 2}});
  CHECK(cfg.is_exit(StmtId(2)));
  CHECK_FALSE(cfg.is_exit(StmtId(3)));
}

TEST_CASE("perform until loop appears once per node in post-order") {
  auto u = parse(program("01 I PIC 9(2).\n01 S PIC 9(4).",
                         "    MOVE 0 TO I.\n    PERFORM UNTIL I > 5\n      ADD I TO S\n      ADD 1 TO I\n"
                         "    END-PERFORM.\n    DISPLAY S."));
  auto cfg = build_cfg(u);
  auto order = post_order(cfg);
  std::sort(order.begin(), order.end());
  std::vector<StmtId> all;
  for (std::size_t i = 0; i < u.statements.size(); ++i) all.push_back(StmtId(i));
  CHECK(order == all);
  // The loop test has a bypass edge to DISPLAY besides the body.
  CHECK(cfg.successors(StmtId(1)).size() == 2);
}

TEST_CASE("go to jumps to the target paragraph only") {
  auto u = parse(program("01 A PIC X.", "    GO TO FINISH.\n    DISPLAY A.\nFINISH.\n    GOBACK."));
  auto cfg = build_cfg(u);
  CHECK(cfg.successors(StmtId(0)) == std::vector<StmtId>{StmtId(2)});
  CHECK_FALSE(cfg.reachable(StmtId(1)));
  CHECK(u.statements.size() == cfg.node_count());
}

TEST_CASE("unknown perform target") {
  auto u = parse(program("01 A PIC X.", "    PERFORM NOWHERE."));
  CHECK_THROWS_AS(build_cfg(u), UnknownParagraph);
}

TEST_CASE("property: straight-line programs have statements - 1 edges") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = 1 + rng() % 20;
    std::string body;
    for (std::size_t i = 0; i < n; ++i)
      body += (rng() % 2 ? "    MOVE A TO B.\n" : "    ADD 1 TO A.\n");
    auto u = parse(program("01 A PIC 9(4).\n01 B PIC 9(4).", body));
    auto cfg = build_cfg(u);
    CHECK(cfg.edge_count() == n - 1);
  }
}

TEST_CASE("property: predecessors invert successors on the mini-corpus") {
  auto ws = load_fixture("minicorpus");
  for (const auto &[id, unit] : ws.units) {
    auto cfg = build_cfg(unit);
    CHECK(cfg.node_count() == unit.statements.size());
    std::set<Edge> forward = edges(cfg);
    std::set<Edge> backward;
    for (std::size_t n = 0; n < cfg.node_count(); ++n)
      for (auto p : cfg.predecessors(StmtId(n))) backward.insert({index(p), n});
    CHECK(forward == backward);
    for (std::size_t n = 0; n < cfg.node_count(); ++n)
      CHECK((cfg.successors(StmtId(n)).empty() == cfg.is_exit(StmtId(n))));
  }
}

TEST_CASE("call graph chain and cycle") {
  auto chain = build_call_graph(units_of({caller("A", {"B"}), caller("B", {"C"}), caller("C", {})}));
  CHECK(chain.edges.size() == 2);
  CHECK(chain.cycles.empty());

  auto cyc = build_call_graph(units_of({caller("A", {"B"}), caller("B", {"A"})}));
  CHECK(cyc.cycles == std::vector<std::vector<std::string>>{{"A", "B"}});

  auto self = build_call_graph(units_of({caller("A", {"A"})}));
  CHECK(self.cycles == std::vector<std::vector<std::string>>{{"A"}});
}

TEST_CASE("call graph of the inquiry chain") {
  auto ws = load_fixture("minicorpus");
  CHECK(ws.graph.callees("LGTESTP1") ==
        std::vector<std::string>{"LGAPDB01", "LGDPDB01", "LGICDB01", "LGIPOL01", "LGUPDB01"});
  CHECK(ws.graph.callees("LGIPOL01") == std::vector<std::string>{"LGIPDB01"});
  for (const auto &e : ws.graph.edges) {
    const auto kind = ws.units.at(e.caller).stmt(e.call_site).kind;
    CHECK((kind == StmtKind::call || kind == StmtKind::cics_link));
  }
}

TEST_CASE("dynamic and missing callees are unresolved") {
  auto units = units_of({"IDENTIFICATION DIVISION.\nPROGRAM-ID. A.\nDATA DIVISION.\nWORKING-STORAGE SECTION.\n"
                         "01 TARGET PIC X(8).\nPROCEDURE DIVISION.\nMAIN.\n    CALL TARGET.\n    CALL 'GONE'.\n"
                         "    GOBACK.\n"});
  auto g = build_call_graph(units);
  CHECK(g.edges.empty());
  REQUIRE(g.unresolved.size() == 2);
  CHECK(g.unresolved[0].dynamic);
  CHECK(g.unresolved[1].target == "GONE");
}

TEST_CASE("property: cycles match a transitive-closure check") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    std::vector<std::string> texts;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::string> callees;
      for (std::size_t j = 0; j < n; ++j)
        if (rng() % 4 == 0) {
          callees.push_back("P" + std::to_string(j));
          reach[i][j] = true;
        }
      texts.push_back(caller("P" + std::to_string(i), callees));
    }
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (reach[i][k] && reach[k][j]) reach[i][j] = true;
    std::set<std::set<std::string>> expected;
    for (std::size_t i = 0; i < n; ++i) {
      if (!reach[i][i]) continue;
      std::set<std::string> scc;
      for (std::size_t j = 0; j < n; ++j)
        if (i == j || (reach[i][j] && reach[j][i])) scc.insert("P" + std::to_string(j));
      expected.insert(scc);
    }
    auto g = build_call_graph(units_of(texts));
    std::set<std::set<std::string>> got;
    for (const auto &c : g.cycles) got.insert({c.begin(), c.end()});
    CHECK(got == expected);
  }
}

TEST_CASE("components list callees before callers") {
  auto g = build_call_graph(units_of({caller("A", {"B"}), caller("B", {"C"}), caller("C", {})}));
  const auto comps = g.components();
  REQUIRE(comps.size() == 3);
  CHECK(comps[0] == std::vector<std::string>{"C"});
  CHECK(comps[2] == std::vector<std::string>{"A"});
}

TEST_CASE("property: region statements are exactly those starting in range") {
  auto ws = load_fixture("minicorpus");
  std::mt19937_64 rng(3);
  for (const auto &[id, unit] : ws.units) {
    const int last = unit.statements.back().end_line;
    for (int trial = 0; trial < 30; ++trial) {
      const int p = unit.procedure_line + static_cast<int>(rng() % static_cast<unsigned>(last - unit.procedure_line + 1));
      const int q = p + static_cast<int>(rng() % 10);
      std::vector<StmtId> expected;
      for (const auto &st : unit.statements)
        if (st.line >= p && st.line <= q) expected.push_back(st.id);
      if (expected.empty()) {
        CHECK_THROWS_AS(make_region(unit, p, q), InvalidRegion);
        continue;
      }
      CHECK(make_region(unit, p, q).statements == expected);
    }
  }
  CHECK_THROWS_AS(make_region(ws.units.at("LGIPOL01"), 9, 8), InvalidRegion);
}

TEST_CASE("dot renderings name every node") {
  auto ws = load_fixture("minicorpus");
  const auto dot = to_dot(ws.graph);
  CHECK(dot.find("LGIPOL01") != std::string::npos);
  CHECK(dot.rfind("digraph", 0) == 0);
  const auto cfg_dot = to_dot(build_cfg(ws.units.at("LGIPOL01")));
  CHECK(cfg_dot.find("MOVE") != std::string::npos);
}
