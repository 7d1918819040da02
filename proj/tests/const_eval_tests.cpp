#include "apify/cfg.hpp"
#include "apify/const_eval.hpp"
#include "apify/oracle.hpp"
#include "apify/region.hpp"
#include "apify/use_def.hpp"

#include "doctest.h"
#include "test_support.hpp"

#include <random>

using namespace apify;
using namespace apify::testing;

namespace {

Literal num(const std::string &t) { return {Literal::Kind::numeric, t}; }
Literal alnum(const std::string &t) { return {Literal::Kind::alphanumeric, t}; }

std::set<std::size_t> targets(const std::vector<std::pair<StmtId, ConstEnv>> &succ) {
  std::set<std::size_t> out;
  for (const auto &[s, _] : succ) out.insert(index(s));
  return out;
}

/// Runs `prefix` statements through the environment, then asks for the
/// feasible successors of statement `node`.
std::set<std::size_t> feasible_after(const SourceUnit &u, std::size_t prefix, std::size_t node) {
  const auto cfg = build_cfg(u);
  const auto sets = local_use_def(u);
  ConstEnv env(u);
  for (std::size_t i = 0; i < prefix; ++i) env.apply(u.stmt(StmtId(i)), sets.kill(StmtId(i)));
  return targets(env.feasible_successors(cfg, StmtId(node)));
}

} // namespace

TEST_CASE("property: numeric literal ordering matches integer ordering") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const long long a = static_cast<long long>(rng() % 2001) - 1000;
    const long long b = static_cast<long long>(rng() % 2001) - 1000;
    const auto x = num(std::to_string(a));
    const auto y = num(std::to_string(b));
    CHECK(compare_literals(x, RelOp::lt, y) == (a < b ? Truth::yes : Truth::no));
    CHECK(compare_literals(x, RelOp::ge, y) == (a >= b ? Truth::yes : Truth::no));
    CHECK(compare_literals(x, RelOp::eq, y) == (a == b ? Truth::yes : Truth::no));
    CHECK(compare_literals(x, RelOp::ne, y) == (a != b ? Truth::yes : Truth::no));
  }
}

TEST_CASE("alphanumeric comparison is equality after trailing spaces") {
  CHECK(compare_literals(alnum("AB "), RelOp::eq, alnum("AB")) == Truth::yes);
  CHECK(compare_literals(alnum("AB"), RelOp::ne, alnum("AC")) == Truth::yes);
  CHECK(compare_literals(alnum("AB"), RelOp::lt, alnum("AC")) == Truth::unknown);
  CHECK(compare_literals({Literal::Kind::space, ""}, RelOp::eq, alnum("   ")) == Truth::yes);
  CHECK(compare_literals({Literal::Kind::zero, ""}, RelOp::eq, alnum("000")) == Truth::yes);
  CHECK(compare_literals({Literal::Kind::zero, ""}, RelOp::eq, alnum("010")) == Truth::no);
  CHECK(compare_literals({Literal::Kind::zero, ""}, RelOp::eq, num("0")) == Truth::yes);
  CHECK(compare_literals({Literal::Kind::high_value, ""}, RelOp::eq, alnum("A")) == Truth::unknown);
}

TEST_CASE("literal moves decide later conditions") {
  auto u = parse(program("01 A PIC 9(2).\n01 B PIC X(4).",
                         "    MOVE 7 TO A.\n    IF A = 7\n      MOVE 'X' TO B\n    ELSE\n      MOVE 'Y' TO B\n"
                         "    END-IF."));
  // 0 MOVE, 1 IF, 2 then, 3 else
  CHECK(feasible_after(u, 1, 1) == std::set<std::size_t>{2});
  CHECK(feasible_after(u, 0, 1) == std::set<std::size_t>{2, 3});
}

TEST_CASE("values that do not fit the picture are not tracked") {
  auto u = parse(program("01 A PIC 9(2).", "    MOVE 123 TO A.\n    IF A = 123\n      DISPLAY A\n    END-IF.\n    GOBACK."));
  CHECK(feasible_after(u, 1, 1).size() == 2);
  auto v = parse(program("01 A PIC 9(2).", "    MOVE -1 TO A.\n    IF A = -1\n      DISPLAY A\n    END-IF.\n    GOBACK."));
  CHECK(feasible_after(v, 1, 1).size() == 2);
}

TEST_CASE("any overlapping write forgets a value") {
  auto u = parse(program("01 G.\n   03 A PIC 9(2).\n   03 B PIC 9(2).\n01 C PIC X(4).",
                         "    MOVE 5 TO A.\n    MOVE C TO G.\n    IF A = 5\n      DISPLAY A\n    END-IF.\n    GOBACK."));
  CHECK(feasible_after(u, 1, 2).size() == 1);
  CHECK(feasible_after(u, 2, 2).size() == 2);
}

TEST_CASE("evaluate prunes arms against a known subject") {
  auto u = parse(program("01 A PIC X(1).\n01 B PIC X(1).",
                         "    MOVE '2' TO A.\n    EVALUATE A\n      WHEN '1' MOVE 'P' TO B\n      WHEN '2' MOVE 'Q' TO B\n"
                         "      WHEN OTHER MOVE 'R' TO B\n    END-EVALUATE."));
  // 0 MOVE, 1 EVALUATE, 2/3/4 arm bodies
  CHECK(feasible_after(u, 1, 1) == std::set<std::size_t>{3});
  CHECK(feasible_after(u, 0, 1) == std::set<std::size_t>{2, 3, 4});
}

TEST_CASE("branch outcomes refine the environment") {
  auto u = parse(program("01 A PIC X(1).\n01 B PIC X(1).",
                         "    IF A = '1'\n      MOVE 'P' TO B\n    END-IF.\n    IF A = '1'\n      MOVE 'Q' TO B\n"
                         "    END-IF.\n    DISPLAY B."));
  // 0 IF, 1 MOVE, 2 IF, 3 MOVE, 4 DISPLAY
  const auto cfg = build_cfg(u);
  ConstEnv env(u);
  const auto first = env.feasible_successors(cfg, StmtId(0));
  REQUIRE(first.size() == 2);
  for (const auto &[target, branch] : first) {
    const auto second = targets(branch.feasible_successors(cfg, StmtId(2)));
    if (target == StmtId(1))
      CHECK(second == std::set<std::size_t>{3});
    else
      CHECK(second == std::set<std::size_t>{4});
  }
}

TEST_CASE("joined branches keep only common facts") {
  auto u = parse(program("01 A PIC X(1).", "    MOVE 'X' TO A.\n    IF A = 'X'\n      CONTINUE\n    END-IF."));
  ConstEnv a(u);
  ConstEnv b(u);
  const auto sets = local_use_def(u);
  a.apply(u.stmt(StmtId(0)), sets.kill(StmtId(0)));
  REQUIRE(a.value(*u.find_item("A")).has_value());
  a.meet(b);
  CHECK_FALSE(a.value(*u.find_item("A")).has_value());
}

TEST_CASE("correlated evaluates leave two feasible paths") {
  auto ws = load_fixture("worked");
  const auto &u = ws.units.at("DEMO2");
  const auto cfg = build_cfg(u);
  const auto region = make_region(u, 10, 19);
  const RegionScope scope(cfg, region);
  const auto paths = enumerate_paths(scope, local_use_def(u));
  CHECK(paths.paths.size() == 2);
  CHECK(paths.pruned_branch);
}
