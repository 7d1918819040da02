#include "apify/oracle.hpp"

#include "doctest.h"
#include "test_support.hpp"

#include <fstream>
#include <sstream>

using namespace apify;
using namespace apify::testing;

namespace {

std::string slurp(const std::string &path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

} // namespace

TEST_CASE("generator output is pinned") {
  CHECK(random_program_text(0, 1, 10) == slurp(fixture("golden/seed0-size1.cbl")));
  CHECK(random_program_text(42, 30, 10) == slurp(fixture("golden/seed42-size30.cbl")));
}

TEST_CASE("property: generator is deterministic and sized exactly") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t size = 1 + seed % 40;
    const auto text = random_program_text(seed, size, 8);
    CHECK(text == random_program_text(seed, size, 8));
    CHECK(parse_source(text).statements.size() == size);
  }
  CHECK(random_program_text(1) != random_program_text(2));
}

TEST_CASE("oracle evaluates each path on its own") {
  auto u = parse(program("01 A PIC 9(4).\n01 B PIC 9(4).\n01 C PIC 9(4).",
                         "    IF A > 0\n      MOVE 1 TO B\n    ELSE\n      MOVE C TO A\n    END-IF.\n"
                         "    DISPLAY B.\n    GOBACK."));
  const auto cfg = build_cfg(u);
  const auto sets = local_use_def(u);
  const RegionScope scope(cfg, whole_program_region(u));
  const auto paths = enumerate_paths(scope, sets);
  REQUIRE(paths.paths.size() == 2);
  CHECK_FALSE(paths.pruned_branch);
  const auto r = oracle_signature(paths.paths, sets);
  // then-path: IF MOVE DISPLAY GOBACK; else-path: IF MOVE DISPLAY GOBACK.
  CHECK(names(u, r.per_path[0].requests) == std::set<std::string>{"A"});
  CHECK(names(u, r.per_path[0].responses) == std::set<std::string>{"B"});
  CHECK(names(u, r.per_path[1].requests) == std::set<std::string>{"A", "B", "C"});
  CHECK(names(u, r.per_path[1].responses) == std::set<std::string>{"A"});
  CHECK(names(u, r.union_req) == std::set<std::string>{"A", "B", "C"});
  CHECK(names(u, r.union_resp) == std::set<std::string>{"A", "B"});
}

TEST_CASE("loops are cut at the unroll bound") {
  auto u = parse(program("01 I PIC 9(4).\n01 S PIC 9(4).",
                         "    PERFORM UNTIL I > 5\n      ADD I TO S\n    END-PERFORM.\n    DISPLAY S."));
  const auto cfg = build_cfg(u);
  const RegionScope scope(cfg, whole_program_region(u));
  const auto sets = local_use_def(u);
  for (std::size_t bound : {0u, 1u, 3u}) {
    const auto e = enumerate_paths(scope, sets, bound);
    // Exit after 0..bound iterations, plus one path cut inside the loop.
    CHECK(e.paths.size() == bound + 2);
    std::size_t truncated = 0;
    for (const auto &p : e.paths) {
      truncated += p.truncated ? 1 : 0;
      CHECK(p.loop_unroll_bound == bound);
      std::map<std::size_t, std::size_t> count;
      for (auto s : p.statements) ++count[index(s)];
      for (const auto &[_, n] : count) CHECK(n <= bound + 1);
    }
    CHECK(truncated == 1);
  }
}

TEST_CASE("verify passes on a seed range") {
  VerifyOptions o;
  o.first_seed = 0;
  o.last_seed = 150;
  const auto r = verify(o);
  CHECK(r.passed == 150);
  CHECK(r.failed == 0);
  CHECK(r.first_failure.empty());
  for (const auto &[name, n] : r.checks) CHECK_MESSAGE(n > 0, name);
}

TEST_CASE("verify catches a corrupted analysis") {
  VerifyOptions o;
  o.first_seed = 0;
  o.last_seed = 50;
  o.corrupt_kill = true;
  const auto r = verify(o);
  CHECK(r.failed > 0);
  CHECK_FALSE(r.first_failure.empty());
  CHECK(r.counterexample == random_program_text(r.first_failing_seed, o.size, o.vars));
}
