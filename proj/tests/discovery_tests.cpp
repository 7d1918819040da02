#include "apify/discovery.hpp"
#include "apify/errors.hpp"

#include "doctest.h"
#include "test_support.hpp"

#include <json.hpp>

#include <fstream>
#include <tuple>

using namespace apify;
using namespace apify::testing;

namespace {

using Key = std::tuple<std::string, std::string, int, int>;

Key key_of(const ApiCandidate &c) {
  return {std::string(to_string(c.seed_kind)), c.region.program, c.region.start_line, c.region.end_line};
}

nlohmann::json manifest() {
  std::ifstream in(fixture("minicorpus/manifest.json"));
  return nlohmann::json::parse(in);
}

std::vector<ApiCandidate> discover(Workspace &ws) {
  Analyzer analyzer(ws.units, ws.graph);
  return discover_candidates(analyzer, ws.units, ws.graph, ws.inputs);
}

} // namespace

TEST_CASE("every planted API is found and nothing else") {
  auto ws = load_fixture("minicorpus");
  const auto found = discover(ws);
  std::map<Key, std::string> got;
  for (const auto &c : found) got[key_of(c)] = c.suggested_name;
  std::map<Key, std::string> planted;
  const auto doc = manifest();
  for (const auto &p : doc.at("planted"))
    planted[Key{p.at("seed_kind").get<std::string>(), p.at("program").get<std::string>(),
                p.at("start_line").get<int>(), p.at("end_line").get<int>()}] = p.at("name").get<std::string>();
  for (const auto &[k, name] : planted) {
    INFO(std::get<0>(k) << " " << std::get<1>(k) << " " << std::get<2>(k) << "-" << std::get<3>(k));
    REQUIRE(got.count(k) == 1);
    CHECK(got.at(k) == name);
  }
  CHECK(planted.size() == 33);
  CHECK(got.size() == planted.size());
}

TEST_CASE("candidates are ordered and uniquely named") {
  auto ws = load_fixture("minicorpus");
  const auto found = discover(ws);
  std::set<std::string> seen;
  for (std::size_t i = 0; i < found.size(); ++i) {
    CHECK(seen.insert(found[i].suggested_name).second);
    if (i == 0) continue;
    const auto &a = found[i - 1].region;
    const auto &b = found[i].region;
    CHECK(std::tie(a.program, a.start_line, a.end_line) <= std::tie(b.program, b.start_line, b.end_line));
  }
}

TEST_CASE("every seed kind is represented") {
  auto ws = load_fixture("minicorpus");
  std::set<SeedKind> kinds;
  for (const auto &c : discover(ws)) kinds.insert(c.seed_kind);
  for (auto k : {SeedKind::transaction, SeedKind::control_flow_block, SeedKind::data_access, SeedKind::procedure,
                 SeedKind::screen, SeedKind::inter_program_call, SeedKind::user_region})
    CHECK_MESSAGE(kinds.count(k) == 1, to_string(k));
}

TEST_CASE("user regions keep their chosen name") {
  auto ws = load_fixture("minicorpus");
  bool found = false;
  for (const auto &c : discover(ws))
    if (c.seed_kind == SeedKind::user_region) {
      CHECK(c.suggested_name == "render-policy");
      CHECK(c.region.start_line == 43);
      CHECK(c.region.end_line == 46);
      found = true;
    }
  CHECK(found);
}

TEST_CASE("table files") {
  auto t = parse_transaction_table("# comment\nssp1 lgtestp1  # trailing\n\nABCD PROG\n");
  CHECK(t == std::map<std::string, std::string>{{"ABCD", "PROG"}, {"SSP1", "LGTESTP1"}});
  CHECK_THROWS_AS(parse_transaction_table("ONLYONE\n"), ConfigError);
  CHECK_THROWS_AS(parse_transaction_table("A B C\n"), ConfigError);
  CHECK_THROWS_AS(parse_transaction_table("A P\nA Q\n"), ConfigError);
  CHECK(parse_partitions("LGTESTP1 presentation\n").at("LGTESTP1") == "presentation");
}

TEST_CASE("a transaction naming an absent program is an error") {
  auto ws = load_fixture("minicorpus");
  ws.inputs.transactions["ZZZZ"] = "NOPROG";
  CHECK_THROWS_AS(discover(ws), UnknownTransactionProgram);
}

TEST_CASE("dynamic query layer") {
  auto ws = load_fixture("minicorpus");
  const auto c = dynamic_query_candidate(ws.units.at("LGIPDB01"));
  CHECK(c.fixed_signature);
  CHECK(c.seed_kind == SeedKind::data_access);
  CHECK(c.suggested_name == "lgipdb01-dynamic-query");
  CHECK(c.method == HttpMethod::post);
  CHECK_FALSE(c.fixed_requests.empty());
  CHECK_THROWS_AS(dynamic_query_candidate(ws.units.at("LGTESTC1")), NoDataAccess);
}

TEST_CASE("slugs") {
  CHECK(slug("GET LGTESTP1 when 1") == "get-lgtestp1-when-1");
  CHECK(slug("  A--B__c ") == "a-b-c");
}
