#include "apify/discovery.hpp"
#include "apify/errors.hpp"
#include "apify/refactor.hpp"

#include "doctest.h"
#include "test_support.hpp"

using namespace apify;
using namespace apify::testing;

namespace {

struct Corpus {
  Workspace ws = load_fixture("minicorpus");
  Analyzer analyzer{ws.units, ws.graph};
  std::vector<ApiCandidate> candidates = discover_candidates(analyzer, ws.units, ws.graph, ws.inputs);

  const ApiCandidate &api(const std::string &name) const {
    for (const auto &c : candidates)
      if (c.suggested_name == name) return c;
    throw std::out_of_range(name);
  }

  ApiSignature signature(const CodeRegion &region) {
    AnalysisOptions o;
    o.variant = {Flow::fs, false};
    o.post_context_auto = true;
    return analyzer.signature(region, o);
  }

  std::vector<RefactorSuggestion> report(const std::string &name) {
    const auto &c = api(name);
    return refactor_report(ws.units.at(c.region.program), c.region, signature(c.region));
  }
};

std::vector<const RefactorSuggestion *> of_kind(const std::vector<RefactorSuggestion> &all, SuggestionKind k) {
  std::vector<const RefactorSuggestion *> out;
  for (const auto &s : all)
    if (s.kind == k) out.push_back(&s);
  return out;
}

/// Qualified names the slice must hold: each copybook field and its ancestors.
std::set<std::string> expected_slice(const SourceUnit &u, const std::vector<FieldRole> &fields) {
  std::set<std::string> out;
  for (const auto &f : fields) {
    if (!u.item(f.item).copybook) continue;
    for (std::optional<ItemId> i = f.item; i; i = u.item(*i).parent) out.insert(u.qualified_name(*i));
  }
  return out;
}

} // namespace

TEST_CASE("property: every slice re-parses to exactly the signature fields and their groups") {
  Corpus corpus;
  std::size_t slices = 0;
  for (const auto &c : corpus.candidates) {
    const auto &u = corpus.ws.units.at(c.region.program);
    const auto sig = corpus.signature(c.region);
    for (const auto &[fields, role] : {std::pair{&sig.requests, "request"}, std::pair{&sig.responses, "response"}}) {
      INFO(c.suggested_name << " " << role);
      const auto expected = expected_slice(u, *fields);
      if (expected.empty()) {
        CHECK_THROWS_AS(slice_copybook(u, *fields, role), EmptySlice);
        continue;
      }
      const auto slice = slice_copybook(u, *fields, role);
      const auto parsed = parse_copybook(slice.text);
      std::set<std::string> got;
      for (std::size_t i = 0; i < parsed.data_items.size(); ++i) got.insert(parsed.qualified_name(ItemId(i)));
      CHECK(got == expected);
      for (const auto &f : *fields) {
        const bool from_copybook = u.item(f.item).copybook.has_value();
        const bool skipped =
            std::find(slice.skipped.begin(), slice.skipped.end(), f.qualified_name) != slice.skipped.end();
        CHECK(from_copybook != skipped);
      }
      ++slices;
    }
  }
  CHECK(slices > 20);
}

TEST_CASE("slice levels are renumbered and pictures kept") {
  auto u = parse(program("COPY REC.", "    MOVE B1 TO B2.", "T1"),
                 {{"REC", "01 R.\n   03 G.\n      07 B1 PIC X(3).\n   03 B2 PIC 9(4).\n   03 B3 PIC X.\n"}});
  FieldRole f;
  f.item = *u.find_item("B1");
  f.qualified_name = u.qualified_name(f.item);
  const auto slice = slice_copybook(u, {f}, "request");
  CHECK(slice.text == "01 R.\n    05 G.\n        10 B1 PIC X(3).\n");
}

TEST_CASE("narrowing drops only the unused host variable") {
  Corpus corpus;
  const auto report = corpus.report("get-lgicdb01-customer");
  const auto narrow = of_kind(report, SuggestionKind::narrow_sql);
  REQUIRE(narrow.size() == 1);
  const auto &d = narrow.front()->detail;
  REQUIRE(d.at("droppable").size() == 1);
  CHECK(d.at("droppable")[0].at("host_variable") == "DB2-CUSTOMER.DB2-DOB");
  CHECK(d.at("droppable")[0].at("column") == "DOB");
  CHECK(d.at("keep").size() == 2);
}

TEST_CASE("host variables read later in the region are kept") {
  auto u = parse(program("01 H1 PIC X(4).\n01 H2 PIC X(4).\n01 OUT1 PIC X(4).",
                         "    EXEC SQL SELECT C1, C2 INTO :H1, :H2 FROM T END-EXEC.\n    MOVE H1 TO OUT1.\n"
                         "    GOBACK."));
  const auto region = whole_program_region(u);
  ApiSignature sig;
  sig.response_items.insert(*u.find_item("OUT1"));
  const auto out = refactor_report(u, region, sig);
  const auto narrow = of_kind(out, SuggestionKind::narrow_sql);
  REQUIRE(narrow.size() == 1);
  CHECK(narrow.front()->detail.at("droppable").size() == 1);
  CHECK(narrow.front()->detail.at("droppable")[0].at("host_variable") == "H2");
  sig.response_items.insert(*u.find_item("H2"));
  CHECK(of_kind(refactor_report(u, region, sig), SuggestionKind::narrow_sql).empty());
}

TEST_CASE("terminal commands get guards") {
  Corpus corpus;
  const auto report = corpus.report("get-ssc1");
  const auto guards = of_kind(report, SuggestionKind::guard_terminal_command);
  REQUIRE(guards.size() == 2);
  CHECK(guards[0]->line == 9);
  CHECK(guards[0]->detail.at("command") == "EXEC CICS RECEIVE");
  CHECK(guards[1]->line == 20);
  CHECK(guards[1]->detail.at("map") == "SSMAPC1");
}

TEST_CASE("sanity checks that only display are flagged") {
  Corpus corpus;
  const auto report = corpus.report("get-lgicdb01-main");
  const auto checks = of_kind(report, SuggestionKind::remove_sanity_check_candidate);
  REQUIRE(checks.size() == 1);
  CHECK(checks.front()->line == 15);
}

TEST_CASE("report is ordered by line then kind") {
  Corpus corpus;
  for (const auto &c : corpus.candidates) {
    if (c.fixed_signature) continue;
    const auto out = corpus.report(c.suggested_name);
    for (std::size_t i = 1; i < out.size(); ++i)
      CHECK(std::pair{out[i - 1].line, out[i - 1].kind} <= std::pair{out[i].line, out[i].kind});
  }
}

TEST_CASE("caller mapping pairs argument fields with callee fields") {
  Corpus corpus;
  const auto &caller = corpus.ws.units.at("LGTESTC1");
  const auto &callee = corpus.ws.units.at("LGICDB01");
  const auto &site = caller.stmt(at_line(caller, 13));
  const auto sig = corpus.signature(whole_program_region(callee));
  const auto r = caller_mapping_report(caller, site, callee, sig, "get-lgicdb01-main");
  CHECK(r.detail.at("callee") == "LGICDB01");
  CHECK_FALSE(r.detail.at("degraded").get<bool>());
  bool customer = false;
  for (const auto &m : r.detail.at("request_mapping"))
    customer = customer || (m.at("from") == "DFHCOMMAREA.CA-CUSTOMER-NUM" && m.at("to") == "CA-CUSTOMER-NUM");
  CHECK(customer);
  CHECK(r.detail.at("response_mapping").size() == sig.responses.size());
  CHECK(r.detail.at("invocation").at("path") == "/apis/get-lgicdb01-main");
}

TEST_CASE("extra arguments cannot be bound") {
  auto caller = parse(program("01 X1 PIC X(4).\n01 X2 PIC X(4).", "    CALL 'CALLEE' USING X1 X2.\n    GOBACK.", "CALLER"));
  auto callee = parse("IDENTIFICATION DIVISION.\nPROGRAM-ID. CALLEE.\nDATA DIVISION.\nLINKAGE SECTION.\n"
                      "01 P PIC X(4).\nPROCEDURE DIVISION USING P.\nMAIN.\n    DISPLAY P.\n    GOBACK.\n");
  ApiSignature sig;
  CHECK_THROWS_AS(caller_mapping_report(caller, caller.stmt(StmtId(0)), callee, sig, "callee"), BindingMismatch);
}
