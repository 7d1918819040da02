#include "apify/oracle.hpp"
#include "apify/serialize.hpp"

#include "doctest.h"
#include "test_support.hpp"

using namespace apify;
using namespace apify::testing;

namespace {

void same_shape(const SourceUnit &a, const SourceUnit &b) {
  CHECK(a.program_id == b.program_id);
  REQUIRE(a.data_items.size() == b.data_items.size());
  for (std::size_t i = 0; i < a.data_items.size(); ++i) {
    const auto &x = a.data_items[i];
    const auto &y = b.data_items[i];
    INFO(x.name);
    CHECK(x.name == y.name);
    CHECK(x.level == y.level);
    CHECK(x.picture == y.picture);
    CHECK(x.section == y.section);
    CHECK(x.parent == y.parent);
    CHECK(x.byte_offset == y.byte_offset);
    CHECK(x.byte_size == y.byte_size);
    CHECK(x.occurs == y.occurs);
  }
  REQUIRE(a.statements.size() == b.statements.size());
  for (std::size_t i = 0; i < a.statements.size(); ++i) {
    const auto &x = a.statements[i];
    const auto &y = b.statements[i];
    INFO(x.verb << " at line " << x.line);
    CHECK(x.kind == y.kind);
    CHECK(x.parent == y.parent);
    CHECK(x.paragraph == y.paragraph);
    CHECK(x.reads == y.reads);
    CHECK(x.writes == y.writes);
    CHECK(x.call_target == y.call_target);
  }
  REQUIRE(a.paragraphs.size() == b.paragraphs.size());
  for (std::size_t i = 0; i < a.paragraphs.size(); ++i) CHECK(a.paragraphs[i].name == b.paragraphs[i].name);
}

} // namespace

TEST_CASE("corpus programs survive a serialization round trip") {
  auto ws = load_fixture("minicorpus");
  for (const auto &[id, unit] : ws.units) {
    INFO(id);
    const auto text = serialize(unit);
    const auto again = parse_source(text, {}, ws.inputs.screen_maps);
    same_shape(unit, again);
    CHECK(serialize(again) == text);
  }
}

TEST_CASE("property: generated programs survive a serialization round trip") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto unit = random_program(seed, 30, 10);
    const auto text = serialize(unit);
    INFO(text);
    const auto again = parse_source(text);
    same_shape(unit, again);
    CHECK(serialize(again) == text);
  }
}
