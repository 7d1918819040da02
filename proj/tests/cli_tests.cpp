#include "apify/cli.hpp"

#include "doctest.h"
#include "test_support.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace apify;
using namespace apify::testing;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

const std::string corpus = fixture("minicorpus/apify.json");
const std::string worked = fixture("worked/apify.json");

/// Scratch workspace: src/ with the given files and an apify.json.
class Scratch {
public:
  explicit Scratch(const std::string &tag) : root_(fs::temp_directory_path() / ("apify-cli-" + tag)) {
    fs::remove_all(root_);
    fs::create_directories(root_ / "src");
    std::ofstream(root_ / "apify.json") << R"({"source_dirs": ["src"]})";
  }
  ~Scratch() { fs::remove_all(root_); }

  void add(const std::string &name, const std::string &text) { std::ofstream(root_ / "src" / name) << text; }
  std::string config() const { return (root_ / "apify.json").string(); }
  fs::path root() const { return root_; }

private:
  fs::path root_;
};

} // namespace

TEST_CASE("identify lists candidates as JSON") {
  auto r = run({"--config", corpus, "identify"});
  REQUIRE(r.code == exit_ok);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc.size() == 33);
  CHECK(doc[0].contains("seed_kind"));
}

TEST_CASE("an empty workspace has no candidates") {
  Scratch s("empty");
  auto r = run({"--config", s.config(), "identify"});
  CHECK(r.code == exit_ok);
  CHECK(nlohmann::json::parse(r.out) == nlohmann::json::array());
}

TEST_CASE("frontend errors exit with 2") {
  Scratch s("missing-copybook");
  s.add("P.cbl", program("COPY NOPE.", "    GOBACK.", "P"));
  auto r = run({"--config", s.config(), "identify"});
  CHECK(r.code == exit_frontend);
  CHECK(r.err.find("NOPE") != std::string::npos);
  CHECK(r.out.empty());
}

TEST_CASE("unknown selectors exit with 3") {
  CHECK(run({"--config", corpus, "signature", "--api", "no-such-api"}).code == exit_selector);
  CHECK(run({"--config", corpus, "signature", "--region", "NOPROG:1-2"}).code == exit_selector);
  CHECK(run({"--config", corpus, "signature", "--region", "LGIPOL01:1-2"}).code == exit_selector);
  CHECK(run({"--config", corpus, "signature", "--region", "LGIPOL01"}).code == exit_selector);
  CHECK(run({"--config", worked, "signature", "--region", "DEMO1:10-11", "--post-context", "NOPE"}).code ==
        exit_selector);
}

TEST_CASE("path explosion exits with 4") {
  Scratch s("paths");
  std::string body;
  for (int i = 0; i < 14; ++i) body += "    IF A > " + std::to_string(i) + "\n      MOVE 1 TO B\n    END-IF.\n";
  s.add("P.cbl", program("01 A PIC 9(4).\n01 B PIC 9(4).", body + "    GOBACK.", "P"));
  auto r = run({"--config", s.config(), "signature", "--region", "P:8-60", "--flow", "ps"});
  CHECK(r.code == exit_path_budget);
  CHECK(run({"--config", s.config(), "signature", "--region", "P:8-60", "--flow", "ps", "--ps-bound", "20000"}).code ==
        exit_ok);
}

TEST_CASE("verify reports and fails on the negative control") {
  auto ok = run({"verify", "--seeds", "0..9"});
  CHECK(ok.code == exit_ok);
  CHECK(ok.out.rfind("10 passed, 0 failed", 0) == 0);
  auto bad = run({"verify", "--seeds", "0..9", "--corrupt-kill"});
  CHECK(bad.code == exit_verify);
  CHECK(bad.out.find("counterexample:") != std::string::npos);
  CHECK(run({"verify", "--seeds", "5..4"}).out.rfind("0 passed, 0 failed", 0) == 0);
}

TEST_CASE("configuration problems exit with 1") {
  CHECK(run({"--config", "/nonexistent/apify.json", "identify"}).code == exit_error);
  CHECK(run({"identify"}).code == exit_error);
  CHECK(run({"--config", corpus, "signature", "--api", "get-ssc1", "--flow", "xx"}).code == exit_error);
  CHECK(run({}).code == exit_error);
}

TEST_CASE("signature of the inquiry branch") {
  auto r = run({"--config", corpus, "signature", "--api", "get-lgtestp1-when-1", "--flow", "fi", "--stats"});
  REQUIRE(r.code == exit_ok);
  const auto doc = nlohmann::json::parse(r.out);
  std::set<std::string> req;
  for (const auto &f : doc.at("requests")) req.insert(f.at("qualified"));
  CHECK(req == std::set<std::string>{"SSMAPP1I.ENP1CNOI", "SSMAPP1I.ENP1PNOI"});
  CHECK(doc.at("stats").at("passes") == 1);
  CHECK(doc.at("variant").at("flow") == "fi");
}

TEST_CASE("post-context narrows responses") {
  auto r = run({"--config", worked, "signature", "--region", "DEMO1:10-11", "--post-context", "C"});
  REQUIRE(r.code == exit_ok);
  const auto doc = nlohmann::json::parse(r.out);
  REQUIRE(doc.at("responses").size() == 1);
  CHECK(doc.at("responses")[0].at("field") == "C");
}

TEST_CASE("export writes an OpenAPI document") {
  auto r = run({"--config", corpus, "export", "--api", "get-lgtestp1-when-1", "--dynamic-query", "LGIPDB01"});
  REQUIRE(r.code == exit_ok);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc.at("openapi") == "3.0.3");
  const auto &op = doc.at("paths").at("/apis/get-lgtestp1-when-1").at("get");
  const auto &schema = op.at("requestBody").at("content").at("application/json").at("schema");
  CHECK(schema.at("required") == nlohmann::json::array({"ENP1CNOI", "ENP1PNOI"}));
  CHECK(schema.at("properties").at("ENP1CNOI").at("maxLength") == 10);
  CHECK(doc.at("paths").contains("/apis/lgipdb01-dynamic-query"));
}

TEST_CASE("refactor writes slices into the output directory") {
  Scratch s("refactor");
  auto r = run({"--config", corpus, "refactor", "--api", "get-lgicdb01-customer", "--out-dir", s.root().string()});
  REQUIRE(r.code == exit_ok);
  CHECK(fs::exists(s.root() / "get-lgicdb01-customer-REQ.cpy"));
  CHECK(fs::exists(s.root() / "get-lgicdb01-customer-RESP.cpy"));
  const auto doc = nlohmann::json::parse(r.out);
  bool narrow = false;
  for (const auto &sug : doc) narrow = narrow || sug.at("kind") == "narrow_sql";
  CHECK(narrow);
}

TEST_CASE("oracle prints per-path sets") {
  auto r = run({"--config", worked, "oracle", "--region", "DEMO2:10-19"});
  REQUIRE(r.code == exit_ok);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc.at("paths").size() == 2);
  CHECK(doc.at("pruned_branch") == true);
  CHECK(doc.at("union_requests") == nlohmann::json::array({"A"}));
}

TEST_CASE("dot output") {
  auto cg = run({"--config", corpus, "identify", "--dot-callgraph"});
  CHECK(cg.code == exit_ok);
  CHECK(cg.out.rfind("digraph", 0) == 0);
  auto cfg = run({"--config", corpus, "identify", "--dot-cfg", "LGIPOL01"});
  CHECK(cfg.code == exit_ok);
  CHECK(cfg.out.rfind("digraph", 0) == 0);
}

TEST_CASE("repeated runs are byte-identical") {
  for (const auto &args : std::vector<std::vector<std::string>>{
           {"--config", corpus, "identify"},
           {"--config", corpus, "signature", "--api", "delete-ssp1", "--flow", "ps", "--call-chain"},
           {"--config", corpus, "export"}}) {
    const auto a = run(args);
    const auto b = run(args);
    CHECK(a.code == exit_ok);
    CHECK(a.out == b.out);
  }
}
