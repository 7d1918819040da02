#include "apify/workspace.hpp"

#include "apify/errors.hpp"
#include "apify/parser.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace apify {

namespace fs = std::filesystem;

namespace {

std::string upper(std::string s) {
  for (auto &c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string read_file(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path existing(const fs::path &base, const nlohmann::json &value, const std::string &key) {
  if (!value.is_string()) throw ConfigError(key + ": expected a path string");
  fs::path p = value.get<std::string>();
  if (p.is_relative()) p = base / p;
  if (!fs::exists(p)) throw ConfigError(key + ": no such path " + p.string());
  return p.lexically_normal();
}

std::vector<fs::path> path_list(const fs::path &base, const nlohmann::json &doc, const std::string &key) {
  std::vector<fs::path> out;
  if (!doc.contains(key)) return out;
  const auto &v = doc.at(key);
  if (!v.is_array()) throw ConfigError(key + ": expected an array of paths");
  for (const auto &e : v) out.push_back(existing(base, e, key));
  return out;
}

/// Regular files directly inside `dir` with one of `extensions`, sorted.
std::vector<fs::path> files_with(const fs::path &dir, std::initializer_list<std::string_view> extensions) {
  std::vector<fs::path> out;
  if (fs::is_regular_file(dir)) return {dir};
  for (const auto &e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto ext = upper(e.path().extension().string());
    for (auto want : extensions)
      if (ext == upper(std::string(want))) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

WorkspaceConfig load_config(const fs::path &file) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(file));
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError(file.string() + ": expected a JSON object");
  const auto base = fs::absolute(file).parent_path();

  WorkspaceConfig c;
  try {
    c.source_dirs = path_list(base, doc, "source_dirs");
    if (c.source_dirs.empty()) throw ConfigError("source_dirs: at least one directory is required");
    c.copybook_dirs = path_list(base, doc, "copybook_dirs");
    c.screen_maps = path_list(base, doc, "screen_maps");
    if (doc.contains("transaction_table"))
      c.transaction_table = existing(base, doc.at("transaction_table"), "transaction_table");
    if (doc.contains("partition_file")) c.partition_file = existing(base, doc.at("partition_file"), "partition_file");
    for (const auto &r : doc.value("user_regions", nlohmann::json::array()))
      c.user_regions.push_back({r.at("region").get<std::string>(), r.value("name", std::string())});
    if (doc.contains("defaults")) {
      const auto &d = doc.at("defaults");
      if (d.contains("flow")) {
        const auto f = parse_flow(d.at("flow").get<std::string>());
        if (!f) throw ConfigError("defaults.flow: expected fi, fs or ps");
        c.defaults.flow = *f;
      }
      c.defaults.call_chain = d.value("call_chain", c.defaults.call_chain);
      c.defaults.ps_bound = d.value("ps_bound", c.defaults.ps_bound);
      c.defaults.ps_unroll = d.value("ps_unroll", c.defaults.ps_unroll);
      c.defaults.include_sqlcode = d.value("include_sqlcode", c.defaults.include_sqlcode);
    }
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  return c;
}

Workspace load_workspace(const WorkspaceConfig &config) {
  Workspace ws;
  ws.config = config;

  // First directory wins for a copybook name present in several.
  std::map<std::string, fs::path> copybooks;
  for (const auto &dir : config.copybook_dirs)
    for (const auto &f : files_with(dir, {".cpy", ".cbl", ".cob"})) copybooks.emplace(upper(f.stem().string()), f);
  CopybookResolver resolver = [&](const std::string &name) -> std::optional<std::string> {
    auto it = copybooks.find(upper(name));
    if (it == copybooks.end()) return std::nullopt;
    return read_file(it->second);
  };

  for (const auto &entry : config.screen_maps)
    for (const auto &f : files_with(entry, {".map"})) {
      try {
        ws.inputs.screen_maps.push_back({upper(f.stem().string()), parse_screen_map(read_file(f))});
      } catch (const FrontendError &e) {
        throw FrontendError(f.filename().string() + ": " + e.what());
      }
    }

  for (const auto &dir : config.source_dirs)
    for (const auto &f : files_with(dir, {".cbl", ".cob"})) {
      SourceUnit unit;
      try {
        unit = parse_source(read_file(f), resolver, ws.inputs.screen_maps);
      } catch (const FrontendError &e) {
        throw FrontendError(f.filename().string() + ": " + e.what());
      }
      if (ws.units.contains(unit.program_id)) throw DuplicateProgram(unit.program_id);
      ws.files.emplace(unit.program_id, f);
      ws.units.emplace(unit.program_id, std::move(unit));
    }

  ws.graph = build_call_graph(ws.units);
  if (config.transaction_table) ws.inputs.transactions = parse_transaction_table(read_file(*config.transaction_table));
  if (config.partition_file) ws.inputs.partitions = parse_partitions(read_file(*config.partition_file));
  for (const auto &r : config.user_regions)
    ws.inputs.user_regions.push_back({parse_region_selector(ws.units, r.region), r.name});
  return ws;
}

CodeRegion parse_region_selector(const std::map<std::string, SourceUnit> &units, const std::string &selector) {
  const auto colon = selector.rfind(':');
  const auto dash = selector.find('-', colon == std::string::npos ? 0 : colon);
  if (colon == std::string::npos || dash == std::string::npos)
    throw UnresolvedSelector("region selector must be PROG:p-q, got " + selector);
  const auto program = upper(selector.substr(0, colon));
  auto it = units.find(program);
  if (it == units.end()) throw UnresolvedSelector("no program " + program + " in the workspace");
  int p = 0;
  int q = 0;
  try {
    std::size_t used = 0;
    const auto a = selector.substr(colon + 1, dash - colon - 1);
    const auto b = selector.substr(dash + 1);
    p = std::stoi(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    q = std::stoi(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
  } catch (const std::logic_error &) {
    throw UnresolvedSelector("region selector must be PROG:p-q, got " + selector);
  }
  try {
    return make_region(it->second, p, q);
  } catch (const InvalidRegion &e) {
    throw UnresolvedSelector(e.what());
  }
}

} // namespace apify
