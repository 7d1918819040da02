#pragma once

#include "apify/call_graph.hpp"
#include "apify/discovery.hpp"
#include "apify/screen_map.hpp"
#include "apify/signature.hpp"
#include "apify/source_unit.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace apify {

struct UserRegionSpec {
  /// "PROG:p-q".
  std::string region;
  std::string name;
};

struct WorkspaceConfig {
  std::vector<std::filesystem::path> source_dirs;
  std::vector<std::filesystem::path> copybook_dirs;
  /// Map files or directories of "*.map" files; the map name is the file stem.
  std::vector<std::filesystem::path> screen_maps;
  std::optional<std::filesystem::path> transaction_table;
  std::optional<std::filesystem::path> partition_file;
  std::vector<UserRegionSpec> user_regions;

  struct Defaults {
    Flow flow = Flow::fs;
    bool call_chain = false;
    /// Path budget of the path-sensitive variant.
    std::size_t ps_bound = 4096;
    std::size_t ps_unroll = 3;
    bool include_sqlcode = false;
  } defaults;
};

/// Reads the JSON config. Relative paths are taken from the config file's
/// directory; every referenced path must exist. Throws ConfigError.
WorkspaceConfig load_config(const std::filesystem::path &file);

struct Workspace {
  WorkspaceConfig config;
  std::map<std::string, SourceUnit> units;
  std::map<std::string, std::filesystem::path> files;
  CallGraph graph;
  DiscoveryInputs inputs;
};

/// Parses every "*.cbl" / "*.cob" source in the source dirs. Frontend errors
/// are rethrown with the file name prefixed; DuplicateProgram when two files
/// declare one PROGRAM-ID.
Workspace load_workspace(const WorkspaceConfig &config);

/// "PROG:p-q" to a region. Throws UnresolvedSelector.
CodeRegion parse_region_selector(const std::map<std::string, SourceUnit> &units, const std::string &selector);

} // namespace apify
