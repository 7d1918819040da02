#pragma once

#include "apify/call_graph.hpp"
#include "apify/region.hpp"
#include "apify/screen_map.hpp"
#include "apify/signature.hpp"
#include "apify/source_unit.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace apify {

enum class SeedKind { transaction, control_flow_block, data_access, procedure, screen, inter_program_call, user_region };

std::string_view to_string(SeedKind k);
std::optional<SeedKind> parse_seed_kind(std::string_view text);

/// A field whose shape is fixed by convention rather than by analysis.
struct ConventionalField {
  std::string name;
  std::string picture;
  std::size_t length = 0;
};

struct ApiCandidate {
  SeedKind seed_kind = SeedKind::user_region;
  CodeRegion region;
  std::string suggested_name;
  std::string evidence;
  /// Method used for naming: region plus reachable callees.
  HttpMethod method = HttpMethod::get;
  /// Set for the dynamic-query layer, whose signature is not computed.
  bool fixed_signature = false;
  std::vector<ConventionalField> fixed_requests;
  std::vector<ConventionalField> fixed_responses;
};

struct UserRegion {
  CodeRegion region;
  /// Optional caller-chosen name.
  std::string name;
};

struct DiscoveryInputs {
  std::vector<ScreenMap> screen_maps;
  /// Transaction id to entry program.
  std::map<std::string, std::string> transactions;
  /// Program id to partition name.
  std::map<std::string, std::string> partitions;
  std::vector<UserRegion> user_regions;
};

/// "TXNID PROGRAM-ID" per line; '#' starts a comment. Throws ConfigError.
std::map<std::string, std::string> parse_transaction_table(std::string_view text);
/// "PROGRAM-ID partition-name" per line; '#' starts a comment.
std::map<std::string, std::string> parse_partitions(std::string_view text);

/// Lower-case words joined by '-': "GET LGTESTP1 when 1" gives "get-lgtestp1-when-1".
std::string slug(std::string_view text);

/// Candidates sorted by (program, start_line, end_line, seed kind). Names are
/// unique: later duplicates get "-2", "-3", ... Throws
/// UnknownTransactionProgram.
std::vector<ApiCandidate> discover_candidates(Analyzer &analyzer, const std::map<std::string, SourceUnit> &units,
                                              const CallGraph &graph, const DiscoveryInputs &inputs);

/// Generic query endpoint over a program's data layer. Throws NoDataAccess
/// when the program has no SQL.
ApiCandidate dynamic_query_candidate(const SourceUnit &unit);

} // namespace apify
