#pragma once

#include "apify/discovery.hpp"
#include "apify/oracle.hpp"
#include "apify/refactor.hpp"
#include "apify/signature.hpp"
#include "apify/source_unit.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace apify {

// JSON renderings of every CLI output. Objects use sorted keys and arrays
// are already canonical, so equal inputs give equal bytes.

nlohmann::ordered_json region_json(const CodeRegion &region);
nlohmann::ordered_json candidate_json(const ApiCandidate &c);
nlohmann::ordered_json field_json(const FieldRole &f);

struct ApiHeader {
  std::string name;
  SeedKind seed_kind = SeedKind::user_region;
};

nlohmann::ordered_json signature_json(const ApiHeader &api, const ApiSignature &sig, bool stats);
/// Signature of a candidate whose fields are fixed by convention.
nlohmann::ordered_json fixed_signature_json(const ApiCandidate &c);

nlohmann::ordered_json suggestion_json(const RefactorSuggestion &s);

nlohmann::ordered_json oracle_json(const SourceUnit &unit, const CodeRegion &region, const PathEnumeration &paths,
                           const OracleResult &result);

/// Characters needed to show a value of the picture as text: digits, sign and
/// decimal point for numeric pictures, the character count otherwise.
std::size_t display_length(std::string_view picture);

struct ExportedApi {
  ApiCandidate candidate;
  /// Absent for fixed-signature candidates.
  std::optional<ApiSignature> signature;
};

nlohmann::ordered_json openapi_json(const std::vector<ExportedApi> &apis);

/// Two-space indented text with a trailing newline.
std::string render(const nlohmann::ordered_json &doc);

} // namespace apify
