#pragma once

#include "apify/region.hpp"
#include "apify/signature.hpp"
#include "apify/source_unit.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace apify {

enum class SuggestionKind { guard_terminal_command, remove_sanity_check_candidate, narrow_sql, slice_copybook, caller_mapping };

std::string_view to_string(SuggestionKind k);

struct RefactorSuggestion {
  SuggestionKind kind = SuggestionKind::guard_terminal_command;
  std::string program;
  int line = 0;
  nlohmann::ordered_json detail = nlohmann::ordered_json::object();
  std::string rationale;
};

/// Terminal commands, SQL narrowing and sanity-check candidates for the
/// statements of `region`, sorted by (line, kind). A SELECT INTO host
/// variable may be dropped when it is neither a response nor read by another
/// non-SQL statement of the region.
std::vector<RefactorSuggestion> refactor_report(const SourceUnit &unit, const CodeRegion &region,
                                                const ApiSignature &signature);

struct CopybookSlice {
  std::string text;
  /// Fields with no copybook origin, left out of the slice.
  std::vector<std::string> skipped;
};

/// Copybook text holding each field that came from a copybook together with
/// its ancestor groups, levels renumbered 01, 05, 10, ... Records keep source
/// order. Throws EmptySlice(role) when no field came from a copybook.
CopybookSlice slice_copybook(const SourceUnit &unit, const std::vector<FieldRole> &fields, std::string_view role);

/// Pairs caller argument sub-items with callee request fields and callee
/// response fields with caller sub-items, by the positional binding rule.
/// Throws BindingMismatch when an argument has no parameter to bind to.
RefactorSuggestion caller_mapping_report(const SourceUnit &caller, const Statement &call_site, const SourceUnit &callee,
                                         const ApiSignature &callee_signature, const std::string &callee_api_name);

} // namespace apify
