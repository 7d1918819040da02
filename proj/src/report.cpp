#include "apify/report.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace apify {

using json = nlohmann::ordered_json;

namespace {

json names(const SourceUnit &unit, const ItemSet &set) {
  std::vector<std::string> out;
  set.for_each([&](ItemId i) { out.push_back(unit.qualified_name(i)); });
  std::sort(out.begin(), out.end());
  return out;
}

struct PictureShape {
  std::size_t length = 0;
  bool numeric = true;
  bool sign = false;
  bool decimal = false;
};

PictureShape shape(std::string_view pic) {
  PictureShape s;
  for (std::size_t i = 0; i < pic.size(); ++i) {
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(pic[i])));
    std::size_t count = 1;
    if (i + 1 < pic.size() && pic[i + 1] == '(') {
      const auto close = pic.find(')', i);
      if (close != std::string_view::npos) {
        count = std::stoul(std::string(pic.substr(i + 2, close - i - 2)));
        i = close;
      }
    }
    switch (c) {
    case '9':
      s.length += count;
      break;
    case 'S':
      s.sign = true;
      s.length += 1;
      break;
    case 'V':
      s.decimal = true;
      s.length += 1;
      break;
    case 'P':
      break;
    default:
      s.numeric = false;
      s.length += count;
    }
  }
  return s;
}

json property(const std::string &picture, std::size_t length) {
  json p{{"type", "string"}, {"maxLength", length}, {"x-picture", picture}};
  const auto s = shape(picture);
  if (s.numeric) {
    std::string pattern = "^";
    if (s.sign) pattern += "[+-]?";
    pattern += "[0-9]*";
    if (s.decimal) pattern += "(\\.[0-9]*)?";
    p["pattern"] = pattern + "$";
  }
  return p;
}

json object_schema(const std::vector<FieldRole> &fields) {
  std::map<std::string, std::size_t> seen;
  for (const auto &f : fields) ++seen[f.field];
  json props = json::object();
  std::vector<std::string> required;
  for (const auto &f : fields) {
    const auto key = seen[f.field] > 1 ? f.qualified_name : f.field;
    const auto pic = f.picture.value_or("X(" + std::to_string(f.byte_size) + ")");
    props[key] = property(pic, display_length(pic));
    if (!f.optional) required.push_back(key);
  }
  std::sort(required.begin(), required.end());
  json schema{{"type", "object"}, {"properties", std::move(props)}};
  if (!required.empty()) schema["required"] = required;
  return schema;
}

json fixed_schema(const std::vector<ConventionalField> &fields) {
  json props = json::object();
  std::vector<std::string> required;
  for (const auto &f : fields) {
    auto p = property(f.picture, f.length);
    props[f.name] = std::move(p);
    required.push_back(f.name);
  }
  std::sort(required.begin(), required.end());
  json schema{{"type", "object"}, {"properties", std::move(props)}};
  if (!required.empty()) schema["required"] = required;
  return schema;
}

} // namespace

json region_json(const CodeRegion &region) {
  return {{"program", region.program}, {"start_line", region.start_line}, {"end_line", region.end_line}};
}

json candidate_json(const ApiCandidate &c) {
  return {{"name", c.suggested_name},
          {"seed_kind", std::string(to_string(c.seed_kind))},
          {"program", c.region.program},
          {"start_line", c.region.start_line},
          {"end_line", c.region.end_line},
          {"evidence", c.evidence},
          {"method", std::string(to_string(c.method))}};
}

json field_json(const FieldRole &f) {
  return {{"field", f.field},
          {"qualified", f.qualified_name},
          {"section", std::string(to_string(f.section))},
          {"picture", f.picture ? json(*f.picture) : json(nullptr)},
          {"optional", f.optional},
          {"role", std::string(to_string(f.role))}};
}

json signature_json(const ApiHeader &api, const ApiSignature &sig, bool stats) {
  json req = json::array();
  for (const auto &f : sig.requests) req.push_back(field_json(f));
  json resp = json::array();
  for (const auto &f : sig.responses) resp.push_back(field_json(f));
  json doc{{"api",
            {{"name", api.name},
             {"seed_kind", std::string(to_string(api.seed_kind))},
             {"method", std::string(to_string(sig.method))},
             {"region", region_json(sig.region)}}},
           {"variant", {{"flow", std::string(to_string(sig.variant.flow))}, {"call_chain", sig.variant.call_chain}}},
           {"degraded", sig.degraded},
           {"requests", std::move(req)},
           {"responses", std::move(resp)}};
  if (stats)
    doc["stats"] = {{"passes", sig.stats.passes},
                    {"pass_cap", sig.stats.pass_cap},
                    {"paths", sig.stats.paths},
                    {"summary_rounds", sig.stats.summary_rounds},
                    {"summary_cap", sig.stats.summary_cap}};
  return doc;
}

json fixed_signature_json(const ApiCandidate &c) {
  auto fields = [](const std::vector<ConventionalField> &list) {
    json out = json::array();
    for (const auto &f : list)
      out.push_back({{"field", f.name},
                     {"qualified", f.name},
                     {"section", "conventional"},
                     {"picture", f.picture},
                     {"optional", false}});
    return out;
  };
  return {{"api",
           {{"name", c.suggested_name},
            {"seed_kind", std::string(to_string(c.seed_kind))},
            {"method", std::string(to_string(c.method))},
            {"region", region_json(c.region)}}},
          {"variant", nullptr},
          {"degraded", false},
          {"requests", fields(c.fixed_requests)},
          {"responses", fields(c.fixed_responses)}};
}

json suggestion_json(const RefactorSuggestion &s) {
  return {{"kind", std::string(to_string(s.kind))},
          {"program", s.program},
          {"line", s.line},
          {"detail", s.detail},
          {"rationale", s.rationale}};
}

json oracle_json(const SourceUnit &unit, const CodeRegion &region, const PathEnumeration &paths,
                 const OracleResult &result) {
  json list = json::array();
  for (std::size_t i = 0; i < paths.paths.size(); ++i) {
    const auto &p = paths.paths[i];
    std::vector<int> lines;
    for (auto s : p.statements) lines.push_back(unit.stmt(s).line);
    list.push_back({{"lines", lines},
                    {"truncated", p.truncated},
                    {"requests", names(unit, result.per_path[i].requests)},
                    {"responses", names(unit, result.per_path[i].responses)}});
  }
  const auto bound = paths.paths.empty() ? std::size_t{0} : paths.paths.front().loop_unroll_bound;
  return {{"region", region_json(region)},
          {"loop_unroll_bound", bound},
          {"pruned_branch", paths.pruned_branch},
          {"paths", std::move(list)},
          {"union_requests", names(unit, result.union_req)},
          {"union_responses", names(unit, result.union_resp)}};
}

std::size_t display_length(std::string_view picture) { return shape(picture).length; }

json openapi_json(const std::vector<ExportedApi> &apis) {
  json paths = json::object();
  for (const auto &a : apis) {
    const auto &c = a.candidate;
    const auto method = std::string(to_string(a.signature ? a.signature->method : c.method));
    json request = a.signature ? object_schema(a.signature->requests) : fixed_schema(c.fixed_requests);
    json response = a.signature ? object_schema(a.signature->responses) : fixed_schema(c.fixed_responses);
    json op{{"operationId", c.suggested_name},
            {"summary", c.evidence},
            {"x-seed-kind", std::string(to_string(c.seed_kind))},
            {"x-region", region_json(c.region)},
            {"requestBody", {{"required", true}, {"content", {{"application/json", {{"schema", std::move(request)}}}}}}},
            {"responses",
             {{"200", {{"description", "OK"}, {"content", {{"application/json", {{"schema", std::move(response)}}}}}}}}}};
    if (a.signature) op["x-degraded"] = a.signature->degraded;
    paths["/apis/" + c.suggested_name][method] = std::move(op);
  }
  return {{"openapi", "3.0.3"}, {"info", {{"title", "Discovered APIs"}, {"version", "1.0.0"}}}, {"paths", paths}};
}

std::string render(const json &doc) { return doc.dump(2) + "\n"; }

} // namespace apify
