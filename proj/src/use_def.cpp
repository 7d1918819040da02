#include "apify/use_def.hpp"

namespace apify {

UseDefSets local_use_def(const SourceUnit &unit) {
  UseDefSets sets;
  sets.req_gen.reserve(unit.statements.size());
  for (const auto &st : unit.statements) {
    sets.req_gen.push_back(st.reads);
    sets.req_kill.push_back(st.writes);
    sets.resp_gen.push_back(st.writes);
  }
  return sets;
}

} // namespace apify
