#include "pmlab/report.hpp"

#include <json.hpp>

namespace pmlab {

std::string to_json(const DiagnosticsReport& r) {
  nlohmann::ordered_json j;
  j["all_pass"] = r.all_pass();
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["value"] = c.value;
    e["bound"] = c.bound;
    e["margin"] = c.margin;
    e["pass"] = c.pass;
    if (!c.note.empty()) e["note"] = c.note;
    j["checks"].push_back(e);
  }
  return j.dump(2);
}

}  // namespace pmlab
