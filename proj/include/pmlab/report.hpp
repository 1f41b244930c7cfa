#pragma once

#include <string>
#include <vector>

namespace pmlab {

// One named check: a measured value, the bound it is held against (NaN when
// the entry is informational), and the verdict.
struct CheckResult {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // positive = inside the bound
  bool pass = true;
  std::string note;
};

struct DiagnosticsReport {
  std::vector<CheckResult> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
  void add(CheckResult c) { checks.push_back(std::move(c)); }
};

std::string to_json(const DiagnosticsReport& r);

}  // namespace pmlab
