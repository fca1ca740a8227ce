#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cgq/verify.hpp"

namespace cgq {

// One verification run: a group, a set of deformation parameters and the knobs
// shared by every check. Serializable so a run can be reproduced bit for bit.
struct RunConfig {
  std::string group = "A2";
  std::vector<double> q_values = {0.5};
  int cutoff = 20;
  int guard_policy = 0;
  std::map<std::string, double> tolerance_overrides;
  std::string selector = "all";
  int jobs = 1;
  std::string format = "json";  // json | csv
  std::string output_dir;
  std::string cache_dir;
  std::uint64_t seed = 20260825;

  // Throws std::invalid_argument on out-of-range values, unknown tolerance
  // names, empty q set or q outside (0, 1).
  void validate() const;

  VerifyOptions options_for(double q) const;
};

RunConfig config_from_json(const std::string& text);
std::string config_to_json(const RunConfig& c);

}  // namespace cgq
