#include "cgq/config.hpp"

#include <stdexcept>

#include "json.hpp"

namespace cgq {

void RunConfig::validate() const {
  if (group.empty()) throw std::invalid_argument("group must not be empty");
  if (q_values.empty()) throw std::invalid_argument("at least one q value required");
  for (double q : q_values)
    if (!(q > 0.0 && q < 1.0))
      throw std::invalid_argument("q must lie strictly inside (0, 1)");
  if (cutoff < 8) throw std::invalid_argument("cutoff must be at least 8");
  if (guard_policy < 0) throw std::invalid_argument("guard_policy must be >= 0");
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  if (format != "json" && format != "csv")
    throw std::invalid_argument("format must be json or csv");
  Tolerances defaults = Tolerances::defaults();
  for (const auto& [name, v] : tolerance_overrides) {
    defaults.get(name);  // throws on unknown name
    if (v < 0.0) throw std::invalid_argument("tolerance " + name + " must be >= 0");
  }
}

VerifyOptions RunConfig::options_for(double q) const {
  VerifyOptions o;
  o.group = group;
  o.q = q;
  o.cutoff = cutoff;
  o.guard_policy = guard_policy;
  o.seed = seed;
  o.cache_dir = cache_dir;
  for (const auto& [name, v] : tolerance_overrides) o.tol.set(name, v);
  return o;
}

RunConfig config_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  RunConfig c;
  if (j.contains("group")) c.group = j["group"].get<std::string>();
  if (j.contains("q_values")) c.q_values = j["q_values"].get<std::vector<double>>();
  if (j.contains("cutoff")) c.cutoff = j["cutoff"].get<int>();
  if (j.contains("guard_policy")) c.guard_policy = j["guard_policy"].get<int>();
  if (j.contains("selector")) c.selector = j["selector"].get<std::string>();
  if (j.contains("jobs")) c.jobs = j["jobs"].get<int>();
  if (j.contains("format")) c.format = j["format"].get<std::string>();
  if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("cache_dir")) c.cache_dir = j["cache_dir"].get<std::string>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("tolerances"))
    for (const auto& [name, v] : j["tolerances"].items())
      c.tolerance_overrides[name] = v.get<double>();
  c.validate();
  return c;
}

std::string config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["group"] = c.group;
  j["q_values"] = c.q_values;
  j["cutoff"] = c.cutoff;
  j["guard_policy"] = c.guard_policy;
  j["selector"] = c.selector;
  j["jobs"] = c.jobs;
  j["format"] = c.format;
  j["output_dir"] = c.output_dir;
  j["cache_dir"] = c.cache_dir;
  j["seed"] = c.seed;
  nlohmann::ordered_json tols = nlohmann::ordered_json::object();
  for (const auto& [name, v] : c.tolerance_overrides) tols[name] = v;
  j["tolerances"] = tols;
  return j.dump(2);
}

}  // namespace cgq
