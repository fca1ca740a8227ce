#include "cgq/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace cgq {
namespace {

using ordered = nlohmann::ordered_json;

ordered body_of(const CheckReport& r) {
  ordered j;
  j["schema"] = 1;
  j["check"] = r.check_id;
  ordered in = ordered::object();
  for (const auto& [k, v] : r.inputs) in[k] = v;
  j["inputs"] = in;
  ordered res = ordered::object();
  for (const auto& [k, v] : r.residuals) res[k] = v;
  j["residuals"] = res;
  j["threshold"] = r.threshold;
  j["verdict"] = verdict_name(r.verdict);
  j["notes"] = r.notes;
  return j;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string report_body_json(const CheckReport& r) { return body_of(r).dump(); }

std::string report_json_line(const CheckReport& r) {
  ordered j = body_of(r);
  j["meta"] = ordered{{"runtime_seconds", r.runtime_seconds}};
  return j.dump();
}

std::string render_reports(const std::vector<CheckReport>& rs,
                           const std::string& format) {
  std::ostringstream os;
  if (format == "csv") {
    os << "check,verdict,threshold,residual,value\n";
    char buf[40];
    for (const CheckReport& r : rs) {
      if (r.residuals.empty()) {
        os << csv_field(r.check_id) << "," << verdict_name(r.verdict) << ","
           << r.threshold << ",,\n";
        continue;
      }
      for (const auto& [name, v] : r.residuals) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << csv_field(r.check_id) << "," << verdict_name(r.verdict) << ","
           << r.threshold << "," << csv_field(name) << "," << buf << "\n";
      }
    }
  } else {
    for (const CheckReport& r : rs) os << report_json_line(r) << "\n";
  }
  return os.str();
}

std::string strip_meta(const std::string& json_lines) {
  std::istringstream is(json_lines);
  std::ostringstream os;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    ordered j = ordered::parse(line);
    j.erase("meta");
    os << j.dump() << "\n";
  }
  return os.str();
}

std::vector<CheckReport> parse_reports(const std::string& json_lines) {
  std::vector<CheckReport> out;
  std::istringstream is(json_lines);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    ordered j = ordered::parse(line);
    CheckReport r;
    r.check_id = j.at("check").get<std::string>();
    for (const auto& [k, v] : j.at("inputs").items())
      r.inputs.emplace_back(k, v.get<std::string>());
    for (const auto& [k, v] : j.at("residuals").items())
      r.residuals.emplace_back(k, v.get<double>());
    r.threshold = j.at("threshold").get<double>();
    std::string verdict = j.at("verdict").get<std::string>();
    r.verdict = verdict == "pass"
                    ? Verdict::kPass
                    : (verdict == "fail" ? Verdict::kFail : Verdict::kInconclusive);
    r.notes = j.at("notes").get<std::vector<std::string>>();
    if (j.contains("meta") && j["meta"].contains("runtime_seconds"))
      r.runtime_seconds = j["meta"]["runtime_seconds"].get<double>();
    out.push_back(std::move(r));
  }
  return out;
}

void write_text_atomic(const std::string& path, const std::string& text) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::filesystem::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string());
    os << text;
  }
  std::filesystem::rename(tmp, p);
}

int exit_code_for(const std::vector<CheckReport>& rs) {
  bool inconclusive = false;
  for (const CheckReport& r : rs) {
    if (r.verdict == Verdict::kFail) return 1;
    if (r.verdict == Verdict::kInconclusive) inconclusive = true;
  }
  return inconclusive ? 2 : 0;
}

}  // namespace cgq
