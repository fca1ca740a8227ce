#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "json.hpp"

#include "cgq/cache.hpp"
#include "cgq/config.hpp"
#include "cgq/report.hpp"
#include "cgq/root_system.hpp"
#include "cgq/verify.hpp"

using namespace cgq;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  fs::path p = fs::temp_directory_path() / "cgq_io_tests";
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

int run_cli(const std::string& args, const fs::path& stdout_file) {
  std::string cmd = std::string(CGQ_BIN) + " " + args + " > " +
                    stdout_file.string() + " 2> " + stdout_file.string() + ".err";
  int st = std::system(cmd.c_str());
  REQUIRE(st != -1);
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

CheckReport demo_report(const std::string& id, Verdict v) {
  CheckReport r;
  r.check_id = id;
  r.inputs = {{"group", "A2"}, {"q", "0.5"}};
  r.residuals = {{"alpha", 0.25}, {"beta", 1e-9}};
  r.threshold = 1e-3;
  r.verdict = v;
  r.runtime_seconds = 1.25;
  r.notes = {"demo note"};
  return r;
}

}  // namespace

TEST_CASE("report lines keep timing only under the meta key") {
  CheckReport r = demo_report("demo/x", Verdict::kPass);
  std::string line = report_json_line(r);
  auto j = nlohmann::json::parse(line);
  CHECK(j.contains("meta"));
  CHECK(j["meta"]["runtime_seconds"] == 1.25);
  CHECK(j["schema"] == 1);
  CHECK(j["verdict"] == "pass");

  std::string body = report_body_json(r);
  auto jb = nlohmann::json::parse(body);
  CHECK(!jb.contains("meta"));
  CHECK(strip_meta(line) == body + "\n");  // strip_meta normalizes to one line each

  // Identical configs give byte-identical bodies even when timing differs.
  CheckReport r2 = demo_report("demo/x", Verdict::kPass);
  r2.runtime_seconds = 99.0;
  CHECK(report_body_json(r2) == body);
  CHECK(report_json_line(r2) != line);
}

TEST_CASE("json reports round trip through parse") {
  std::vector<CheckReport> rs{demo_report("demo/a", Verdict::kPass),
                              demo_report("demo/b", Verdict::kInconclusive),
                              demo_report("demo/c", Verdict::kFail)};
  std::string doc = render_reports(rs, "json");
  std::vector<CheckReport> back = parse_reports(doc);
  REQUIRE(back.size() == 3);
  CHECK(back[0].check_id == "demo/a");
  CHECK(back[1].verdict == Verdict::kInconclusive);
  CHECK(back[2].verdict == Verdict::kFail);
  CHECK(back[0].threshold == 1e-3);
  REQUIRE(back[0].residuals.size() == 2);
  CHECK(back[0].residuals[0].first == "alpha");
  CHECK(back[0].residuals[0].second == 0.25);
  CHECK(back[0].notes == std::vector<std::string>{"demo note"});
  CHECK(strip_meta(render_reports(back, "json")) == strip_meta(doc));
}

TEST_CASE("csv reports carry one row per residual and no timing") {
  std::vector<CheckReport> rs{demo_report("demo/a", Verdict::kPass),
                              demo_report("demo/b", Verdict::kFail)};
  std::string csv = render_reports(rs, "csv");
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "check,verdict,threshold,residual,value");
  CHECK(lines[1].find("demo/a") == 0);
  CHECK(lines[1].find("alpha") != std::string::npos);
  CHECK(csv.find("runtime") == std::string::npos);
  CHECK(csv.find("meta") == std::string::npos);
}

TEST_CASE("exit codes aggregate verdicts with fail dominating") {
  auto pass = demo_report("a", Verdict::kPass);
  auto inc = demo_report("b", Verdict::kInconclusive);
  auto fail = demo_report("c", Verdict::kFail);
  CHECK(exit_code_for({}) == 0);
  CHECK(exit_code_for({pass}) == 0);
  CHECK(exit_code_for({pass, inc}) == 2);
  CHECK(exit_code_for({pass, inc, fail}) == 1);
  CHECK(exit_code_for({fail}) == 1);
}

TEST_CASE("run configs round trip through json and validate their fields") {
  RunConfig c;
  c.group = "B2";
  c.q_values = {0.3, 0.5};
  c.cutoff = 16;
  c.guard_policy = 1;
  c.tolerance_overrides = {{"zero", 1e-4}, {"untwist", 0.1}};
  c.selector = "su2";
  c.jobs = 2;
  c.format = "csv";
  c.output_dir = "out";
  c.cache_dir = "cache";
  c.seed = 7;
  CHECK_NOTHROW(c.validate());

  RunConfig d = config_from_json(config_to_json(c));
  CHECK(d.group == c.group);
  CHECK(d.q_values == c.q_values);
  CHECK(d.cutoff == c.cutoff);
  CHECK(d.guard_policy == c.guard_policy);
  CHECK(d.tolerance_overrides == c.tolerance_overrides);
  CHECK(d.selector == c.selector);
  CHECK(d.jobs == c.jobs);
  CHECK(d.format == c.format);
  CHECK(d.output_dir == c.output_dir);
  CHECK(d.cache_dir == c.cache_dir);
  CHECK(d.seed == c.seed);

  VerifyOptions o = d.options_for(0.3);
  CHECK(o.q == 0.3);
  CHECK(o.tol.get("zero") == 1e-4);
  CHECK(o.tol.get("untwist") == 0.1);
  CHECK(o.tol.get("su2-relation") == 1e-12);

  auto broken = [&](auto&& tweak) {
    RunConfig b = c;
    tweak(b);
    CHECK_THROWS_AS(b.validate(), std::invalid_argument);
  };
  broken([](RunConfig& b) { b.q_values.clear(); });
  broken([](RunConfig& b) { b.q_values = {1.0}; });
  broken([](RunConfig& b) { b.q_values = {0.0}; });
  broken([](RunConfig& b) { b.q_values = {-0.2}; });
  broken([](RunConfig& b) { b.cutoff = 4; });
  broken([](RunConfig& b) { b.jobs = 0; });
  broken([](RunConfig& b) { b.format = "xml"; });
  broken([](RunConfig& b) { b.tolerance_overrides = {{"no-such-knob", 1.0}}; });
  broken([](RunConfig& b) { b.tolerance_overrides = {{"zero", -1.0}}; });
}

TEST_CASE("module cache round trips and survives corruption") {
  fs::path dir = scratch_dir() / "cache";
  fs::remove_all(dir);
  RootSystem rs = build_root_system("A2");
  IntVector lam(2);
  lam << 1, 1;

  ModulePtr m1 = cached_module(rs, 0.5, lam, dir.string());
  REQUIRE(m1 != nullptr);
  bool has_entry = fs::exists(dir) && !fs::is_empty(dir);
  CHECK(has_entry);

  ModulePtr m2 = cached_module(rs, 0.5, lam, dir.string());
  REQUIRE(m2->dim == m1->dim);
  for (int i = 0; i < 2; ++i) {
    CHECK((m2->E[i] - m1->E[i]).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((m2->F[i] - m1->F[i]).cwiseAbs().maxCoeff() < 1e-15);
  }
  CHECK((m2->Kexp - m1->Kexp).cwiseAbs().maxCoeff() < 1e-15);

  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file()) spit(entry.path(), "garbage");
  ModulePtr m3 = cached_module(rs, 0.5, lam, dir.string());
  REQUIRE(m3->dim == m1->dim);
  CHECK((m3->E[0] - m1->E[0]).cwiseAbs().maxCoeff() < 1e-15);

  ModulePtr m4 = cached_module(rs, 0.5, lam, "");
  CHECK(m4->dim == m1->dim);
}

TEST_CASE("cache directory resolution prefers the flag over the environment") {
  setenv("CGQ_CACHE", "/tmp/cgq-env-cache", 1);
  CHECK(resolve_cache_dir("/tmp/flag-cache") == "/tmp/flag-cache");
  CHECK(resolve_cache_dir("") == "/tmp/cgq-env-cache");
  unsetenv("CGQ_CACHE");
  CHECK(resolve_cache_dir("") == "");
}

TEST_CASE("cli subcommands run end to end") {
  fs::path dir = scratch_dir();

  SUBCASE("weyl tables") {
    fs::path out = dir / "weyl.jsonl";
    CHECK(run_cli("weyl --group A2 --format json", out) == 0);
    std::istringstream in(slurp(out));
    std::string line;
    int elements = 0, lines = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      ++lines;
      auto j = nlohmann::json::parse(line);
      if (j["kind"] == "element") ++elements;
    }
    CHECK(elements == 6);
    CHECK(lines > 6);
  }

  SUBCASE("verify runs are deterministic and convertible") {
    fs::path f1 = dir / "v1.jsonl", f2 = dir / "v2.jsonl";
    std::string args =
        "verify --check su2 --group A2 --q 0.5 --cutoff 12 --seed 3 --output ";
    CHECK(run_cli(args + f1.string(), dir / "v1.log") == 0);
    CHECK(run_cli(args + f2.string(), dir / "v2.log") == 0);
    std::string b1 = slurp(f1), b2 = slurp(f2);
    REQUIRE(!b1.empty());
    CHECK(strip_meta(b1) == strip_meta(b2));

    fs::path csv = dir / "v1.csv";
    CHECK(run_cli("report --input " + f1.string() + " --format csv --output " +
                      csv.string(),
                  dir / "rep.log") == 0);
    std::string c = slurp(csv);
    CHECK(c.rfind("check,verdict,threshold,residual,value", 0) == 0);
  }

  SUBCASE("scan-q emits step norms") {
    fs::path out = dir / "scan.json";
    CHECK(run_cli("scan-q --group A1 --grid 0.3,0.5,0.7 --cutoff 10 --no-refine "
                  "--output " +
                      out.string(),
                  dir / "scan.log") == 0);
    auto j = nlohmann::json::parse(slurp(out));
    CHECK(j.contains("max_step"));
    CHECK(j["step_norms"].size() == 2);
  }

  SUBCASE("usage errors exit with 64") {
    fs::path sink = dir / "sink.txt";
    CHECK(run_cli("verify --check su2 --q 1.5 --cutoff 12", sink) == 64);
    CHECK(run_cli("scan-q --group A1 --grid 0.3,0.5 --cutoff 10", sink) == 64);
    CHECK(run_cli("verify --check su2 --tolerance no-such-knob=1", sink) == 64);
    CHECK(run_cli("verify --check no-such-check --cutoff 12", sink) == 64);
    CHECK(run_cli("no-such-command", sink) == 64);
    CHECK(run_cli("", sink) == 64);

    fs::path cfg = dir / "empty_q.json";
    spit(cfg, "{\"group\":\"A2\",\"q_values\":[]}");
    CHECK(run_cli("verify --config " + cfg.string(), sink) == 64);
  }
}
