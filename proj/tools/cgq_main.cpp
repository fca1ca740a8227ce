// Command line front end: construct Weyl/module/representation data and run
// the verification suite. Exit codes: 0 all checks pass, 1 failures, 2 only
// inconclusive results, 64 usage errors.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cgq/cache.hpp"
#include "cgq/config.hpp"
#include "cgq/report.hpp"
#include "cgq/verify.hpp"

namespace {

using cgq::CheckReport;
using ordered = nlohmann::ordered_json;

std::vector<int> parse_word(const std::string& text) {
  std::vector<int> word;
  if (text.empty() || text == "e") return word;
  std::string token;
  std::istringstream is(text);
  const char delim = text.find('.') != std::string::npos ? '.' : ',';
  while (std::getline(is, token, delim)) {
    if (!token.empty() && (token[0] == 's' || token[0] == 'S')) token.erase(0, 1);
    size_t pos = 0;
    int v = std::stoi(token, &pos);
    if (pos != token.size() || v < 1)
      throw std::invalid_argument("bad word token: " + token);
    word.push_back(v - 1);
  }
  return word;
}

cgq::IntVector parse_lambda(const std::string& text, int rank) {
  cgq::IntVector lambda = cgq::IntVector::Ones(rank);
  if (text == "rho" || text.empty()) return lambda;
  std::string token;
  std::istringstream is(text);
  int i = 0;
  while (std::getline(is, token, ',')) {
    if (i >= rank) throw std::invalid_argument("lambda has too many entries");
    size_t pos = 0;
    lambda[i] = std::stoi(token, &pos);
    if (pos != token.size() || lambda[i] < 0)
      throw std::invalid_argument("bad lambda entry: " + token);
    ++i;
  }
  if (i != rank) throw std::invalid_argument("lambda needs one entry per rank");
  return lambda;
}

std::string word_string(const std::vector<int>& word) {
  if (word.empty()) return "e";
  std::ostringstream os;
  for (std::size_t j = 0; j < word.size(); ++j)
    os << (j ? "." : "") << "s" << (word[j] + 1);
  return os.str();
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty())
    std::cout << text;
  else
    cgq::write_text_atomic(output, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"truncated shift-operator models of quantized function algebras"};
  app.require_subcommand(1);

  cgq::RunConfig cfg;
  std::string lambda_text = "rho";
  std::string word_text;
  std::string output;
  std::string cache_flag;
  std::string config_path;
  std::string input_path;
  std::vector<std::string> tol_specs;
  std::vector<double> grid;
  bool refine = true;

  std::string tol_help = "override, name=value; repeatable. defaults:";
  for (const auto& [name, v] : cgq::Tolerances::defaults().named) {
    char buf[48];
    std::snprintf(buf, sizeof buf, " %s=%g", name.c_str(), v);
    tol_help += buf;
  }

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--group", cfg.group, "root system name (A1, A2, B2, A3, ...)");
    sub->add_option("--q", cfg.q_values,
                    "deformation parameter(s) in (0,1); repeatable");
    sub->add_option("--cutoff", cfg.cutoff, "per-factor truncation level");
    sub->add_option("--tolerance", tol_specs, tol_help);
    sub->add_option("--jobs", cfg.jobs, "max concurrent check groups");
    sub->add_option("--output", output, "write the document here instead of stdout");
    sub->add_option("--cache", cache_flag,
                    "module cache directory (overrides CGQ_CACHE)");
    sub->add_option("--seed", cfg.seed, "seed for sampled probes");
    sub->add_option("--format", cfg.format, "json | csv");
  };

  CLI::App* weyl = app.add_subcommand("weyl", "enumerate the Weyl group");
  add_common(weyl);

  CLI::App* module = app.add_subcommand("module", "build one module and check it");
  add_common(module);
  module->add_option("--lambda", lambda_text, "highest weight, e.g. 1,0 (default rho)");

  CLI::App* rep = app.add_subcommand("rep", "assemble one representation");
  add_common(rep);
  rep->add_option("--word", word_text, "reduced word, e.g. s1.s2 (default: longest)");
  rep->add_option("--lambda", lambda_text, "highest weight for the probe images");

  CLI::App* verify = app.add_subcommand("verify", "run verification checks");
  add_common(verify);
  std::string selector = "all";
  verify->add_option("--check", selector,
                     "all | su2 | module | lemma2 | upsilon | untwist | boundary "
                     "| torus | continuity");
  verify->add_option("--config", config_path, "load a run configuration (json)");

  CLI::App* scan = app.add_subcommand("scan-q", "operator distances across a q grid");
  add_common(scan);
  scan->add_option("--lambda", lambda_text, "highest weight of the scanned module");
  scan->add_option("--word", word_text, "reduced word (default: longest)");
  scan->add_option("--grid", grid, "q grid, at least 3 points")->delimiter(',');
  scan->add_flag("--refine,!--no-refine", refine, "also scan at doubled density");

  CLI::App* report = app.add_subcommand("report", "re-render a report document");
  add_common(report);
  report->add_option("--input", input_path, "json-lines report file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 64;
  }

  try {
    for (const std::string& spec : tol_specs) {
      auto eq = spec.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("expected name=value: " + spec);
      cfg.tolerance_overrides[spec.substr(0, eq)] = std::stod(spec.substr(eq + 1));
    }
    cfg.cache_dir = cgq::resolve_cache_dir(cache_flag);
    cfg.validate();

    if (weyl->parsed()) {
      cgq::WeylGroup wg = cgq::build_weyl_group(cgq::build_root_system(cfg.group));
      auto label = [&](int w) { return word_string(wg.canonical_word[w]); };
      std::ostringstream os;
      if (cfg.format == "csv") {
        os << "kind,a,b,value\n";
        for (int w = 0; w < wg.size(); ++w)
          os << "element," << label(w) << "," << wg.length[w] << ","
             << cgq::reduced_words(wg, w).size() << "\n";
        for (int w = 0; w < wg.size(); ++w)
          for (auto [v, gamma] : cgq::covers(wg, w))
            os << "cover," << label(v) << "," << label(w) << "," << gamma << "\n";
        for (int v = 0; v < wg.size(); ++v)
          for (int w = 0; w < wg.size(); ++w)
            if (cgq::bruhat_leq(wg, v, w))
              os << "bruhat," << label(v) << "," << label(w) << ",1\n";
        for (int v = 0; v < wg.size(); ++v)
          for (int w = 0; w < wg.size(); ++w)
            if (v != w && cgq::bruhat_leq(wg, v, w))
              os << "paths," << label(v) << "," << label(w) << ","
                 << cgq::enumerate_paths(wg, v, w).size() << "\n";
      } else {
        for (int w = 0; w < wg.size(); ++w) {
          ordered j;
          j["kind"] = "element";
          j["index"] = w;
          j["label"] = label(w);
          j["length"] = wg.length[w];
          j["reduced_words"] = cgq::reduced_words(wg, w).size();
          ordered cov = ordered::array();
          for (auto [v, gamma] : cgq::covers(wg, w))
            cov.push_back(ordered{{"down", label(v)}, {"root", gamma}});
          j["covers"] = cov;
          ordered leq = ordered::array();
          for (int v = 0; v < wg.size(); ++v)
            leq.push_back(cgq::bruhat_leq(wg, v, w) ? 1 : 0);
          j["bruhat_below"] = leq;
          os << j.dump() << "\n";
        }
        for (int v = 0; v < wg.size(); ++v)
          for (int w = 0; w < wg.size(); ++w) {
            if (v == w || !cgq::bruhat_leq(wg, v, w)) continue;
            ordered j;
            j["kind"] = "interval";
            j["v"] = label(v);
            j["w"] = label(w);
            j["paths"] = cgq::enumerate_paths(wg, v, w).size();
            ordered lats = ordered::array();
            for (const cgq::TorusLattice& lat : cgq::torus_union(wg, v, w)) {
              ordered cols = ordered::array();
              for (int c = 0; c < lat.rank(); ++c) {
                ordered col = ordered::array();
                for (int i = 0; i < lat.ambient; ++i) col.push_back(lat.basis(i, c));
                cols.push_back(col);
              }
              lats.push_back(cols);
            }
            j["torus_lattices"] = lats;
            os << j.dump() << "\n";
          }
      }
      emit(os.str(), output);
      return 0;
    }

    if (module->parsed()) {
      cgq::RootSystem rs = cgq::build_root_system(cfg.group);
      cgq::IntVector lambda = parse_lambda(lambda_text, rs.rank());
      std::vector<CheckReport> reports;
      for (double q : cfg.q_values) {
        cgq::VerifyOptions opts = cfg.options_for(q);
        CheckReport r = cgq::check_module_relations(opts, lambda);
        cgq::ModulePtr m = cgq::cached_module(rs, q, lambda, cfg.cache_dir);
        for (std::size_t s = 0; s < m->weights.size(); ++s)
          r.inputs.emplace_back("weight_" + std::to_string(s),
                                std::to_string(m->weight_dim[s]));
        reports.push_back(std::move(r));
      }
      emit(cgq::render_reports(reports, cfg.format), output);
      return cgq::exit_code_for(reports);
    }

    if (rep->parsed()) {
      cgq::RootSystem rs = cgq::build_root_system(cfg.group);
      cgq::WeylGroup wg = cgq::build_weyl_group(rs);
      std::vector<int> word = word_text.empty() ? wg.canonical_word[wg.longest]
                                                : parse_word(word_text);
      cgq::IntVector lambda = parse_lambda(lambda_text, rs.rank());
      std::ostringstream os;
      for (double q : cfg.q_values) {
        cgq::Representation rp(q, word, cfg.cutoff);
        cgq::ModulePtr m = cgq::cached_module(rs, q, lambda, cfg.cache_dir);
        ordered j;
        j["group"] = cfg.group;
        j["q"] = q;
        j["word"] = word_string(word);
        j["cutoff"] = cfg.cutoff;
        j["factors"] = static_cast<int>(word.size());
        ordered norms = ordered::object();
        for (int a = 0; a < std::min(m->dim, 4); ++a) {
          auto f = rp.image(cgq::basis_coefficient(m, a, 0));
          norms["C_" + std::to_string(a) + "_0"] = cgq::op_norm(*f, 48, cfg.seed);
        }
        j["image_norms"] = norms;
        os << j.dump() << "\n";
      }
      emit(os.str(), output);
      return 0;
    }

    if (verify->parsed()) {
      if (!config_path.empty()) {
        std::ifstream is(config_path);
        if (!is) throw std::invalid_argument("cannot read config " + config_path);
        std::stringstream buf;
        buf << is.rdbuf();
        cgq::RunConfig file_cfg = cgq::config_from_json(buf.str());
        selector = file_cfg.selector;
        file_cfg.cache_dir = cgq::resolve_cache_dir(file_cfg.cache_dir.empty()
                                                        ? cache_flag
                                                        : file_cfg.cache_dir);
        cfg = file_cfg;
      }
      std::vector<CheckReport> reports;
      for (double q : cfg.q_values) {
        auto part = cgq::run_checks(cfg.options_for(q), selector, cfg.jobs);
        for (auto& r : part) reports.push_back(std::move(r));
      }
      emit(cgq::render_reports(reports, cfg.format), output);
      return cgq::exit_code_for(reports);
    }

    if (scan->parsed()) {
      if (grid.size() < 3)
        throw std::invalid_argument("scan-q needs a grid of at least 3 points");
      for (double q : grid)
        if (!(q > 0.0 && q < 1.0))
          throw std::invalid_argument("grid values must lie in (0, 1)");
      cgq::RootSystem rs = cgq::build_root_system(cfg.group);
      cgq::WeylGroup wg = cgq::build_weyl_group(rs);
      std::vector<int> word = word_text.empty() ? wg.canonical_word[wg.longest]
                                                : parse_word(word_text);
      cgq::IntVector lambda = parse_lambda(lambda_text, rs.rank());
      cgq::ScanResult sr =
          cgq::scan_q(rs, lambda, word, grid, cfg.cutoff, refine);
      ordered j;
      j["group"] = cfg.group;
      j["lambda"] = lambda_text;
      j["word"] = word_string(word);
      j["cutoff"] = cfg.cutoff;
      j["grid"] = sr.grid;
      j["step_norms"] = sr.step_norms;
      j["max_step"] = sr.max_step;
      j["refined"] = sr.refined;
      if (sr.refined) {
        j["fine_grid"] = sr.fine_grid;
        j["fine_step_norms"] = sr.fine_step_norms;
        j["max_fine_step"] = sr.max_fine_step;
        j["ratio"] = sr.ratio;
      }
      emit(j.dump() + "\n", output);
      return 0;
    }

    if (report->parsed()) {
      std::ifstream is(input_path);
      if (!is) throw std::invalid_argument("cannot read report " + input_path);
      std::stringstream buf;
      buf << is.rdbuf();
      std::vector<CheckReport> reports = cgq::parse_reports(buf.str());
      emit(cgq::render_reports(reports, cfg.format), output);
      return cgq::exit_code_for(reports);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 64;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 64;
}
