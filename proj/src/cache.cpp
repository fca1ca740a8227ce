#include "cgq/cache.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

namespace cgq {

namespace {

constexpr int kSchemaVersion = 1;

// Mirrors QModule::key() so the filename is known before the module exists.
std::string entry_key(const RootSystem& rs, double q, const IntVector& lambda) {
  std::ostringstream os;
  os << rs.name << "_q" << q << "_l";
  for (int i = 0; i < lambda.size(); ++i) os << (i ? "-" : "") << lambda[i];
  return os.str();
}

nlohmann::json flatten(const MatrixXd& m) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(m(r, c));
  return a;
}

MatrixXd unflatten(const nlohmann::json& a, Eigen::Index rows, Eigen::Index cols) {
  if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != rows * cols)
    throw std::runtime_error("matrix shape mismatch");
  MatrixXd m(rows, cols);
  Eigen::Index k = 0;
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = a.at(k++).get<double>();
  return m;
}

ModulePtr load_entry(const RootSystem& rs, double q, const IntVector& lambda,
                     const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return nullptr;
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw std::runtime_error("unparseable entry");
  if (j.value("schema", -1) != kSchemaVersion) throw std::runtime_error("schema mismatch");
  if (j.value("kind", "") != "qmodule") throw std::runtime_error("wrong kind");
  if (j.value("group", "") != rs.name) throw std::runtime_error("group mismatch");
  if (j.value("q", 0.0) != q) throw std::runtime_error("q mismatch");

  const int n = rs.rank();
  auto jl = j.at("lambda");
  if (static_cast<int>(jl.size()) != n) throw std::runtime_error("lambda rank");
  for (int i = 0; i < n; ++i)
    if (jl.at(i).get<Int>() != lambda[i]) throw std::runtime_error("lambda mismatch");

  auto m = std::make_shared<QModule>();
  m->rs = rs;
  m->q = q;
  m->highest = lambda;
  m->dim = j.at("dim").get<int>();
  if (m->dim <= 0) throw std::runtime_error("bad dim");

  for (const auto& w : j.at("weights")) {
    IntVector wv(n);
    if (static_cast<int>(w.size()) != n) throw std::runtime_error("weight rank");
    for (int i = 0; i < n; ++i) wv[i] = w.at(i).get<Int>();
    m->weights.push_back(wv);
  }
  m->weight_offset = j.at("weight_offset").get<std::vector<int>>();
  m->weight_dim = j.at("weight_dim").get<std::vector<int>>();
  m->weight_of_basis = j.at("weight_of_basis").get<std::vector<int>>();
  if (m->weight_offset.size() != m->weights.size() ||
      m->weight_dim.size() != m->weights.size() ||
      static_cast<int>(m->weight_of_basis.size()) != m->dim)
    throw std::runtime_error("weight table shape");
  for (int b = 0; b < m->dim; ++b) {
    int s = m->weight_of_basis[b];
    if (s < 0 || s >= static_cast<int>(m->weights.size()))
      throw std::runtime_error("weight slot range");
  }

  auto je = j.at("E"), jf = j.at("F");
  if (static_cast<int>(je.size()) != n || static_cast<int>(jf.size()) != n)
    throw std::runtime_error("generator count");
  for (int i = 0; i < n; ++i) {
    m->E.push_back(unflatten(je.at(i), m->dim, m->dim));
    m->F.push_back(unflatten(jf.at(i), m->dim, m->dim));
  }
  m->Kexp = unflatten(j.at("Kexp"), n, m->dim);
  return m;
}

void store_entry(const QModule& m, const std::filesystem::path& file) {
  nlohmann::json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "qmodule";
  j["group"] = m.rs.name;
  j["q"] = m.q;
  nlohmann::json jl = nlohmann::json::array();
  for (int i = 0; i < m.highest.size(); ++i) jl.push_back(m.highest[i]);
  j["lambda"] = jl;
  j["dim"] = m.dim;
  nlohmann::json jw = nlohmann::json::array();
  for (const auto& w : m.weights) {
    nlohmann::json row = nlohmann::json::array();
    for (int i = 0; i < w.size(); ++i) row.push_back(w[i]);
    jw.push_back(row);
  }
  j["weights"] = jw;
  j["weight_offset"] = m.weight_offset;
  j["weight_dim"] = m.weight_dim;
  j["weight_of_basis"] = m.weight_of_basis;
  nlohmann::json je = nlohmann::json::array(), jf = nlohmann::json::array();
  for (std::size_t i = 0; i < m.E.size(); ++i) {
    je.push_back(flatten(m.E[i]));
    jf.push_back(flatten(m.F[i]));
  }
  j["E"] = je;
  j["F"] = jf;
  j["Kexp"] = flatten(m.Kexp);

  std::error_code ec;
  std::filesystem::create_directories(file.parent_path(), ec);
  std::filesystem::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << j.dump();
    if (!out) return;  // cache is best effort; leave no entry rather than a bad one
  }
  std::filesystem::rename(tmp, file, ec);
  if (ec) std::filesystem::remove(tmp, ec);
}

}  // namespace

std::string resolve_cache_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  const char* env = std::getenv("CGQ_CACHE");
  return env ? std::string(env) : std::string();
}

ModulePtr cached_module(const RootSystem& rs, double q, const IntVector& lambda,
                        const std::string& cache_dir, int dim_limit) {
  if (cache_dir.empty()) return build_module(rs, q, lambda, dim_limit);

  std::filesystem::path file =
      std::filesystem::path(cache_dir) / (entry_key(rs, q, lambda) + ".json");
  std::error_code ec;
  if (std::filesystem::exists(file, ec)) {
    try {
      if (ModulePtr m = load_entry(rs, q, lambda, file)) return m;
    } catch (const std::exception& e) {
      std::cerr << "warning: cache entry " << file.string() << " invalid ("
                << e.what() << "), rebuilding\n";
    }
  }
  ModulePtr m = build_module(rs, q, lambda, dim_limit);
  store_entry(*m, file);
  return m;
}

}  // namespace cgq
