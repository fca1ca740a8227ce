#include "cgq/trig.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cgq {

TrigPolynomial TrigPolynomial::constant(int nvars, Complex c) {
  TrigPolynomial p(nvars);
  p.add_term(Exponent(nvars, 0), c);
  return p;
}

TrigPolynomial TrigPolynomial::monomial(const Exponent& e, Complex c) {
  TrigPolynomial p(static_cast<int>(e.size()));
  p.add_term(e, c);
  return p;
}

void TrigPolynomial::add_term(const Exponent& e, Complex c) {
  if (static_cast<int>(e.size()) != nvars_)
    throw std::invalid_argument("exponent arity mismatch");
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    if (std::abs(c) > kDropTol) terms_.emplace(e, c);
    return;
  }
  it->second += c;
  if (std::abs(it->second) <= kDropTol) terms_.erase(it);
}

TrigPolynomial TrigPolynomial::operator+(const TrigPolynomial& o) const {
  if (nvars_ != o.nvars_) throw std::invalid_argument("arity mismatch in +");
  TrigPolynomial out = *this;
  for (const auto& [e, c] : o.terms_) out.add_term(e, c);
  return out;
}

TrigPolynomial TrigPolynomial::operator*(const TrigPolynomial& o) const {
  if (nvars_ != o.nvars_) throw std::invalid_argument("arity mismatch in *");
  TrigPolynomial out(nvars_);
  for (const auto& [e1, c1] : terms_)
    for (const auto& [e2, c2] : o.terms_) {
      Exponent e = e1;
      for (int k = 0; k < nvars_; ++k) e[k] += e2[k];
      out.add_term(e, c1 * c2);
    }
  return out;
}

TrigPolynomial TrigPolynomial::operator*(Complex c) const {
  TrigPolynomial out(nvars_);
  for (const auto& [e, v] : terms_) out.add_term(e, v * c);
  return out;
}

TrigPolynomial TrigPolynomial::star() const {
  TrigPolynomial out(nvars_);
  for (const auto& [e, c] : terms_) {
    Exponent ne = e;
    for (auto& x : ne) x = -x;
    out.add_term(ne, std::conj(c));
  }
  return out;
}

Complex TrigPolynomial::evaluate(const std::vector<double>& angles) const {
  if (static_cast<int>(angles.size()) != nvars_)
    throw std::invalid_argument("angle arity mismatch");
  Complex v = 0.0;
  for (const auto& [e, c] : terms_) {
    double phase = 0.0;
    for (int k = 0; k < nvars_; ++k) phase += static_cast<double>(e[k]) * angles[k];
    v += c * Complex(std::cos(phase), std::sin(phase));
  }
  return v;
}

int default_grid_points(int rank) {
  if (rank <= 2) return 64;
  if (rank == 3) return 24;
  return 12;
}

TrigPolynomial::SupNorm TrigPolynomial::sup_norm(int points_per_dim) const {
  SupNorm s;
  for (const auto& [e, c] : terms_) s.coeff_bound += std::abs(c);
  if (terms_.empty()) return s;
  if (nvars_ == 0) {
    s.grid_max = s.coeff_bound;
    return s;
  }
  const int m = points_per_dim > 0 ? points_per_dim : default_grid_points(nvars_);
  std::vector<double> angles(nvars_, 0.0);
  std::vector<int> idx(nvars_, 0);
  const double step = 2.0 * std::numbers::pi / m;
  while (true) {
    for (int k = 0; k < nvars_; ++k) angles[k] = idx[k] * step;
    s.grid_max = std::max(s.grid_max, std::abs(evaluate(angles)));
    int k = 0;
    while (k < nvars_ && ++idx[k] == m) idx[k++] = 0;
    if (k == nvars_) break;
  }
  return s;
}

TrigPolynomial TrigPolynomial::restrict_exponents(const IntMatrix& pairings) const {
  if (pairings.rows() != nvars_) throw std::invalid_argument("pairing shape mismatch");
  const int nv = static_cast<int>(pairings.cols());
  TrigPolynomial out(nv);
  for (const auto& [e, c] : terms_) {
    Exponent ne(nv, 0);
    for (int k = 0; k < nv; ++k)
      for (int i = 0; i < nvars_; ++i) ne[k] += pairings(i, k) * e[i];
    out.add_term(ne, c);
  }
  return out;
}

bool TrigPolynomial::approx_equal(const TrigPolynomial& o, double tol) const {
  if (nvars_ != o.nvars_) return false;
  TrigPolynomial diff = *this + (o * Complex(-1.0));
  for (const auto& [e, c] : diff.terms())
    if (std::abs(c) > tol) return false;
  return true;
}

}  // namespace cgq
