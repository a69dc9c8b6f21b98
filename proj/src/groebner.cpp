#include "ndcorr/ffcurves.hpp"

#include <algorithm>
#include <map>
#include <vector>

namespace ndcorr {

namespace {

// Monomials are exponent vectors over x_1..x_m, a_1..a_{m-1} in that order,
// so plain lexicographic comparison realizes lex with x_1 > ... > a_{m-1}.
using Monomial = std::vector<unsigned>;

struct LexGreater {
  bool operator()(const Monomial& A, const Monomial& B) const {
    return std::lexicographical_compare(B.begin(), B.end(), A.begin(), A.end());
  }
};

using Poly = std::map<Monomial, Int, LexGreater>;  // begin() is the leading term

void add_term(Poly& p, const Monomial& mono, const Int& coef) {
  auto it = p.find(mono);
  if (it == p.end()) {
    if (coef != 0) p.emplace(mono, coef);
    return;
  }
  it->second += coef;
  if (it->second == 0) p.erase(it);
}

bool divides(const Monomial& a, const Monomial& b) {
  for (size_t i = 0; i < a.size(); i++)
    if (a[i] > b[i]) return false;
  return true;
}

// p -= coef * shift * g
void sub_scaled(Poly& p, const Poly& g, const Monomial& shift, const Int& coef) {
  for (const auto& [mono, gc] : g) {
    Monomial shifted(mono);
    for (size_t i = 0; i < shifted.size(); i++) shifted[i] += shift[i];
    add_term(p, shifted, -coef * gc);
  }
}

// Plain multivariate division against monic generators. The first leading
// term no generator divides would land in the remainder for good, so the
// outcome of the zero-remainder question is already decided there.
bool reduces_to_zero(Poly h, const std::vector<Poly>& gens) {
  while (!h.empty()) {
    const Monomial lead = h.begin()->first;  // copies: the division edits h
    const Int coef = h.begin()->second;
    bool divided = false;
    for (const auto& g : gens) {
      const Monomial& glead = g.begin()->first;
      if (!divides(glead, lead)) continue;
      Monomial shift(lead);
      for (size_t i = 0; i < shift.size(); i++) shift[i] -= glead[i];
      sub_scaled(h, g, shift, coef);
      divided = true;
      break;
    }
    if (!divided) return false;
  }
  return true;
}

}  // namespace

bool groebner_selfcheck(int m, int d) {
  if (m < 2) throw std::invalid_argument("m must be >= 2");
  if (d < 2) throw std::invalid_argument("d must be >= 2");
  const size_t nvars = static_cast<size_t>(2 * m - 1);
  const unsigned du = static_cast<unsigned>(d);

  // g_j = x_j^d - x_{j+1}^d - a_j, leading term x_j^d
  std::vector<Poly> gens;
  for (int j = 0; j + 1 < m; j++) {
    Poly g;
    Monomial t(nvars, 0);
    t[j] = du;
    add_term(g, t, Int(1));
    t[j] = 0;
    t[j + 1] = du;
    add_term(g, t, Int(-1));
    t[j + 1] = 0;
    t[static_cast<size_t>(m) + j] = 1;
    add_term(g, t, Int(-1));
    gens.push_back(std::move(g));
  }

  // leading terms are coprime-free pairs x_i^d, x_j^d: the s-polynomial of
  // (g_i, g_j) is x_j^d g_i - x_i^d g_j
  for (size_t i = 0; i < gens.size(); i++) {
    for (size_t j = i + 1; j < gens.size(); j++) {
      Poly h;
      Monomial si(nvars, 0), sj(nvars, 0);
      sj[j] = du;
      si[i] = du;
      sub_scaled(h, gens[i], sj, Int(-1));
      sub_scaled(h, gens[j], si, Int(1));
      if (!reduces_to_zero(std::move(h), gens)) return false;
    }
  }
  return true;
}

}  // namespace ndcorr
