#include "dirboot/loop_eqs.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "dirboot/error.hpp"

namespace dirboot {

std::vector<GradientTerm> cyclic_gradient(const MultiTracePolynomial& poly, Letter i) {
  using Key = std::tuple<int, std::vector<CyclicWord>, Word>;
  std::map<Key, Affine> merged;
  for (const auto& t : poly.terms()) {
    for (std::size_t f = 0; f < t.factors.size(); ++f) {
      // Equal factors contribute identical pieces; the product rule counts each.
      std::vector<CyclicWord> others;
      for (std::size_t g = 0; g < t.factors.size(); ++g)
        if (g != f) others.push_back(t.factors[g]);
      const Word& w = t.factors[f].word();
      for (std::size_t p = 0; p < w.size(); ++p) {
        if (w[p] != i) continue;
        Word rem;
        rem.letters.insert(rem.letters.end(), w.letters.begin() + static_cast<long>(p) + 1, w.letters.end());
        rem.letters.insert(rem.letters.end(), w.letters.begin(), w.letters.begin() + static_cast<long>(p));
        auto& slot = merged[Key{t.n_power, others, rem}];
        slot += t.coefficient;
      }
    }
  }
  std::vector<GradientTerm> out;
  for (auto& [key, coef] : merged) {
    if (coef.is_zero()) continue;
    out.push_back({coef, std::get<0>(key), std::get<1>(key), std::get<2>(key)});
  }
  return out;
}

std::size_t product_degree(const MomentProduct& p) {
  std::size_t d = 0;
  for (const auto& w : p) d += w.size();
  return d;
}

namespace {

// Maps a list of trace words to a canonical product; returns false when a
// symmetry-odd moment kills the term.
bool canonical_product(const std::vector<Word>& words, const std::vector<SymmetryAction>& group,
                       MomentProduct& out, int& sign) {
  out.clear();
  sign = 1;
  for (const auto& w : words) {
    if (w.empty()) continue;
    if (group.empty()) {
      out.push_back(moment_key(w));
      continue;
    }
    auto k = symmetric_key(w, group);
    if (!k) return false;
    out.push_back(k->key);
    sign *= k->sign;
  }
  std::sort(out.begin(), out.end());
  return true;
}

void accumulate(std::map<MomentProduct, Affine>& side, MomentProduct p, const Affine& c) {
  auto& slot = side[p];
  slot += c;
  if (slot.is_zero()) side.erase(p);
}

}  // namespace

MomentRelation generate_sde(const EnsembleSpec& spec, const Word& w, Letter i,
                            const std::vector<SymmetryAction>& group) {
  return generate_sde(build_action(spec), w, i, group);
}

MomentRelation generate_sde(const MultiTracePolynomial& action, const Word& w, Letter i,
                            const std::vector<SymmetryAction>& group) {
  if (i >= action.alphabet_size()) throw ModelError("loop equation letter outside the alphabet");
  for (Letter x : w.letters)
    if (x >= action.alphabet_size()) throw ModelError("loop equation word uses a letter outside the alphabet");

  MomentRelation rel;
  rel.source = w;
  rel.letter = i;
  rel.alphabet_size = action.alphabet_size();

  MomentProduct prod;
  int sign = 1;
  for (std::size_t p = 0; p < w.size(); ++p) {
    if (w[p] != i) continue;
    Word u(std::vector<Letter>(w.letters.begin(), w.letters.begin() + static_cast<long>(p)));
    Word v(std::vector<Letter>(w.letters.begin() + static_cast<long>(p) + 1, w.letters.end()));
    if (canonical_product({u, v}, group, prod, sign)) accumulate(rel.lhs, prod, Affine(Rational(sign)));
  }

  for (const auto& t : action.terms()) {
    const int power = t.n_power + static_cast<int>(t.factors.size());
    if (power > 2)
      throw ModelError("action term " + [&] {
        MultiTracePolynomial one(action.alphabet_size());
        std::vector<Word> ws;
        for (const auto& f : t.factors) ws.push_back(f.word());
        one.add_term(t.coefficient, t.n_power, ws);
        return one.to_string();
      }() + " grows faster than N^2");
  }
  for (const auto& g : cyclic_gradient(action, i)) {
    // Tr(W R) * prod Tr(others) * N^n over N^2.
    const int power = g.n_power + 1 + static_cast<int>(g.others.size());
    if (power < 2) continue;
    std::vector<Word> words{w + g.remainder};
    for (const auto& o : g.others) words.push_back(o.word());
    if (canonical_product(words, group, prod, sign)) accumulate(rel.rhs, prod, g.coefficient * Rational(sign));
  }
  return rel;
}

std::map<MomentProduct, Affine> MomentRelation::difference() const {
  auto out = lhs;
  for (const auto& [p, c] : rhs) accumulate(out, p, -c);
  return out;
}

std::size_t MomentRelation::degree(const ParamValues& values) const {
  std::size_t d = 0;
  for (const auto& [p, c] : difference())
    if (c.evaluate(values) != 0.0) d = std::max(d, product_degree(p));
  return d;
}

namespace {

std::string product_string(const MomentProduct& p, std::size_t alphabet_size) {
  std::string out;
  std::size_t i = 0;
  while (i < p.size()) {
    std::size_t j = i;
    while (j < p.size() && p[j] == p[i]) ++j;
    if (!out.empty()) out += "*";
    out += moment_name(p[i], alphabet_size);
    if (j - i > 1) out += "^" + std::to_string(j - i);
    i = j;
  }
  return out;
}

// Sum of rational multiples of products, fewest factors first.
std::string group_string(std::vector<std::pair<MomentProduct, Rational>> terms, std::size_t alphabet_size) {
  std::stable_sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
    if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
    return a.first < b.first;
  });
  std::string out;
  bool first = true;
  for (const auto& [p, c] : terms) {
    const bool neg = c < 0;
    const Rational mag = neg ? Rational(-c) : c;
    out += first ? (neg ? "-" : "") : (neg ? " - " : " + ");
    first = false;
    const std::string body = product_string(p, alphabet_size);
    if (body.empty()) {
      out += to_string(mag);
    } else if (mag == 1) {
      out += body;
    } else {
      out += to_string(mag) + "*" + body;
    }
  }
  return out;
}

std::string side_string(const std::map<MomentProduct, Affine>& side, std::size_t alphabet_size) {
  std::vector<std::pair<MomentProduct, Rational>> constant;
  std::map<std::string, std::vector<std::pair<MomentProduct, Rational>>> by_param;
  for (const auto& [p, c] : side) {
    if (c.constant() != 0) constant.emplace_back(p, c.constant());
    for (const auto& [name, s] : c.params()) by_param[name].emplace_back(p, s);
  }
  std::string out = constant.empty() ? "" : group_string(constant, alphabet_size);
  for (auto& [name, terms] : by_param) {
    std::string piece;
    if (terms.size() == 1) {
      const auto& [p, s] = terms.front();
      const bool neg = s < 0;
      const Rational mag = neg ? Rational(-s) : s;
      const std::string body = product_string(p, alphabet_size);
      piece = (mag == 1 ? "" : to_string(mag) + "*") + name + (body.empty() ? "" : "*" + body);
      out += out.empty() ? (neg ? "-" : "") : (neg ? " - " : " + ");
    } else {
      piece = name + "*(" + group_string(terms, alphabet_size) + ")";
      out += out.empty() ? "" : " + ";
    }
    out += piece;
  }
  return out.empty() ? "0" : out;
}

}  // namespace

std::string MomentRelation::to_string() const {
  return side_string(lhs, alphabet_size) + " = " + side_string(rhs, alphabet_size);
}

double relation_residual(const MomentRelation& rel, const MomentTable& table, const ParamValues& values) {
  double r = 0.0;
  for (const auto& [p, c] : rel.difference()) {
    double t = c.evaluate(values);
    for (const auto& w : p) t *= table.get(w);
    r += t;
  }
  return std::abs(r);
}

}  // namespace dirboot
