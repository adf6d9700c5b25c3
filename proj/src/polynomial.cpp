#include "dirboot/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace dirboot {

namespace {
constexpr double kCancel = 64 * 2.220446049250313e-16;
}

Poly Poly::constant(double c) {
  Poly p;
  if (c != 0.0) p.terms_[{}] = c;
  return p;
}

Poly Poly::variable(Var v, double scale) {
  Poly p;
  if (scale != 0.0) p.terms_[{v}] = scale;
  return p;
}

bool Poly::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }

double Poly::constant_term() const {
  auto it = terms_.find({});
  return it == terms_.end() ? 0.0 : it->second;
}

std::size_t Poly::degree() const {
  std::size_t d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.size());
  return d;
}

double Poly::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [mono, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

std::set<Poly::Var> Poly::variables() const {
  std::set<Var> out;
  for (const auto& [m, c] : terms_) out.insert(m.begin(), m.end());
  return out;
}

void Poly::axpy(double scale, const Poly& other) {
  if (scale == 0.0) return;
  for (const auto& [m, c] : other.terms_) {
    const double add = scale * c;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      if (add != 0.0) terms_.emplace(m, add);
      continue;
    }
    const double sum = it->second + add;
    if (std::abs(sum) <= kCancel * std::max(std::abs(it->second), std::abs(add))) {
      terms_.erase(it);
    } else {
      it->second = sum;
    }
  }
}

Poly& Poly::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= s;
  return *this;
}

Poly Poly::operator*(const Poly& other) const {
  Poly out;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : other.terms_) {
      Monomial m;
      m.reserve(ma.size() + mb.size());
      std::merge(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(m));
      Poly t;
      t.terms_[std::move(m)] = ca * cb;
      out.axpy(1.0, t);
    }
  }
  return out;
}

std::optional<double> Poly::linear_coefficient(Var v) const {
  std::optional<double> c;
  for (const auto& [m, coef] : terms_) {
    const auto n = std::count(m.begin(), m.end(), v);
    if (n == 0) continue;
    if (n > 1 || m.size() != 1) return std::nullopt;
    c = coef;
  }
  return c;
}

Poly Poly::substitute(Var v, const Poly& value) const {
  Poly out;
  for (const auto& [m, c] : terms_) {
    Poly term = constant(c);
    Monomial rest;
    std::size_t power = 0;
    for (Var x : m) {
      if (x == v) {
        ++power;
      } else {
        rest.push_back(x);
      }
    }
    if (power == 0) {
      Poly t;
      t.terms_[m] = c;
      out.axpy(1.0, t);
      continue;
    }
    Poly r;
    r.terms_[rest] = c;
    for (std::size_t k = 0; k < power; ++k) r = r * value;
    out.axpy(1.0, r);
  }
  return out;
}

void Poly::prune(double tol) {
  std::erase_if(terms_, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
}

double Poly::evaluate(const std::vector<double>& values) const {
  double s = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = c;
    for (Var x : m) t *= values[x];
    s += t;
  }
  return s;
}

double Poly::magnitude(const std::vector<double>& values) const {
  double s = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = std::abs(c);
    for (Var x : m) t *= std::abs(values[x]);
    s += t;
  }
  return s;
}

std::string Poly::to_string(const std::function<std::string(Var)>& name) const {
  if (terms_.empty()) return "0";
  // Low degree first, then by variable ids.
  std::vector<std::pair<Monomial, double>> sorted(terms_.begin(), terms_.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.first.size() < b.first.size(); });
  std::string out;
  bool first = true;
  for (const auto& [m, c] : sorted) {
    const double mag = std::abs(c);
    out += first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + ");
    first = false;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", mag);
    std::string body;
    std::size_t i = 0;
    while (i < m.size()) {
      std::size_t j = i;
      while (j < m.size() && m[j] == m[i]) ++j;
      if (!body.empty()) body += "*";
      body += name(m[i]);
      if (j - i > 1) body += "^" + std::to_string(j - i);
      i = j;
    }
    if (body.empty()) {
      out += buf;
    } else if (mag == 1.0) {
      out += body;
    } else {
      out += std::string(buf) + "*" + body;
    }
  }
  return out;
}

}  // namespace dirboot
