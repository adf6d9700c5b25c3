#pragma once

#include <map>
#include <string>
#include <vector>

#include "dirboot/rational.hpp"
#include "dirboot/words.hpp"

namespace dirboot {

// Named coupling parameters and their numeric values (e.g. {"g": 0.1}).
using ParamValues = std::map<std::string, double>;

// Exact coefficient that is affine in named coupling parameters:
// constant + sum_p coeff_p * p. Actions are linear in the couplings, so
// every coefficient that appears in an action or a loop equation has
// this form.
class Affine {
 public:
  Affine() = default;
  Affine(Rational constant) : constant_(std::move(constant)) {}  // NOLINT: implicit by intent
  Affine(long constant) : constant_(constant) {}                 // NOLINT
  static Affine param(const std::string& name, Rational scale = 1);

  const Rational& constant() const { return constant_; }
  const std::map<std::string, Rational>& params() const { return params_; }

  bool is_zero() const { return constant_ == 0 && params_.empty(); }
  bool is_constant() const { return params_.empty(); }

  Affine& operator+=(const Affine& rhs);
  Affine& operator*=(const Rational& s);
  friend Affine operator+(Affine a, const Affine& b) { return a += b; }
  friend Affine operator*(Affine a, const Rational& s) { return a *= s; }
  friend Affine operator*(const Rational& s, Affine a) { return a *= s; }
  friend Affine operator-(Affine a) { return a *= Rational(-1); }
  friend bool operator==(const Affine&, const Affine&) = default;

  // Throws ModelError when a parameter has no value.
  double evaluate(const ParamValues& values) const;

  std::string to_string() const;

 private:
  void prune();
  Rational constant_{0};
  std::map<std::string, Rational> params_;
};

// Parses affine expressions such as "1/4", "g/6", "2*g", "-t2 + 1", "0.5*g".
Affine parse_affine(const std::string& text);

// coefficient * N^n_power * prod Tr(factor).
struct TraceMonomial {
  Affine coefficient;
  int n_power = 0;
  std::vector<CyclicWord> factors;  // sorted, never empty words

  // Total number of letters across factors.
  std::size_t degree() const;
};

// Canonically merged sum of TraceMonomials. Tr(1) = N is absorbed into
// n_power and zero coefficients are pruned.
class MultiTracePolynomial {
 public:
  MultiTracePolynomial() = default;
  explicit MultiTracePolynomial(std::size_t alphabet_size) : alphabet_size_(alphabet_size) {}

  std::size_t alphabet_size() const { return alphabet_size_; }

  // Adds coefficient * N^n_power * prod Tr(w) over the given (not
  // necessarily canonical, possibly empty) words.
  void add_term(const Affine& coefficient, int n_power, const std::vector<Word>& trace_words);
  void add(const MultiTracePolynomial& other, const Rational& scale = 1);
  void add(const MultiTracePolynomial& other, const Affine& scale);

  // Terms in canonical order: higher N power first, then by factor words.
  std::vector<TraceMonomial> terms() const;
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  // Replaces parameter symbols by numbers; the result has constant
  // coefficients (exact rational approximations are not attempted, the
  // numeric form is used only for evaluation).
  std::vector<std::pair<double, TraceMonomial>> numeric_terms(const ParamValues& values) const;

  // Highest total letter count of any term with nonzero numeric coefficient.
  std::size_t degree(const ParamValues& values) const;

  // e.g. "2*N*Tr(H^2) + 2*(Tr(H))^2"
  std::string to_string() const;

  friend bool operator==(const MultiTracePolynomial&, const MultiTracePolynomial&) = default;

 private:
  using Key = std::pair<int, std::vector<CyclicWord>>;
  std::size_t alphabet_size_ = 1;
  std::map<Key, Affine> terms_;
};

}  // namespace dirboot
