#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace dirboot {

// Sparse commutative polynomial with double coefficients over integer
// variable ids. Used for closure recipes, where the variables are moments.
class Poly {
 public:
  using Var = std::uint32_t;
  using Monomial = std::vector<Var>;  // sorted multiset of variable ids

  Poly() = default;
  static Poly constant(double c);
  static Poly variable(Var v, double scale = 1.0);

  const std::map<Monomial, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  double constant_term() const;
  std::size_t degree() const;
  double max_abs_coefficient() const;
  std::set<Var> variables() const;

  // this += scale * other. A coefficient that cancels down to roundoff of
  // the operands is dropped, so exact cancellations stay exact zeros.
  void axpy(double scale, const Poly& other);
  Poly& operator+=(const Poly& other) {
    axpy(1.0, other);
    return *this;
  }
  Poly& operator*=(double s);
  Poly operator*(const Poly& other) const;

  // Coefficient c when the polynomial is c*v + Q with Q free of v.
  std::optional<double> linear_coefficient(Var v) const;
  // Replaces v by the given polynomial.
  Poly substitute(Var v, const Poly& value) const;
  // Drops terms with |coefficient| <= tol.
  void prune(double tol);

  // values indexed by variable id
  double evaluate(const std::vector<double>& values) const;
  // Sum of |term| at the given values; the natural scale for a residual.
  double magnitude(const std::vector<double>& values) const;

  std::string to_string(const std::function<std::string(Var)>& name) const;

 private:
  std::map<Monomial, double> terms_;
};

}  // namespace dirboot
