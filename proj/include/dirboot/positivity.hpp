#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dirboot/moments.hpp"
#include "dirboot/rational.hpp"
#include "dirboot/words.hpp"

namespace dirboot {

// entry(u, v) = m at the class of adjoint(u) v
struct MomentMatrix {
  std::vector<Word> basis;
  Eigen::MatrixXd entries;
};

struct PsdReport {
  bool feasible = false;
  double min_eigenvalue = 0.0;
  double tolerance = 0.0;     // absolute threshold actually applied
  double spectral_norm = 0.0;
  // Size of the first leading principal minor that is negative, when infeasible.
  std::optional<std::size_t> first_negative_minor;
};

constexpr double kDefaultPsdTol = 1e-10;

// (n+1) x (n+1) matrix m_{i+j} from m_0..m_{2n}; m_0 must be 1.
MomentMatrix hankel_from_sequence(const std::vector<double>& m);
// Exact leading principal minors of the Hankel matrix of m_0..m_{2n}
// (fraction-free elimination).
std::vector<Rational> exact_hankel_minors(const std::vector<Rational>& m);
std::vector<Rational> exact_leading_minors(const std::vector<std::vector<Rational>>& a);

// basis: words of length <= level in graded-lex order unless given.
MomentMatrix build_moment_matrix(const MomentTable& table, std::size_t alphabet_size, std::size_t level);
MomentMatrix build_moment_matrix(const MomentTable& table, const std::vector<Word>& basis);

// Feasible iff min eigenvalue >= -tol * max(1, ||M||).
PsdReport psd_check(const MomentMatrix& m, double tol = kDefaultPsdTol);
PsdReport psd_check(const Eigen::MatrixXd& m, double tol = kDefaultPsdTol);

// Partial Carleman sum sum_k m_{2k}^{-1/(2k)} over the given m_2, m_4, ...
double carleman_indicator(const std::vector<double>& even_moments);

}  // namespace dirboot
