#include "dirboot/positivity.hpp"

#include <cmath>

#include "dirboot/error.hpp"

namespace dirboot {

MomentMatrix hankel_from_sequence(const std::vector<double>& m) {
  if (m.empty() || m[0] != 1.0) throw ModelError("Hankel sequence must start with m_0 = 1");
  if (m.size() % 2 == 0) throw ModelError("Hankel sequence needs an odd number of entries m_0..m_2n");
  const std::size_t n = m.size() / 2 + 1;
  MomentMatrix out;
  out.entries.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    out.basis.push_back(power_word(0, i));
    for (std::size_t j = 0; j < n; ++j)
      out.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i + j];
  }
  return out;
}

std::vector<Rational> exact_leading_minors(const std::vector<std::vector<Rational>>& a_in) {
  // Bareiss: after step k the pivot a[k][k] is the (k+1)-th leading minor,
  // as long as no earlier minor vanished.
  auto a = a_in;
  const std::size_t n = a.size();
  std::vector<Rational> minors;
  Rational prev = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (a[k].size() != n) throw ModelError("matrix must be square");
    minors.push_back(a[k][k]);
    if (a[k][k] == 0) {
      // Remaining leading minors need the unpivoted determinant.
      for (std::size_t s = k + 2; s <= n; ++s) {
        std::vector<std::vector<Rational>> sub(s, std::vector<Rational>(s));
        for (std::size_t i = 0; i < s; ++i)
          for (std::size_t j = 0; j < s; ++j) sub[i][j] = a_in[i][j];
        // Fraction-based elimination with row swaps.
        Rational det = 1;
        for (std::size_t c = 0; c < s; ++c) {
          std::size_t p = c;
          while (p < s && sub[p][c] == 0) ++p;
          if (p == s) {
            det = 0;
            break;
          }
          if (p != c) {
            std::swap(sub[p], sub[c]);
            det = -det;
          }
          det *= sub[c][c];
          for (std::size_t r = c + 1; r < s; ++r) {
            const Rational f = sub[r][c] / sub[c][c];
            for (std::size_t j = c; j < s; ++j) sub[r][j] -= f * sub[c][j];
          }
        }
        minors.push_back(det);
      }
      return minors;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    prev = a[k][k];
  }
  return minors;
}

std::vector<Rational> exact_hankel_minors(const std::vector<Rational>& m) {
  if (m.empty() || m[0] != 1) throw ModelError("Hankel sequence must start with m_0 = 1");
  if (m.size() % 2 == 0) throw ModelError("Hankel sequence needs an odd number of entries m_0..m_2n");
  const std::size_t n = m.size() / 2 + 1;
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = m[i + j];
  return exact_leading_minors(a);
}

MomentMatrix build_moment_matrix(const MomentTable& table, std::size_t alphabet_size, std::size_t level) {
  return build_moment_matrix(table, enumerate_words(alphabet_size, level));
}

MomentMatrix build_moment_matrix(const MomentTable& table, const std::vector<Word>& basis) {
  MomentMatrix out;
  out.basis = basis;
  const auto n = static_cast<Eigen::Index>(basis.size());
  out.entries.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Word ua = adjoint(basis[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = table.get(ua + basis[static_cast<std::size_t>(j)]);
      out.entries(i, j) = v;
      out.entries(j, i) = v;
    }
  }
  return out;
}

PsdReport psd_check(const MomentMatrix& m, double tol) { return psd_check(m.entries, tol); }

PsdReport psd_check(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) throw ModelError("moment matrix must be square");
  if (!m.allFinite()) throw NumericalError("moment matrix has non-finite entries");
  PsdReport r;
  if (m.rows() == 0) {
    r.feasible = true;
    return r;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolve failed");
  const auto& ev = es.eigenvalues();
  r.min_eigenvalue = ev.minCoeff();
  r.spectral_norm = ev.cwiseAbs().maxCoeff();
  r.tolerance = tol * std::max(1.0, r.spectral_norm);
  r.feasible = r.min_eigenvalue >= -r.tolerance;
  if (!r.feasible) {
    for (Eigen::Index k = 1; k <= m.rows(); ++k) {
      const double det = m.topLeftCorner(k, k).determinant();
      if (det < -r.tolerance) {
        r.first_negative_minor = static_cast<std::size_t>(k);
        break;
      }
    }
  }
  return r;
}

double carleman_indicator(const std::vector<double>& even_moments) {
  double s = 0.0;
  for (std::size_t k = 1; k <= even_moments.size(); ++k) {
    const double m = even_moments[k - 1];
    if (!(m > 0.0)) throw ModelError("Carleman sum needs positive even moments");
    s += std::pow(m, -1.0 / (2.0 * static_cast<double>(k)));
  }
  return s;
}

}  // namespace dirboot
