#include "dirboot/dirac.hpp"

#include <cmath>
#include <sstream>

#include "dirboot/error.hpp"
#include "dirboot/moments.hpp"

namespace dirboot {

bool is_supported(Signature sig) {
  const int n = sig.p + sig.q;
  return sig.p >= 0 && sig.q >= 0 && (n == 1 || n == 2);
}

std::size_t alphabet_size_for(Signature sig) {
  if (!is_supported(sig)) throw ModelError("unsupported signature " + to_string(sig));
  return static_cast<std::size_t>(sig.p + sig.q);
}

std::string to_string(Signature sig) {
  return "(" + std::to_string(sig.p) + "," + std::to_string(sig.q) + ")";
}

Signature parse_signature(const std::string& text) {
  std::string s;
  for (char c : text)
    if (c != '(' && c != ')' && c != ' ') s += c;
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw ModelError("signature must look like 'p,q', got '" + text + "'");
  Signature sig;
  try {
    std::size_t used = 0;
    sig.p = std::stoi(s.substr(0, comma), &used);
    if (used != comma) throw std::invalid_argument("p");
    const std::string qs = s.substr(comma + 1);
    sig.q = std::stoi(qs, &used);
    if (used != qs.size()) throw std::invalid_argument("q");
  } catch (const std::exception&) {
    throw ModelError("signature must look like 'p,q', got '" + text + "'");
  }
  if (!is_supported(sig)) throw ModelError("unsupported signature " + to_string(sig));
  return sig;
}

SmallMatrix SmallMatrix::identity(std::size_t dim) {
  SmallMatrix m;
  m.dim = dim;
  m.a.assign(dim * dim, GaussInt{});
  for (std::size_t i = 0; i < dim; ++i) m.a[i * dim + i] = {1, 0};
  return m;
}

SmallMatrix SmallMatrix::operator*(const SmallMatrix& o) const {
  SmallMatrix out;
  out.dim = dim;
  out.a.assign(dim * dim, GaussInt{});
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t k = 0; k < dim; ++k)
      for (std::size_t j = 0; j < dim; ++j) out.a[i * dim + j] += (*this)(i, k) * o(k, j);
  return out;
}

GaussInt SmallMatrix::trace() const {
  GaussInt t;
  for (std::size_t i = 0; i < dim; ++i) t += (*this)(i, i);
  return t;
}

namespace {

SmallMatrix pauli(int which) {
  SmallMatrix m;
  m.dim = 2;
  switch (which) {
    case 1: m.a = {{0, 0}, {1, 0}, {1, 0}, {0, 0}}; break;
    case 2: m.a = {{0, 0}, {0, -1}, {0, 1}, {0, 0}}; break;
    default: m.a = {{1, 0}, {0, 0}, {0, 0}, {-1, 0}}; break;
  }
  return m;
}

}  // namespace

GammaBasis gamma_basis(Signature sig) {
  if (!is_supported(sig)) throw ModelError("unsupported signature " + to_string(sig));
  GammaBasis b;
  if (sig.p + sig.q == 1) {
    b.module_dim = 1;
    b.gammas = {SmallMatrix::identity(1)};
    b.hermiticity = {sig.p == 1 ? 1 : -1};
    b.letters = {0};
    return b;
  }
  b.module_dim = 2;
  b.letters = {0, 1};
  if (sig.p == 2) {
    // block form: sigma_3 (x) {A,.} + sigma_1 (x) {B,.}
    b.gammas = {pauli(3), pauli(1)};
    b.hermiticity = {1, 1};
  } else if (sig.p == 1) {
    b.gammas = {pauli(1), pauli(2)};
    b.hermiticity = {1, -1};
  } else {
    b.gammas = {pauli(1), pauli(2)};
    b.hermiticity = {-1, -1};
  }
  return b;
}

MultiTracePolynomial expand_dirac_power(Signature sig, int k) {
  if (k < 1) throw ModelError("Dirac power must be at least 1");
  if (k > 16) throw ModelError("Dirac power above 16 is not supported");
  const GammaBasis basis = gamma_basis(sig);
  const std::size_t n_gamma = basis.gammas.size();
  MultiTracePolynomial out(alphabet_size_for(sig));
  const std::size_t K = static_cast<std::size_t>(k);

  std::vector<std::size_t> idx(K, 0);
  for (;;) {
    SmallMatrix prod = SmallMatrix::identity(basis.module_dim);
    for (std::size_t j = 0; j < K; ++j) prod = prod * basis.gammas[idx[j]];
    const GaussInt g = prod.trace();
    if (g.re != 0 || g.im != 0) {
      // Each factor contributes K (x) 1 on the left or e 1 (x) K^T on the right;
      // Tr(X (x) Y^T...) splits into Tr(left word) Tr(reversed right word).
      for (std::size_t mask = 0; mask < (std::size_t{1} << K); ++mask) {
        Word left, right;
        int sign = 1;
        for (std::size_t j = 0; j < K; ++j) {
          const Letter x = basis.letters[idx[j]];
          if (mask & (std::size_t{1} << j)) {
            right.letters.push_back(x);
            sign *= basis.hermiticity[idx[j]];
          } else {
            left.letters.push_back(x);
          }
        }
        // The imaginary parts are tracked as a separate parameter and must
        // cancel in the total.
        if (g.re != 0) out.add_term(Affine(Rational(g.re * sign)), 0, {left, adjoint(right)});
        if (g.im != 0) out.add_term(Affine::param("__imag", Rational(g.im * sign)), 0, {left, adjoint(right)});
      }
    }
    std::size_t pos = 0;
    while (pos < K && ++idx[pos] == n_gamma) idx[pos++] = 0;
    if (pos == K) break;
  }
  for (const auto& t : out.terms())
    if (!t.coefficient.is_constant())
      throw NumericalError("Dirac expansion produced a non-real coefficient");
  return out;
}

EnsembleSpec make_dirac_spec(Signature sig, std::map<int, Affine> couplings) {
  EnsembleSpec s;
  s.signature = sig;
  s.alphabet_size = alphabet_size_for(sig);
  s.couplings = std::move(couplings);
  return s;
}

EnsembleSpec make_single_trace_spec(std::map<int, Affine> couplings) {
  EnsembleSpec s;
  s.alphabet_size = 1;
  s.couplings = std::move(couplings);
  return s;
}

MultiTracePolynomial build_action(const EnsembleSpec& spec) {
  MultiTracePolynomial action(spec.alphabet_size);
  for (const auto& [k, t] : spec.couplings) {
    if (k < 1) throw ModelError("coupling power must be at least 1, got " + std::to_string(k));
    if (t.is_zero()) continue;
    if (spec.single_trace()) {
      MultiTracePolynomial term(1);
      term.add_term(Affine(1), 1, {power_word(0, static_cast<std::size_t>(k))});
      action.add(term, t);
    } else {
      action.add(expand_dirac_power(*spec.signature, k), t);
    }
  }
  return action;
}

namespace {

MultiTracePolynomial transform(const MultiTracePolynomial& p, const SymmetryAction& s) {
  MultiTracePolynomial out(p.alphabet_size());
  for (const auto& t : p.terms()) {
    std::vector<Word> words;
    int sign = 1;
    for (const auto& f : t.factors) {
      auto [w, sg] = apply_symmetry(f.word(), s);
      words.push_back(std::move(w));
      sign *= sg;
    }
    out.add_term(t.coefficient * Rational(sign), t.n_power, words);
  }
  return out;
}

}  // namespace

std::vector<SymmetryAction> detect_symmetries(const MultiTracePolynomial& action) {
  const std::size_t n = action.alphabet_size();
  std::vector<SymmetryAction> candidates;
  for (std::size_t x = 0; x < n; ++x) candidates.push_back(SymmetryAction::flip(n, static_cast<Letter>(x)));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y)
      candidates.push_back(SymmetryAction::swap(n, static_cast<Letter>(x), static_cast<Letter>(y)));
  std::vector<SymmetryAction> out;
  for (const auto& c : candidates)
    if (transform(action, c) == action) out.push_back(c);
  return out;
}

double dirac_moment(Signature sig, int l, const MomentTable& table) {
  const auto poly = expand_dirac_power(sig, l);
  double d = 0.0;
  for (const auto& t : poly.terms()) {
    const int power = t.n_power + static_cast<int>(t.factors.size());
    if (power < 2) continue;
    if (power > 2) throw ModelError("Tr D^k term scales faster than N^2");
    double v = to_double(t.coefficient.constant());
    for (const auto& f : t.factors) v *= table.get(f);
    d += v;
  }
  return d;
}

double conjectured_m2(double t2, double t4) {
  if (!(t4 > 0.0)) throw ModelError("conjectured second moment needs t4 > 0");
  const double disc = t2 * t2 + 8.0 * t4;
  if (disc < 0.0) throw ModelError("t2^2 + 8 t4 must be nonnegative");
  // Rationalized form avoids cancellation for large positive t2.
  const double r = std::sqrt(disc);
  return t2 >= 0.0 ? 1.0 / (r + t2) : (r - t2) / (8.0 * t4);
}

}  // namespace dirboot
