#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dirboot/multitrace.hpp"
#include "dirboot/words.hpp"

namespace dirboot {

class MomentTable;

struct Signature {
  int p = 1;
  int q = 0;
  friend bool operator==(const Signature&, const Signature&) = default;
};

bool is_supported(Signature sig);
// Number of Hermitian matrix variables: 1 for (1,0)/(0,1), 2 otherwise.
std::size_t alphabet_size_for(Signature sig);
std::string to_string(Signature sig);
// "1,0" or "(1,0)"
Signature parse_signature(const std::string& text);

// Gaussian integer entry; every gamma product we need stays in Z[i].
struct GaussInt {
  long re = 0;
  long im = 0;
  GaussInt operator*(const GaussInt& o) const { return {re * o.re - im * o.im, re * o.im + im * o.re}; }
  GaussInt& operator+=(const GaussInt& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  friend bool operator==(const GaussInt&, const GaussInt&) = default;
};

struct SmallMatrix {
  std::size_t dim = 1;
  std::vector<GaussInt> a;  // row-major
  GaussInt operator()(std::size_t i, std::size_t j) const { return a[i * dim + j]; }
  static SmallMatrix identity(std::size_t dim);
  SmallMatrix operator*(const SmallMatrix& o) const;
  GaussInt trace() const;
  friend bool operator==(const SmallMatrix&, const SmallMatrix&) = default;
};

// D = sum_I gamma_I (x) (K_I (x) 1 + e_I 1 (x) K_I^T), i.e. {K_I, .} for
// e_I = +1 and [K_I, .] for e_I = -1. Gamma matrices are written in their
// Hermitian form; for the anti-Hermitian generators the factor i has been
// absorbed into the matrix variable, which also turns the anticommutator
// into a commutator.
struct GammaBasis {
  std::size_t module_dim = 1;
  std::vector<SmallMatrix> gammas;
  std::vector<int> hermiticity;  // e_I
  std::vector<Letter> letters;   // matrix variable attached to each gamma
};

GammaBasis gamma_basis(Signature sig);

// Exact Tr(D^k) as a multitrace polynomial in the matrix variables.
MultiTracePolynomial expand_dirac_power(Signature sig, int k);

struct FermionBlock {
  double mass = 0.0;
  double trace_regulator = 1.0;  // a
  double beta2 = 2.0;
};

// Either a Dirac ensemble S = sum_k t_k Tr D^k of a given signature, or
// (no signature) a one-matrix single-trace model S = N sum_k t_k Tr H^k,
// used for validation against classical results.
struct EnsembleSpec {
  std::string name;
  std::optional<Signature> signature;
  std::map<int, Affine> couplings;
  std::size_t alphabet_size = 1;
  std::vector<SymmetryAction> symmetries;  // generators
  std::optional<FermionBlock> fermion;
  ParamValues params;  // values for the symbols used in couplings

  bool single_trace() const { return !signature.has_value(); }
};

EnsembleSpec make_dirac_spec(Signature sig, std::map<int, Affine> couplings);
EnsembleSpec make_single_trace_spec(std::map<int, Affine> couplings);

MultiTracePolynomial build_action(const EnsembleSpec& spec);

// Generators among single-letter flips and letter swaps that leave the
// action invariant for every value of the parameters.
std::vector<SymmetryAction> detect_symmetries(const MultiTracePolynomial& action);

// Leading large-N value of Tr(D^l)/N^2.
double dirac_moment(Signature sig, int l, const MomentTable& table);

// (sqrt(t2^2 + 8 t4) - t2) / (8 t4)
double conjectured_m2(double t2, double t4);

}  // namespace dirboot
