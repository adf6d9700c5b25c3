#pragma once

#include <map>
#include <string>
#include <vector>

#include "dirboot/dirac.hpp"
#include "dirboot/moments.hpp"
#include "dirboot/multitrace.hpp"

namespace dirboot {

// coefficient * N^n_power * prod Tr(others) * remainder, one piece of the
// matrix derivative of a multitrace polynomial.
struct GradientTerm {
  Affine coefficient;
  int n_power = 0;
  std::vector<CyclicWord> others;
  Word remainder;
};

// Removing letter i at position p of a trace word leaves the letters after
// p followed by the letters before p. Identical pieces are merged.
std::vector<GradientTerm> cyclic_gradient(const MultiTracePolynomial& poly, Letter i);

// Sorted moment keys; the empty product is the constant 1.
using MomentProduct = std::vector<CyclicWord>;

// Large-N loop equation sum_{W = U i V} m_U m_V = < Tr(W d_i S) > / N^2
// with expectations factorized.
struct MomentRelation {
  Word source;
  Letter letter = 0;
  std::size_t alphabet_size = 1;
  std::map<MomentProduct, Affine> lhs;
  std::map<MomentProduct, Affine> rhs;

  // lhs - rhs, canonical.
  std::map<MomentProduct, Affine> difference() const;
  // Highest total letter count among terms whose coefficient is nonzero
  // at the given parameter values.
  std::size_t degree(const ParamValues& values) const;
  // e.g. "0 = 2*m_1 + g*(2*m_2 + 2*m_1^2)"
  std::string to_string() const;
};

std::size_t product_degree(const MomentProduct& p);

// group: the full symmetry group to impose (empty for none); moments are
// mapped to orbit representatives and symmetry-odd moments dropped.
MomentRelation generate_sde(const EnsembleSpec& spec, const Word& w, Letter i,
                            const std::vector<SymmetryAction>& group = {});
MomentRelation generate_sde(const MultiTracePolynomial& action, const Word& w, Letter i,
                            const std::vector<SymmetryAction>& group = {});

// |lhs - rhs| under the table.
double relation_residual(const MomentRelation& rel, const MomentTable& table, const ParamValues& values);

}  // namespace dirboot
