#pragma once

#include <map>
#include <string>
#include <vector>

#include "dirboot/dirac.hpp"
#include "dirboot/loop_eqs.hpp"
#include "dirboot/moments.hpp"
#include "dirboot/polynomial.hpp"

namespace dirboot {

struct ClosureOptions {
  std::size_t max_degree = 8;
  bool impose_symmetry = false;  // spec.symmetries, or those detected from the action
  // Relative pivot threshold in the per-degree elimination.
  double pivot_tol = 1e-10;
};

struct ClosureEvaluation {
  MomentTable table;
  // Largest relative violation of a leftover polynomial constraint or of an
  // assigned value that the closure itself determines.
  double violation = 0.0;
  bool consistent = true;
};

// All moments up to max_degree expressed through a few search variables.
// Built for fixed numeric couplings: the elimination pivots are numbers,
// so a coupling that vanishes simply changes which moments are solved.
class Closure {
 public:
  enum class Kind { search, eliminated, solved };

  std::size_t alphabet_size() const { return alphabet_size_; }
  std::size_t max_degree() const { return max_degree_; }
  const ParamValues& couplings() const { return couplings_; }
  const std::vector<CyclicWord>& search_variables() const { return search_; }
  const std::vector<CyclicWord>& forced_zero() const { return forced_zero_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  std::size_t constraint_count() const { return constraints_.size(); }
  bool is_search_variable(const CyclicWord& key) const;
  bool determines(const CyclicWord& key) const;

  // Moment expressed in the search variables, e.g. "0.125 - 0.5*m_2 - 3*m_2^2".
  std::string expansion_string(const CyclicWord& key) const;
  std::vector<std::string> constraint_strings() const;
  // Every determined moment with its expansion, by degree.
  std::vector<std::pair<CyclicWord, std::string>> recipes() const;

  // assignment must cover every search variable. Entries for moments the
  // closure determines are compared, not used.
  ClosureEvaluation evaluate(const std::map<CyclicWord, double>& assignment, double tol = 1e-8) const;

 private:
  friend Closure build_closure(const EnsembleSpec&, const ParamValues&, const ClosureOptions&);

  struct Entry {
    CyclicWord key;
    Kind kind = Kind::solved;
    Poly recipe;     // in terms of lower moment ids
    Poly expansion;  // in terms of search variable ids
  };

  std::size_t id_of(const CyclicWord& key) const;
  std::string var_name(Poly::Var v) const;

  std::size_t alphabet_size_ = 1;
  std::size_t max_degree_ = 0;
  ParamValues couplings_;
  std::vector<SymmetryAction> group_;
  std::vector<Entry> entries_;
  std::map<CyclicWord, std::size_t> index_;
  // every moment class -> (representative id or -1 if forced zero, sign)
  std::map<CyclicWord, std::pair<long, int>> classes_;
  std::vector<std::size_t> order_;  // evaluation order
  std::vector<CyclicWord> search_;
  std::vector<CyclicWord> forced_zero_;
  std::vector<Poly> constraints_;
  std::vector<std::string> warnings_;
};

// Throws NumericalError when the relations are inconsistent at some degree.
Closure build_closure(const EnsembleSpec& spec, const ParamValues& couplings, const ClosureOptions& options);

MomentTable evaluate_moments(const Closure& closure, const std::map<CyclicWord, double>& assignment);

}  // namespace dirboot
