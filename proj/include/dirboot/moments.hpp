#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dirboot/words.hpp"

namespace dirboot {

// Storage index of a moment. Moments are taken to be real, so a cyclic
// class and the class of its adjoint share one value.
CyclicWord moment_key(const Word& w);
inline CyclicWord moment_key(const CyclicWord& w) { return moment_key(w.word()); }

// Result of pushing a moment through the symmetry group: orbit
// representative and sign, or nullopt if the moment is forced to vanish.
struct SymmetricKey {
  CyclicWord key;
  int sign = 1;
};
std::optional<SymmetricKey> symmetric_key(const Word& w, const std::vector<SymmetryAction>& group);

// "m_3" for one letter, "m_AABB" otherwise; "1" for the empty word.
std::string moment_name(const CyclicWord& w, std::size_t alphabet_size);
// Accepts "m3", "m_3", "m_AB", "mAB".
CyclicWord parse_moment_name(const std::string& name, std::size_t alphabet_size);

class MomentTable {
 public:
  explicit MomentTable(std::size_t alphabet_size = 1) : alphabet_size_(alphabet_size) {}

  // Single-matrix table from m_0..m_n; m_0 must be 1.
  static MomentTable from_sequence(const std::vector<double>& m);

  std::size_t alphabet_size() const { return alphabet_size_; }

  void set(const Word& w, double value);
  void set(const CyclicWord& w, double value) { set(w.word(), value); }
  bool has(const Word& w) const;
  // Throws NumericalError for a missing moment.
  double get(const Word& w) const;
  double get(const CyclicWord& w) const { return get(w.word()); }
  // One-matrix shorthand m_k.
  double m(std::size_t k) const { return get(power_word(0, k)); }

  const std::map<CyclicWord, double>& values() const { return values_; }

 private:
  std::size_t alphabet_size_;
  std::map<CyclicWord, double> values_;
};

}  // namespace dirboot
