#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dirboot {

// Index of a Hermitian matrix symbol in the model's alphabet.
using Letter = std::uint8_t;

// A finite product of matrix symbols. The empty word is the identity.
struct Word {
  std::vector<Letter> letters;

  Word() = default;
  explicit Word(std::vector<Letter> l) : letters(std::move(l)) {}

  std::size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }
  Letter operator[](std::size_t i) const { return letters[i]; }

  Word operator+(const Word& rhs) const;

  friend bool operator==(const Word&, const Word&) = default;
  // Plain lexicographic order on letter indices.
  friend auto operator<=>(const Word& a, const Word& b) {
    return a.letters <=> b.letters;
  }
};

// Graded-lexicographic order: shorter words first, ties broken lexicographically.
bool graded_less(const Word& a, const Word& b);

Word power_word(Letter letter, std::size_t k);
Word rotate(const Word& w, std::size_t k);

// Trace word: the lexicographically minimal rotation of a Word. Only
// constructible through canonical_cyclic, so the invariant always holds.
class CyclicWord {
 public:
  CyclicWord() = default;

  const Word& word() const { return rep_; }
  std::size_t size() const { return rep_.size(); }
  bool empty() const { return rep_.empty(); }

  friend bool operator==(const CyclicWord&, const CyclicWord&) = default;
  // Graded-lex, so sorted containers of CyclicWords list low degrees first.
  friend std::strong_ordering operator<=>(const CyclicWord& a, const CyclicWord& b);

 private:
  friend CyclicWord canonical_cyclic(const Word& w);
  explicit CyclicWord(Word w) : rep_(std::move(w)) {}
  Word rep_;
};

// Minimal rotation (Booth's algorithm).
CyclicWord canonical_cyclic(const Word& w);

// Letters are Hermitian, so the adjoint is the reversed word.
Word adjoint(const Word& w);

// Per-letter sign flips followed by a letter permutation:
// letter x maps to signs[x] * perm[x].
struct SymmetryAction {
  std::vector<int> signs;
  std::vector<Letter> perm;

  static SymmetryAction identity(std::size_t alphabet_size);
  static SymmetryAction flip(std::size_t alphabet_size, Letter letter);
  static SymmetryAction swap(std::size_t alphabet_size, Letter a, Letter b);

  std::size_t alphabet_size() const { return perm.size(); }
  bool valid() const;

  // (*this) after (first).
  SymmetryAction compose(const SymmetryAction& first) const;

  friend bool operator==(const SymmetryAction&, const SymmetryAction&) = default;
};

std::pair<Word, int> apply_symmetry(const Word& w, const SymmetryAction& s);

// All elements of the finite group generated by the given actions.
std::vector<SymmetryAction> generate_group(const std::vector<SymmetryAction>& generators,
                                           std::size_t alphabet_size);

// All words of length 0..max_len in graded-lexicographic order.
std::vector<Word> enumerate_words(std::size_t alphabet_size, std::size_t max_len);

// Letters print as H for a one-letter alphabet, A, B, ... up to 26 letters,
// X0, X1, ... beyond that.
std::string letter_name(Letter letter, std::size_t alphabet_size);
std::string to_string(const Word& w, std::size_t alphabet_size);
std::string to_string(const CyclicWord& w, std::size_t alphabet_size);
// Compressed powers, "A^2B^2", "H^3"; used inside Tr(...).
std::string to_power_string(const Word& w, std::size_t alphabet_size);
// Inverse of to_string; "1" and "" both give the empty word.
Word parse_word(std::string_view text, std::size_t alphabet_size);

}  // namespace dirboot
