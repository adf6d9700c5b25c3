#include "dirboot/words.hpp"

#include <algorithm>
#include <set>

#include "dirboot/error.hpp"

namespace dirboot {

Word Word::operator+(const Word& rhs) const {
  Word out = *this;
  out.letters.insert(out.letters.end(), rhs.letters.begin(), rhs.letters.end());
  return out;
}

bool graded_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a.letters < b.letters;
}

Word power_word(Letter letter, std::size_t k) { return Word(std::vector<Letter>(k, letter)); }

Word rotate(const Word& w, std::size_t k) {
  if (w.empty()) return w;
  Word out = w;
  std::rotate(out.letters.begin(), out.letters.begin() + static_cast<long>(k % w.size()),
              out.letters.end());
  return out;
}

std::strong_ordering operator<=>(const CyclicWord& a, const CyclicWord& b) {
  if (a.size() != b.size()) return a.size() <=> b.size();
  return a.rep_.letters <=> b.rep_.letters;
}

CyclicWord canonical_cyclic(const Word& w) {
  const std::size_t n = w.size();
  if (n < 2) return CyclicWord(w);
  // Booth's least-rotation via failure function on the doubled string.
  std::vector<Letter> s(2 * n);
  for (std::size_t i = 0; i < 2 * n; ++i) s[i] = w.letters[i % n];
  std::vector<long> f(2 * n, -1);
  long k = 0;
  for (long j = 1; j < static_cast<long>(2 * n); ++j) {
    long i = f[static_cast<std::size_t>(j - k - 1)];
    while (i != -1 && s[static_cast<std::size_t>(j)] != s[static_cast<std::size_t>(k + i + 1)]) {
      if (s[static_cast<std::size_t>(j)] < s[static_cast<std::size_t>(k + i + 1)]) k = j - i - 1;
      i = f[static_cast<std::size_t>(i)];
    }
    if (i == -1 && s[static_cast<std::size_t>(j)] != s[static_cast<std::size_t>(k + i + 1)]) {
      if (s[static_cast<std::size_t>(j)] < s[static_cast<std::size_t>(k + i + 1)]) k = j;
      f[static_cast<std::size_t>(j - k)] = -1;
    } else {
      f[static_cast<std::size_t>(j - k)] = i + 1;
    }
  }
  return CyclicWord(rotate(w, static_cast<std::size_t>(k)));
}

Word adjoint(const Word& w) {
  Word out = w;
  std::reverse(out.letters.begin(), out.letters.end());
  return out;
}

SymmetryAction SymmetryAction::identity(std::size_t alphabet_size) {
  SymmetryAction s;
  s.signs.assign(alphabet_size, 1);
  s.perm.resize(alphabet_size);
  for (std::size_t i = 0; i < alphabet_size; ++i) s.perm[i] = static_cast<Letter>(i);
  return s;
}

SymmetryAction SymmetryAction::flip(std::size_t alphabet_size, Letter letter) {
  auto s = identity(alphabet_size);
  s.signs.at(letter) = -1;
  return s;
}

SymmetryAction SymmetryAction::swap(std::size_t alphabet_size, Letter a, Letter b) {
  auto s = identity(alphabet_size);
  std::swap(s.perm.at(a), s.perm.at(b));
  return s;
}

bool SymmetryAction::valid() const {
  if (signs.size() != perm.size()) return false;
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (signs[i] != 1 && signs[i] != -1) return false;
    if (perm[i] >= perm.size() || seen[perm[i]]) return false;
    seen[perm[i]] = true;
  }
  return true;
}

SymmetryAction SymmetryAction::compose(const SymmetryAction& first) const {
  SymmetryAction out;
  const std::size_t n = perm.size();
  out.signs.resize(n);
  out.perm.resize(n);
  for (std::size_t x = 0; x < n; ++x) {
    const Letter mid = first.perm[x];
    out.perm[x] = perm[mid];
    out.signs[x] = first.signs[x] * signs[mid];
  }
  return out;
}

std::pair<Word, int> apply_symmetry(const Word& w, const SymmetryAction& s) {
  Word out;
  out.letters.reserve(w.size());
  int sign = 1;
  for (Letter x : w.letters) {
    if (x >= s.alphabet_size()) throw ModelError("symmetry action does not cover letter index");
    out.letters.push_back(s.perm[x]);
    sign *= s.signs[x];
  }
  return {std::move(out), sign};
}

std::vector<SymmetryAction> generate_group(const std::vector<SymmetryAction>& generators,
                                           std::size_t alphabet_size) {
  std::vector<SymmetryAction> group{SymmetryAction::identity(alphabet_size)};
  for (const auto& g : generators) {
    if (g.alphabet_size() != alphabet_size || !g.valid())
      throw ModelError("symmetry action incompatible with alphabet");
  }
  // Breadth-first closure; the signed permutation group is finite.
  for (std::size_t head = 0; head < group.size(); ++head) {
    for (const auto& g : generators) {
      auto next = g.compose(group[head]);
      if (std::find(group.begin(), group.end(), next) == group.end()) group.push_back(next);
    }
  }
  return group;
}

std::vector<Word> enumerate_words(std::size_t alphabet_size, std::size_t max_len) {
  std::vector<Word> out{Word{}};
  std::size_t level_begin = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    const std::size_t level_end = out.size();
    for (std::size_t i = level_begin; i < level_end; ++i) {
      for (std::size_t a = 0; a < alphabet_size; ++a) {
        Word w = out[i];
        w.letters.push_back(static_cast<Letter>(a));
        out.push_back(std::move(w));
      }
    }
    level_begin = level_end;
  }
  return out;
}

std::string letter_name(Letter letter, std::size_t alphabet_size) {
  if (alphabet_size == 1) return "H";
  if (alphabet_size <= 26) return std::string(1, static_cast<char>('A' + letter));
  return "X" + std::to_string(letter);
}

std::string to_string(const Word& w, std::size_t alphabet_size) {
  if (w.empty()) return "1";
  std::string out;
  for (Letter x : w.letters) out += letter_name(x, alphabet_size);
  return out;
}

std::string to_string(const CyclicWord& w, std::size_t alphabet_size) {
  return to_string(w.word(), alphabet_size);
}

std::string to_power_string(const Word& w, std::size_t alphabet_size) {
  if (w.empty()) return "1";
  std::string out;
  std::size_t i = 0;
  while (i < w.size()) {
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    out += letter_name(w[i], alphabet_size);
    if (j - i > 1) out += "^" + std::to_string(j - i);
    i = j;
  }
  return out;
}

Word parse_word(std::string_view text, std::size_t alphabet_size) {
  Word w;
  if (text.empty() || text == "1") return w;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (alphabet_size == 1) {
      if (c != 'H') throw ModelError("bad letter in word '" + std::string(text) + "'");
      w.letters.push_back(0);
      ++i;
    } else if (alphabet_size <= 26) {
      if (c < 'A' || c >= static_cast<char>('A' + alphabet_size))
        throw ModelError("bad letter in word '" + std::string(text) + "'");
      w.letters.push_back(static_cast<Letter>(c - 'A'));
      ++i;
    } else {
      if (c != 'X') throw ModelError("bad letter in word '" + std::string(text) + "'");
      std::size_t j = i + 1;
      while (j < text.size() && text[j] >= '0' && text[j] <= '9') ++j;
      if (j == i + 1) throw ModelError("bad letter in word '" + std::string(text) + "'");
      const auto idx = std::stoul(std::string(text.substr(i + 1, j - i - 1)));
      if (idx >= alphabet_size) throw ModelError("letter index out of range");
      w.letters.push_back(static_cast<Letter>(idx));
      i = j;
    }
  }
  return w;
}

}  // namespace dirboot
