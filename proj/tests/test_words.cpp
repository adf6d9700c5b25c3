#include <doctest.h>

#include <algorithm>

#include "dirboot/error.hpp"
#include "dirboot/moments.hpp"
#include "dirboot/words.hpp"

using namespace dirboot;

namespace {
Word w2(const char* s) { return parse_word(s, 2); }
}  // namespace

TEST_CASE("canonical_cyclic picks the minimal rotation") {
  CHECK(to_string(canonical_cyclic(w2("BA")), 2) == "AB");
  CHECK(to_string(canonical_cyclic(w2("BAAB")), 2) == "AABB");
  CHECK(to_string(canonical_cyclic(w2("ABAB")), 2) == "ABAB");
  CHECK(canonical_cyclic(Word{}).empty());
}

TEST_CASE("Booth rotation agrees with brute force") {
  std::size_t bad = 0, checked = 0;
  for (const auto& w : enumerate_words(3, 6)) {
    Word best = w;
    for (std::size_t k = 1; k < w.size(); ++k) best = std::min(best, rotate(w, k));
    const CyclicWord c = canonical_cyclic(w);
    if (c.word() != best) ++bad;
    for (std::size_t k = 0; k < w.size(); ++k)
      if (canonical_cyclic(rotate(w, k)) != c) ++bad;
    ++checked;
  }
  CHECK(checked == 1093);
  CHECK(bad == 0);
}

TEST_CASE("enumerate_words is graded-lex") {
  const auto ws = enumerate_words(2, 3);
  REQUIRE(ws.size() == 15);
  CHECK(ws.front().empty());
  CHECK(std::is_sorted(ws.begin(), ws.end(), graded_less));
  CHECK(to_string(ws[1], 2) == "A");
  CHECK(to_string(ws[3], 2) == "AA");
  CHECK(to_string(ws.back(), 2) == "BBB");
  CHECK(enumerate_words(1, 0).size() == 1);
}

TEST_CASE("adjoint reverses, power and rotate") {
  CHECK(adjoint(w2("AAB")) == w2("BAA"));
  CHECK(adjoint(Word{}).empty());
  CHECK(power_word(1, 3) == w2("BBB"));
  CHECK(rotate(w2("AAB"), 1) == w2("ABA"));
  CHECK(rotate(w2("AAB"), 3) == w2("AAB"));
  CHECK(w2("A") + w2("B") == w2("AB"));
}

TEST_CASE("symmetry actions") {
  const auto fa = SymmetryAction::flip(2, 0);
  const auto sw = SymmetryAction::swap(2, 0, 1);
  CHECK(apply_symmetry(w2("AB"), fa) == std::pair<Word, int>{w2("AB"), -1});
  CHECK(apply_symmetry(w2("AAB"), fa) == std::pair<Word, int>{w2("AAB"), 1});
  CHECK(apply_symmetry(w2("AAB"), sw) == std::pair<Word, int>{w2("BBA"), 1});
  CHECK(sw.compose(sw) == SymmetryAction::identity(2));
  const auto g = generate_group({fa, SymmetryAction::flip(2, 1), sw}, 2);
  CHECK(g.size() == 8);
  for (const auto& s : g) CHECK(s.valid());
  CHECK(generate_group({}, 2).size() == 1);
}

TEST_CASE("letter names and parsing") {
  CHECK(letter_name(0, 1) == "H");
  CHECK(letter_name(1, 2) == "B");
  CHECK(letter_name(26, 30) == "X26");
  CHECK(to_power_string(w2("AABB"), 2) == "A^2B^2");
  CHECK(to_power_string(power_word(0, 3), 1) == "H^3");
  CHECK(parse_word("1", 2).empty());
  CHECK(parse_word("", 2).empty());
  for (const auto& w : enumerate_words(2, 4)) CHECK(parse_word(to_string(w, 2), 2) == w);
  CHECK_THROWS_AS(parse_word("AC", 2), ModelError);
  CHECK_THROWS_AS(parse_word("A", 1), ModelError);
}

TEST_CASE("moment keys merge cyclic and adjoint classes") {
  CHECK(moment_key(w2("BAA")) == moment_key(w2("AAB")));
  CHECK(moment_key(w2("AABABB")) == moment_key(adjoint(w2("AABABB"))));
  CHECK(moment_name(moment_key(power_word(0, 3)), 1) == "m_3");
  CHECK(moment_name(moment_key(w2("ABBA")), 2) == "m_AABB");
  CHECK(moment_name(CyclicWord{}, 2) == "1");
  CHECK(parse_moment_name("m2", 1) == moment_key(power_word(0, 2)));
  CHECK(parse_moment_name("mABAB", 2) == moment_key(w2("BABA")));
  CHECK_THROWS_AS(parse_moment_name("x2", 1), ModelError);
}

TEST_CASE("symmetric_key drops odd moments") {
  const auto g = generate_group({SymmetryAction::flip(2, 0), SymmetryAction::flip(2, 1), SymmetryAction::swap(2, 0, 1)}, 2);
  CHECK_FALSE(symmetric_key(w2("AB"), g).has_value());
  CHECK_FALSE(symmetric_key(w2("AAA"), g).has_value());
  const auto k = symmetric_key(w2("BB"), g);
  REQUIRE(k.has_value());
  CHECK(k->key == moment_key(w2("AA")));
  CHECK(k->sign == 1);
}

TEST_CASE("MomentTable") {
  const auto t = MomentTable::from_sequence({1, 0, 1, 0, 2});
  CHECK(t.m(0) == 1.0);
  CHECK(t.m(4) == 2.0);
  CHECK_THROWS_AS(t.m(6), NumericalError);
  CHECK_THROWS_AS(MomentTable::from_sequence({2, 0}), ModelError);
  MomentTable u(2);
  u.set(w2("AB"), 0.5);
  CHECK(u.get(w2("BA")) == 0.5);
  CHECK_THROWS_AS(u.set(Word{}, 2.0), ModelError);
}
