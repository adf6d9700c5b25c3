#include <doctest.h>

#include <cmath>

#include "dirboot/error.hpp"
#include "dirboot/positivity.hpp"

using namespace dirboot;

TEST_CASE("Gaussian Hankel matrix") {
  const auto h = hankel_from_sequence({1, 0, 1, 0, 3, 0, 15});
  REQUIRE(h.entries.rows() == 4);
  CHECK(h.entries(3, 3) == 15.0);
  CHECK(h.entries(1, 3) == 3.0);
  CHECK(h.entries(1, 2) == 0.0);
  const auto r = psd_check(h);
  CHECK(r.feasible);
  CHECK(r.min_eigenvalue > 0.0);
  CHECK_FALSE(r.first_negative_minor.has_value());
  const auto minors = exact_hankel_minors({1, 0, 1, 0, 3, 0, 15});
  CHECK(minors == std::vector<Rational>{1, 1, 2, 12});
}

TEST_CASE("trivial Hankel cases") {
  const auto point = hankel_from_sequence({1, 0, 0});
  CHECK(point.entries(1, 1) == 0.0);
  const auto r = psd_check(point);
  CHECK(r.feasible);
  CHECK(r.min_eigenvalue == doctest::Approx(0.0));
  const auto bad = psd_check(hankel_from_sequence({1, 0.5, 0.2}));
  CHECK_FALSE(bad.feasible);
  REQUIRE(bad.first_negative_minor.has_value());
  CHECK(*bad.first_negative_minor == 2);
  CHECK(exact_hankel_minors({1, Rational(1, 2), Rational(1, 5)}).back() == Rational(-1, 20));
  CHECK_THROWS_AS(hankel_from_sequence({2, 0, 1}), ModelError);
  CHECK_THROWS_AS(hankel_from_sequence({1, 0}), ModelError);
}

TEST_CASE("tolerance is relative to the spectral norm") {
  Eigen::MatrixXd m(2, 2);
  m << 100, 0, 0, -5e-9;
  CHECK(psd_check(m, 1e-10).feasible);
  CHECK(psd_check(m, 1e-10).tolerance == doctest::Approx(1e-8));
  m(1, 1) = -2e-8;
  CHECK_FALSE(psd_check(m, 1e-10).feasible);
  m(0, 0) = std::nan("");
  CHECK_THROWS_AS(psd_check(m), NumericalError);
}

TEST_CASE("one-matrix moment matrix equals the Hankel matrix") {
  const std::vector<double> seq{1, 0.1, 1.2, 0.3, 3.1, 0.2, 16.0};
  const auto t = MomentTable::from_sequence(seq);
  const auto a = build_moment_matrix(t, 1, 3);
  const auto b = hankel_from_sequence(seq);
  CHECK((a.entries - b.entries).norm() == 0.0);
  const auto z = build_moment_matrix(t, 1, 0);
  CHECK(z.entries.rows() == 1);
  CHECK(z.entries(0, 0) == 1.0);
}

TEST_CASE("symmetric one-matrix table at level 2") {
  const auto m = build_moment_matrix(MomentTable::from_sequence({1, 0, 0.5, 0, 0.7}), 1, 2).entries;
  Eigen::MatrixXd want(3, 3);
  want << 1, 0, 0.5, 0, 0.5, 0, 0.5, 0, 0.7;
  CHECK((m - want).norm() == 0.0);
}

TEST_CASE("two-letter level 1 matrix") {
  MomentTable t(2);
  t.set(parse_word("A", 2), 0.1);
  t.set(parse_word("B", 2), 0.2);
  t.set(parse_word("AA", 2), 0.3);
  t.set(parse_word("AB", 2), 0.4);
  t.set(parse_word("BB", 2), 0.5);
  const auto m = build_moment_matrix(t, 2, 1);
  Eigen::MatrixXd want(3, 3);
  want << 1, 0.1, 0.2, 0.1, 0.3, 0.4, 0.2, 0.4, 0.5;
  CHECK((m.entries - want).norm() == 0.0);
  REQUIRE(m.basis.size() == 3);
  CHECK(build_moment_matrix(t, 2, 0).entries.rows() == 1);
  CHECK_THROWS_AS(build_moment_matrix(t, 2, 2), NumericalError);
}

TEST_CASE("entry rule uses the adjoint of the row word") {
  MomentTable t(2);
  for (const auto& w : enumerate_words(2, 4))
    if (!w.empty()) t.set(w, 0.01 * static_cast<double>(w.size()) + (w.letters[0] == 0 ? 0.001 : 0.0));
  const auto m = build_moment_matrix(t, 2, 2);
  for (Eigen::Index i = 0; i < m.entries.rows(); ++i)
    for (Eigen::Index j = 0; j < m.entries.cols(); ++j) {
      CHECK(m.entries(i, j) == m.entries(j, i));
      CHECK(m.entries(i, j) == t.get(adjoint(m.basis[i]) + m.basis[j]));
    }
  CHECK(m.entries.rows() == 7);
}

TEST_CASE("nesting of PSD truncations") {
  // Catalan moments are a genuine measure, so every truncation passes.
  const std::vector<double> c{1, 0, 1, 0, 2, 0, 5, 0, 14, 0, 42, 0, 132};
  const auto t = MomentTable::from_sequence(c);
  for (std::size_t l = 0; l <= 6; ++l) CHECK(psd_check(build_moment_matrix(t, 1, l)).feasible);
}

TEST_CASE("Carleman partial sums") {
  CHECK(carleman_indicator({1, 3, 15}) ==
        doctest::Approx(1 + std::pow(3.0, -0.25) + std::pow(15.0, -1.0 / 6.0)));
  CHECK(carleman_indicator({1, 1, 1, 1}) == doctest::Approx(4.0));
  CHECK_THROWS_AS(carleman_indicator({1, 0}), ModelError);
  // (2k)! growth: partial sums keep increasing
  const double a = carleman_indicator({2, 24, 720});
  const double b = carleman_indicator({2, 24, 720, 40320});
  CHECK(b > a);
}
