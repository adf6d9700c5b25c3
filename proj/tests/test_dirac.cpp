#include <doctest.h>

#include <cmath>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include "dirboot/dirac.hpp"
#include "dirboot/error.hpp"
#include "dirboot/mc.hpp"
#include "dirboot/moments.hpp"

using namespace dirboot;

namespace {

const std::vector<Signature> kAll = {{1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};

long binom(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

Eigen::MatrixXcd random_hermitian(std::mt19937& rng, int n) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h(i, j) = {g(rng), g(rng)};
  return (h + h.adjoint()) / 2.0;
}

}  // namespace

TEST_CASE("signatures") {
  for (auto s : kAll) CHECK(is_supported(s));
  CHECK_FALSE(is_supported({3, 0}));
  CHECK_FALSE(is_supported({0, 0}));
  CHECK(alphabet_size_for({0, 1}) == 1);
  CHECK(alphabet_size_for({1, 1}) == 2);
  CHECK(parse_signature("(2,0)") == Signature{2, 0});
  CHECK(parse_signature("0,1") == Signature{0, 1});
  CHECK_THROWS_AS(parse_signature("3,0"), ModelError);
  CHECK_THROWS_AS(parse_signature("two"), ModelError);
  CHECK_THROWS_AS(expand_dirac_power({3, 1}, 2), ModelError);
  CHECK_THROWS_AS(expand_dirac_power({1, 0}, 0), ModelError);
}

TEST_CASE("gamma matrices square to one and anticommute") {
  for (auto s : kAll) {
    const auto b = gamma_basis(s);
    const auto id = SmallMatrix::identity(b.module_dim);
    for (std::size_t i = 0; i < b.gammas.size(); ++i) {
      CHECK(b.gammas[i] * b.gammas[i] == id);
      for (std::size_t j = i + 1; j < b.gammas.size(); ++j) {
        const auto ab = b.gammas[i] * b.gammas[j];
        const auto ba = b.gammas[j] * b.gammas[i];
        for (std::size_t e = 0; e < ab.a.size(); ++e) {
          CHECK(ab.a[e].re == -ba.a[e].re);
          CHECK(ab.a[e].im == -ba.a[e].im);
        }
      }
    }
  }
}

TEST_CASE("printed low-order expansions") {
  CHECK(expand_dirac_power({1, 0}, 2).to_string() == "2*N*Tr(H^2) + 2*(Tr(H))^2");
  CHECK(expand_dirac_power({0, 1}, 2).to_string() == "2*N*Tr(H^2) - 2*(Tr(H))^2");
  CHECK(expand_dirac_power({1, 0}, 1).to_string() == "2*N*Tr(H)");
  CHECK(expand_dirac_power({2, 0}, 2).to_string() ==
        "4*N*Tr(A^2) + 4*N*Tr(B^2) + 4*(Tr(A))^2 + 4*(Tr(B))^2");
}

TEST_CASE("(2,0) quartic term has twelve terms") {
  const auto p = expand_dirac_power({2, 0}, 4);
  CHECK(p.size() == 12);
  CHECK(p.to_string() ==
        "4*N*Tr(A^4) + 16*N*Tr(A^2B^2) - 8*N*Tr(ABAB) + 4*N*Tr(B^4) + 16*Tr(A)*Tr(A^3) + 16*Tr(A)*Tr(AB^2) + "
        "16*Tr(B)*Tr(A^2B) + 16*Tr(B)*Tr(B^3) + 12*(Tr(A^2))^2 + 8*Tr(A^2)*Tr(B^2) + 16*(Tr(AB))^2 + "
        "12*(Tr(B^2))^2");
}

TEST_CASE("one-matrix expansions are binomial") {
  for (int k = 1; k <= 6; ++k) {
    for (int eps : {1, -1}) {
      MultiTracePolynomial want(1);
      for (int j = 0; j <= k; ++j) {
        const long sign = (eps < 0 && (k - j) % 2) ? -1 : 1;
        want.add_term(Affine(sign * binom(k, j)), 0,
                      {power_word(0, static_cast<std::size_t>(j)), power_word(0, static_cast<std::size_t>(k - j))});
      }
      CHECK(expand_dirac_power(eps > 0 ? Signature{1, 0} : Signature{0, 1}, k) == want);
    }
  }
}

TEST_CASE("expansion matches an explicit tensor-product operator") {
  std::mt19937 rng(3);
  const int N = 3;
  for (auto sig : kAll) {
    const auto gb = gamma_basis(sig);
    std::vector<Eigen::MatrixXcd> H;
    for (std::size_t l = 0; l < alphabet_size_for(sig); ++l) H.push_back(random_hermitian(rng, N));
    const int d = static_cast<int>(gb.module_dim);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(N, N);
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(d * N * N, d * N * N);
    for (std::size_t k = 0; k < gb.gammas.size(); ++k) {
      Eigen::MatrixXcd g(d, d);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          const auto x = gb.gammas[k](a, b);
          g(a, b) = {static_cast<double>(x.re), static_cast<double>(x.im)};
        }
      const Eigen::MatrixXcd& K = H[gb.letters[k]];
      const Eigen::MatrixXcd Kt = K.transpose();
      const Eigen::MatrixXcd op = Eigen::kroneckerProduct(K, I).eval() +
                                  static_cast<double>(gb.hermiticity[k]) * Eigen::kroneckerProduct(I, Kt).eval();
      D += Eigen::kroneckerProduct(g, op).eval();
    }
    CHECK((D - D.adjoint()).norm() < 1e-12);
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(D.rows(), D.cols());
    for (int p = 1; p <= 6; ++p) {
      P = (P * D).eval();
      const double direct = P.trace().real();
      const double mine = action_value(make_dirac_spec(sig, {{p, Affine(1)}}), H);
      INFO(to_string(sig), " k=", p);
      CHECK(mine == doctest::Approx(direct).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("build_action examples") {
  const auto cubic = make_dirac_spec({1, 0}, {{2, parse_affine("1/4")}, {3, parse_affine("g/6")}});
  MultiTracePolynomial want(1);
  const Word h = power_word(0, 1), h2 = power_word(0, 2), h3 = power_word(0, 3);
  want.add_term(Affine(Rational(1, 2)), 1, {h2});
  want.add_term(Affine(Rational(1, 2)), 0, {h, h});
  want.add_term(Affine::param("g", Rational(1, 3)), 1, {h3});
  want.add_term(Affine::param("g"), 0, {h2, h});
  CHECK(build_action(cubic) == want);

  const auto q = make_dirac_spec({1, 0}, {{2, parse_affine("g")}, {4, parse_affine("1")}});
  CHECK(build_action(q).to_string() ==
        "2*g*N*Tr(H^2) + 2*N*Tr(H^4) + 2*g*(Tr(H))^2 + 8*Tr(H)*Tr(H^3) + 6*(Tr(H^2))^2");
  const auto q01 = make_dirac_spec({0, 1}, {{2, parse_affine("g")}, {4, parse_affine("1")}});
  CHECK(build_action(q01).to_string() ==
        "2*g*N*Tr(H^2) + 2*N*Tr(H^4) - 2*g*(Tr(H))^2 - 8*Tr(H)*Tr(H^3) + 6*(Tr(H^2))^2");
}

TEST_CASE("build_action is linear in the couplings") {
  const auto a = build_action(make_dirac_spec({2, 0}, {{2, parse_affine("3")}}));
  const auto b = build_action(make_dirac_spec({2, 0}, {{4, parse_affine("-2")}}));
  auto sum = a;
  sum.add(b);
  CHECK(build_action(make_dirac_spec({2, 0}, {{2, parse_affine("3")}, {4, parse_affine("-2")}})) == sum);
}

TEST_CASE("symmetry detection") {
  const auto t20 = build_action(make_dirac_spec({2, 0}, {{2, parse_affine("t2")}, {4, parse_affine("1")}}));
  const auto gens = detect_symmetries(t20);
  CHECK(generate_group(gens, 2).size() == 8);
  const auto cubic = build_action(make_dirac_spec({1, 0}, {{2, parse_affine("1/4")}, {3, parse_affine("g/6")}}));
  CHECK(detect_symmetries(cubic).empty());
}

TEST_CASE("dirac_moment") {
  CHECK(dirac_moment({1, 0}, 2, MomentTable::from_sequence({1, 0, 1})) == 2.0);
  const double c = 0.7;
  CHECK(dirac_moment({0, 1}, 2, MomentTable::from_sequence({1, c, c * c})) == doctest::Approx(0.0));
  MomentTable t(2);
  t.set(parse_word("A", 2), 0.0);
  t.set(parse_word("B", 2), 0.0);
  t.set(parse_word("AA", 2), 0.3);
  t.set(parse_word("BB", 2), 0.3);
  CHECK(dirac_moment({2, 0}, 2, t) == doctest::Approx(8 * 0.3));
  CHECK_THROWS_AS(dirac_moment({1, 0}, 4, MomentTable::from_sequence({1, 0, 1})), NumericalError);
}

TEST_CASE("conjectured_m2") {
  CHECK(conjectured_m2(1, 1) == doctest::Approx(0.25));
  CHECK(conjectured_m2(0, 1) == doctest::Approx(std::sqrt(8.0) / 8.0));
  CHECK(conjectured_m2(1e4, 1) * 2e4 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(conjectured_m2(1, 0), ModelError);
}

TEST_CASE("rational and coupling literals") {
  CHECK(parse_rational("0.400000") == Rational(2, 5));
  CHECK(parse_rational("010") == Rational(10));
  CHECK(parse_rational("-3/08") == Rational(-3, 8));
  CHECK(parse_rational("1/4") == Rational(1, 4));
  CHECK_THROWS_AS(parse_rational("1e3"), ModelError);
  CHECK_THROWS_AS(parse_rational("1/0"), ModelError);
  CHECK_THROWS_AS(parse_rational("x"), ModelError);
  CHECK(parse_affine("g/6") == Affine::param("g", Rational(1, 6)));
  CHECK(parse_affine("-t2 + 1").evaluate({{"t2", 3.0}}) == -2.0);
  CHECK(parse_affine("0.5*g").evaluate({{"g", 4.0}}) == 2.0);
  CHECK_THROWS_AS(parse_affine("g*g"), ModelError);
  CHECK_THROWS_AS(parse_affine("g").evaluate({}), ModelError);
}
