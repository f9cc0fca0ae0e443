#include <doctest.h>

#include "qcd/bethe.hpp"
#include "qcd/identities.hpp"
#include "qcd/linalg.hpp"
#include "qcd/sampling.hpp"
#include "support.hpp"

using namespace qcd;
using namespace qcd::identities;
using linalg::relative_frobenius;

namespace {

double max_coefficient(const linalg::Poly& p) {
  double m = 0.0;
  for (const cplx c : p) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace

TEST_SUITE("identities") {

TEST_CASE("single-site Q is g") {
  const LemmaParams p{{cplx(0.3, 0.1)}, {}, cplx(0.7, -0.4), cplx(0.5, 0.2)};
  const CMatrix q = q_matrix(p);
  REQUIRE(q.rows() == 1);
  CHECK(std::abs(q(0, 0) - p.g) < 1e-15);
  CHECK(verify_lemma1(p) <= 1e-14);
  CHECK(std::abs(linalg::charpoly(q)[1] + p.g) < 1e-15);
}

TEST_CASE("Q entries at N = 2, M = 1") {
  const std::vector<cplx> x{0.2, cplx(1.1, 0.3)}, y{cplx(0.6, -0.2)};
  const cplx g{0.9, 0.1}, eta{0.4, 0.15};
  const LemmaParams p{x, y, g, eta};
  const CMatrix q = q_matrix(p);
  for (int i = 0; i < 2; ++i) {
    const int k = 1 - i;
    const cplx row = g * std::sinh(eta) * std::sinh(x[i] - x[k] + eta) / std::sinh(x[i] - x[k]) *
                     std::sinh(x[i] - y[0]) / std::sinh(x[i] - y[0] + eta);
    for (int j = 0; j < 2; ++j) CHECK(test::rel(q(i, j), row / std::sinh(x[j] - x[i] + eta)) < 1e-14);
  }
  const CMatrix qt = q_tilde_matrix(p);
  REQUIRE(qt.rows() == 1);
  const cplx expected = g * std::sinh(y[0] - x[0]) / std::sinh(y[0] - x[0] - eta) * std::sinh(y[0] - x[1]) /
                        std::sinh(y[0] - x[1] - eta);
  CHECK(test::rel(qt(0, 0), expected) < 1e-14);
  CHECK(verify_lemma1(p) <= 1e-10);
}

TEST_CASE("M = 0 spectrum is the geometric string") {
  Rng rng(1);
  for (int n = 1; n <= 6; ++n) {
    const auto p = sampling::draw_lemma(rng, n, 0);
    CHECK(geometric_string_residual(p.x, p.g, p.eta) <= 1e-10);
    CHECK(q_tilde_matrix(p).size() == 0);
  }
}

TEST_CASE("factorizations and the W determinants") {
  Rng rng(2);
  for (const auto& [n, m] : {std::pair{4, 2}, std::pair{4, 3}, std::pair{6, 6}, std::pair{5, 0}}) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto p = sampling::draw_lemma(rng, n, m);
      const auto r = factorization_residuals(p);
      CHECK(r.q <= 1e-9);
      CHECK(r.q_tilde <= 1e-9);
      CHECK(r.det_w <= 1e-12);
      CHECK(test::rel(w_matrix(p).determinant(), w_tilde_matrix(p).determinant()) <= 1e-12);
      CHECK(relative_frobenius(q_matrix_factorized(p), q_matrix(p)) <= 1e-9);
      if (m > 0) CHECK(relative_frobenius(q_tilde_matrix_factorized(p), q_tilde_matrix(p)) <= 1e-9);
    }
  }
}

TEST_CASE("determinant lemma on fixed shapes") {
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    CHECK(verify_lemma1(sampling::draw_lemma(rng, 2, 1)) <= 1e-10);
    CHECK(verify_lemma1(sampling::draw_lemma(rng, 6, 3)) <= 1e-8);
  }
}

TEST_CASE("determinant lemma over 100 seeded draws") {
  Rng rng(4);
  double worst = 0.0, worst_spectrum = 0.0, worst_pencil = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.uniform_int(1, 6);
    const int m = rng.uniform_int(0, n);
    const auto p = sampling::draw_lemma(rng, n, m);
    worst = std::max(worst, verify_lemma1(p));
    worst_spectrum = std::max(worst_spectrum, lemma1_spectrum_residual(p));
    worst_pencil = std::max(worst_pencil, pencil_form(p).residual);
    const auto r = factorization_residuals(p);
    CHECK(r.q <= 1e-9);
    CHECK(r.q_tilde <= 1e-9);
  }
  CHECK(worst <= 1e-8);
  CHECK(worst_spectrum <= 1e-6);
  CHECK(worst_pencil <= 1e-8);
}

TEST_CASE("a corrupted coupling breaks the lemma") {
  Rng rng(5);
  const auto p = sampling::draw_lemma(rng, 4, 2);
  LemmaParams bad = p;
  bad.g = -p.g;
  CHECK(lemma1_residual(p, bad) > 1e-2);
}

TEST_CASE("pole-free pencil stays bounded as two coordinates merge") {
  Rng rng(6);
  const auto base = sampling::draw_lemma(rng, 4, 2);
  double first = 0.0;
  for (const double gap : {1e-1, 1e-2, 1e-3}) {
    LemmaParams p = base;
    p.x[1] = p.x[0] + gap;
    const auto pf = pencil_form(p);
    const double size = max_coefficient(pf.lhs);
    if (gap == 1e-1) first = size;
    CHECK(std::isfinite(size));
    CHECK(size <= 10.0 * first);
    CHECK(pf.residual <= 1e-8);
  }
}

TEST_CASE("large-y limit of the pencil stabilizes") {
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = rng.uniform_int(2, 5);
    const int m = rng.uniform_int(1, n);
    const auto p = sampling::draw_lemma(rng, n, m);
    const auto near = y_limit_check(p, 0, 4.0);
    const auto far = y_limit_check(p, 0, 8.0);
    CHECK(far.lhs < 1e-3);
    CHECK(far.rhs < 1e-3);
    CHECK(far.lhs <= 1e-2 * std::max(near.lhs, 1e-12));
    CHECK(far.rhs <= 1e-2 * std::max(near.rhs, 1e-12));
  }
  CHECK_THROWS_AS(y_limit_check(sampling::draw_lemma(rng, 2, 1), 1), ConfigError);
}

TEST_CASE("Vandermonde inverse") {
  CHECK(relative_frobenius(vandermonde_inverse(std::vector<cplx>{cplx(0.4, 0.2)}), CMatrix::Identity(1, 1)) == 0.0);
  const std::vector<cplx> x2{0.1, cplx(0.7, 0.3)};
  CMatrix vt2(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) vt2(j, i) = std::exp(2.0 * double(j) * x2[i]);
  CHECK(relative_frobenius(vandermonde_inverse(x2), vt2.inverse()) <= 1e-14);

  Rng rng(8);
  for (int k = 3; k <= 6; ++k) {
    const auto p = sampling::draw_lemma(rng, k, 0);
    CMatrix vt(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) vt(j, i) = std::exp(2.0 * double(j) * p.x[i]);
    CHECK(vandermonde_inverse_residual(p.x) <= 1e-10);
    CHECK(relative_frobenius(vandermonde_inverse(p.x), vt.inverse()) <= 1e-8);
  }
  CHECK_THROWS_AS(vandermonde_inverse(std::vector<cplx>{0.3, cplx(0.3, kPi)}), SingularVandermonde);
}

TEST_CASE("general position of lemma parameters") {
  LemmaParams p{{0.1, 0.9}, {0.1}, 1.0, 0.5};
  CHECK_THROWS_AS(p.validate(), GeneralPositionViolated);
  p.y = {0.35};
  CHECK_NOTHROW(p.validate());
  p.y = {0.3, 0.6, 1.4};
  CHECK_THROWS_AS(p.validate(), ConfigError);
  CHECK_THROWS_AS(q_matrix(LemmaParams{{0.2, 0.2}, {}, 1.0, 0.5}), GeneralPositionViolated);
}

TEST_CASE("Lax matrix of a Bethe state is a Q matrix") {
  Rng rng(9);
  for (int L = 1; L <= 4; ++L) {
    const auto chain = sampling::draw_chain(rng, L);
    for (int m2 = 0; m2 <= L; ++m2) {
      for (const auto& roots : bethe::solve_bae(chain, m2, 3, 16)) {
        const auto check = verify_theorem1_identity(chain, roots);
        CHECK(check.charpoly <= 1e-8);
        CHECK(check.q_form <= 1e-12);
      }
    }
  }
}

TEST_CASE("vacuum sector reduces to the M = 0 string") {
  Rng rng(10);
  const auto chain = sampling::draw_chain(rng, 4);
  const bethe::BetheRootSet vacuum{0, {}, 0.0, chain.hash()};
  CHECK(verify_theorem1_identity(chain, vacuum).charpoly <= 1e-10);
  std::vector<cplx> shifted;
  for (const cplx xk : chain.inhom) shifted.push_back(xk - chain.eta);
  CHECK(geometric_string_residual(shifted, std::exp(4.0 * chain.h), chain.eta) <= 1e-10);
}

TEST_CASE("invalid Bethe roots are rejected") {
  Rng rng(11);
  const auto chain = sampling::draw_chain(rng, 3);
  const bethe::BetheRootSet bogus{1, {cplx(0.37, 0.5)}, 0.0, chain.hash()};
  CHECK_THROWS_AS(verify_theorem1_identity(chain, bogus), InvalidBetheRoots);
  const bethe::BetheRootSet wrong_count{2, {cplx(0.37, 0.5)}, 0.0, chain.hash()};
  CHECK_THROWS_AS(verify_theorem1_identity(chain, wrong_count), InvalidBetheRoots);
}

}  // TEST_SUITE
