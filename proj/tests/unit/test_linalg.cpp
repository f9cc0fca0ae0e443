#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "qcd/linalg.hpp"
#include "support.hpp"

using namespace qcd;
using namespace qcd::linalg;

namespace {

CMatrix random_matrix(Rng& rng, int n) {
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.complex_in_box(-1, 1, -1, 1);
  return m;
}

double coeff_gap(const Poly& a, const Poly& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]) / std::max(1.0, std::abs(b[k])));
  return worst;
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("polynomial helpers") {
  const std::vector<cplx> roots{1.0, cplx(0, 2), -3.0};
  const Poly p = poly_from_roots(roots);
  REQUIRE(p.size() == 4);
  CHECK(p[0] == cplx(1.0));
  for (const cplx r : roots) CHECK(std::abs(poly_eval(p, r)) < 1e-13);
  const auto e = elementary_symmetric(roots);
  for (std::size_t k = 0; k <= 3; ++k) CHECK(std::abs(p[k] - ((k % 2) ? -1.0 : 1.0) * e[k]) < 1e-14);
  const Poly a{1.0, 2.0}, b{1.0, -1.0, 3.0};
  const Poly ab = poly_mul(a, b);
  const Poly expected{1.0, 1.0, 1.0, 6.0};
  CHECK(coeff_gap(ab, expected) == 0.0);
  const auto abs_e = elementary_symmetric_abs(roots);
  CHECK(abs_e[3] == doctest::Approx(6.0));
  const auto ps = power_sums(roots, 3);
  CHECK(ps[0] == cplx(3.0));
  CHECK(std::abs(ps[2] - cplx(1.0 - 4.0 + 9.0)) < 1e-14);
}

TEST_CASE("characteristic polynomial routes agree") {
  Rng rng(1);
  for (int n = 1; n <= 7; ++n) {
    const CMatrix m = random_matrix(rng, n);
    const Poly eig = charpoly(m);
    const Poly lev = charpoly_leverrier(m);
    CHECK(coeff_gap(eig, lev) <= 1e-11);
    CHECK(std::abs(eig[static_cast<std::size_t>(n)] - ((n % 2) ? -1.0 : 1.0) * m.determinant()) <= 1e-12 * std::max(1.0, std::abs(m.determinant())));
    CHECK(std::abs(eig[1] + m.trace()) <= 1e-12 * std::max(1.0, std::abs(m.trace())));
  }
  CMatrix tri = CMatrix::Zero(3, 3);
  tri << 2.0, 5.0, 1.0, 0.0, cplx(0, 1), 7.0, 0.0, 0.0, -1.0;
  const std::vector<cplx> diag{2.0, cplx(0, 1), -1.0};
  CHECK(coeff_gap(charpoly(tri), poly_from_roots(diag)) < 1e-14);
}

TEST_CASE("pencil determinant polynomial") {
  Rng rng(2);
  for (int n = 1; n <= 6; ++n) {
    const CMatrix a = random_matrix(rng, n), b = random_matrix(rng, n);
    for (const double radius : {1.0, 0.0}) {
      const Poly p = pencil_det_poly(a, b, radius);
      REQUIRE(static_cast<int>(p.size()) == n + 1);
      for (const cplx lambda : {cplx(0.3, 0.4), cplx(-1.2, 0.1), cplx(2.0, -0.7)}) {
        const cplx direct = (lambda * a - b).determinant();
        CHECK(std::abs(poly_eval(p, lambda) - direct) <= 1e-11 * std::max(1.0, std::abs(direct)));
      }
    }
  }
}

TEST_CASE("balancing is a diagonal similarity") {
  CMatrix m(3, 3);
  m << 1.0, 1e6, 0.0, 1e-6, 2.0, 1e5, 0.0, 1e-5, cplx(0, 3);
  const CMatrix b = balance(m);
  CHECK(b.norm() < 1e-2 * m.norm());
  for (int i = 0; i < 3; ++i) CHECK(b(i, i) == m(i, i));
  const auto ev = to_std(eigenvalues(m));
  const auto ev_plain = to_std(Eigen::ComplexEigenSolver<CMatrix>(m, false).eigenvalues());
  CHECK(match_multisets(ev, ev_plain).max_relative_error < 1e-10);
}

TEST_CASE("minimal-cost assignment agrees with brute force") {
  Rng rng(3);
  for (int n = 1; n <= 6; ++n) {
    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) cost(i, j) = rng.uniform();
    const auto perm = min_cost_assignment(cost);
    double got = 0.0;
    for (int i = 0; i < n; ++i) got += cost(i, perm[i]);
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    double best = 1e300;
    do {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += cost(i, p[i]);
      best = std::min(best, s);
    } while (std::next_permutation(p.begin(), p.end()));
    CHECK(got == doctest::Approx(best).epsilon(1e-12));
    std::vector<int> sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < n; ++i) CHECK(sorted[i] == i);
  }
}

TEST_CASE("multiset matching and lexicographic order") {
  const std::vector<cplx> expected{1.0, cplx(0, 1), cplx(2, -1)};
  const std::vector<cplx> observed{cplx(2, -1) * (1.0 + 1e-9), 1.0, cplx(0, 1)};
  const auto m = match_multisets(observed, expected);
  CHECK(m.assignment == std::vector<int>{2, 0, 1});
  CHECK(m.max_relative_error == doctest::Approx(1e-9).epsilon(1e-3));
  std::vector<cplx> v{cplx(1, 2), cplx(0, 5), cplx(1, -1), cplx(0, -2)};
  sort_lex(v);
  CHECK(v == std::vector<cplx>{cplx(0, -2), cplx(0, 5), cplx(1, -1), cplx(1, 2)});
}

TEST_CASE("relative norms") {
  Rng rng(4);
  const CMatrix a = random_matrix(rng, 4);
  CHECK(relative_frobenius(a, a) == 0.0);
  CHECK(relative_commutator(a, a * a + 2.0 * a) < 1e-15);
  CHECK(relative_commutator(a, random_matrix(rng, 4)) > 1e-3);
}

}  // TEST_SUITE
