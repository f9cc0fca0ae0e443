#include <doctest.h>

#include "qcd/duality.hpp"
#include "qcd/linalg.hpp"
#include "qcd/ruijsenaars.hpp"
#include "qcd/sampling.hpp"
#include "support.hpp"

using namespace qcd;
using namespace qcd::duality;

namespace {

ChainParams l1_chain(double eta, double h) {
  ChainParams p;
  p.L = 1;
  p.eta = eta;
  p.h = h;
  p.inhom = {0.2};
  return p;
}

double multiset_gap(std::vector<cplx> a, std::vector<cplx> b) {
  return linalg::match_multisets(a, b).max_relative_error;
}

}  // namespace

TEST_SUITE("duality") {

TEST_CASE("predicted strings") {
  const cplx h{0.2, 0.05}, eta{0.4, 0.1};
  CHECK(multiset_gap(predicted_strings(1, 0, h, eta).values, {std::exp(h)}) < 1e-15);
  CHECK(multiset_gap(predicted_strings(2, 0, h, eta).values, {std::exp(2.0 * h - eta), std::exp(2.0 * h + eta)}) <
        1e-15);
  CHECK(multiset_gap(predicted_strings(2, 1, h, eta).values, {std::exp(2.0 * h), std::exp(-2.0 * h)}) < 1e-15);
  const auto s = predicted_strings(5, 2, h, eta);
  CHECK(s.M1 == 3);
  CHECK(s.M2 == 2);
  CHECK(s.values.size() == 5);
}

TEST_CASE("predicted integrals are power sums of the strings") {
  const cplx h{0.3, -0.1}, eta{0.5, 0.2};
  CHECK(test::rel(predicted_integrals(4, 0, h, eta, 1), std::exp(4.0 * h) * std::sinh(4.0 * eta) / std::sinh(eta)) <
        1e-14);
  for (int L = 1; L <= 6; ++L)
    for (int m2 = 0; m2 <= L; ++m2) {
      const auto strings = predicted_strings(L, m2, h, eta).values;
      const auto ps = linalg::power_sums(strings, L);
      for (int n = 1; n <= L; ++n) CHECK(test::rel(predicted_integrals(L, m2, h, eta, n), ps[n]) <= 1e-12);
      const auto e = predicted_elementary(L, m2, h, eta);
      const auto e_direct = linalg::elementary_symmetric(strings);
      for (int n = 0; n <= L; ++n) CHECK(std::abs(e[n] - e_direct[n]) <= 1e-12 * std::max(1.0, std::abs(e_direct[n])));
    }
  for (int n = 1; n <= 4; ++n)
    CHECK(test::rel(predicted_integrals(4, 2, 0.0, eta, n), 2.0 * std::sinh(2.0 * eta * double(n)) / std::sinh(eta * double(n))) <
          1e-13);
}

TEST_CASE("Lax matrix from a chain state") {
  ChainParams p;
  p.L = 3;
  p.eta = 0.45;
  p.h = 0.1;
  p.inhom = {0.1, 0.8, 1.6};
  const std::vector<cplx> H{cplx(1.2, 0.1), cplx(0.7, -0.2), 0.3};
  const CMatrix l = lax_from_chain_state(p, H);
  for (int i = 0; i < 3; ++i) CHECK(test::rel(l(i, i), H[i]) < 1e-15);
  CHECK(test::rel(l(0, 1), std::sinh(p.eta) * H[0] / std::sinh(p.inhom[1] - p.inhom[0] + p.eta)) < 1e-14);
  std::vector<cplx> minus_h;
  for (const cplx v : H) minus_h.push_back(-v);
  CHECK(linalg::relative_frobenius(l, rs::lax_from_velocities(p.inhom, minus_h, p.eta)) == 0.0);
  CHECK(test::rel(lax_from_chain_state(l1_chain(0.5, 0.1), {cplx(0.9)})(0, 0), 0.9) < 1e-15);
}

TEST_CASE("integrals as functions of H and their Jacobian") {
  Rng rng(1);
  const auto chain = sampling::draw_chain(rng, 4);
  std::vector<cplx> H;
  for (int i = 0; i < 4; ++i) H.push_back(rng.complex_in_box(0.5, 1.5, -0.3, 0.3));
  const auto e = integrals_from_h(chain, H);
  const auto l = lax_from_chain_state(chain, H);
  const auto ev = to_std(linalg::eigenvalues(l));
  const auto e_direct = linalg::elementary_symmetric(ev);
  for (int n = 0; n <= 4; ++n) CHECK(std::abs(e[n] - e_direct[n]) <= 1e-10 * std::max(1.0, std::abs(e_direct[n])));
  const CMatrix jac = integrals_jacobian(chain, H);
  REQUIRE(jac.rows() == 4);
  const double step = 1e-6;
  for (int j = 0; j < 4; ++j) {
    auto up = H, dn = H;
    up[j] += step;
    dn[j] -= step;
    const auto eu = integrals_from_h(chain, up), ed = integrals_from_h(chain, dn);
    for (int n = 1; n <= 4; ++n)
      CHECK(std::abs((eu[n] - ed[n]) / (2.0 * step) - jac(n - 1, j)) <= 1e-7 * std::max(1.0, std::abs(jac(n - 1, j))));
  }
}

TEST_CASE("duality at L = 1") {
  const auto chain = l1_chain(0.5, 0.25);
  const auto report = verify_duality(chain);
  CHECK(report.n_states == 2);
  CHECK(report.worst_error <= 1e-12);
  CHECK(report.passed());
  CHECK(report.params_hash == chain.hash());
}

TEST_CASE("duality over all states, L = 2..5") {
  Rng rng(2);
  for (int L = 2; L <= 5; ++L) {
    for (int trial = 0; trial < (L < 5 ? 3 : 1); ++trial) {
      const auto chain = sampling::draw_chain(rng, L);
      const auto report = verify_duality(chain);
      CHECK(report.n_states == (1 << L));
      CHECK(report.worst_error <= (L == 2 ? 1e-9 : 1e-8));
      CHECK(report.worst_power_sum_error <= 1e-8);
      for (const auto& st : report.states) {
        CHECK(st.matched_string.M2 == st.sector_M2);
        CHECK(st.matched_string.M1 == L - st.sector_M2);
        CHECK(std::is_sorted(st.lax_eigenvalues.begin(), st.lax_eigenvalues.end(), [](cplx a, cplx b) {
          return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
        }));
      }
    }
  }
}

TEST_CASE("Lax spectrum depends only on L, eta, h and the sector") {
  Rng rng(3);
  auto a = sampling::draw_chain(rng, 3);
  auto b = sampling::draw_chain(rng, 3);
  b.eta = a.eta;
  b.h = a.h;
  b.validate();
  const auto ra = verify_duality(a);
  const auto rb = verify_duality(b);
  for (const auto& sa : ra.states)
    for (const auto& sb : rb.states)
      if (sa.sector_M2 == sb.sector_M2) CHECK(multiset_gap(sa.lax_eigenvalues, sb.lax_eigenvalues) <= 1e-8);
}

TEST_CASE("GH product on every eigenstate") {
  Rng rng(4);
  for (int L = 2; L <= 5; ++L) {
    const auto chain = sampling::draw_chain(rng, L);
    const auto spec = spin_chain::joint_diagonalize(chain);
    for (const auto& st : spec.states)
      for (int i = 0; i < L; ++i) CHECK(test::rel(st.G[i] * st.H[i], spin_chain::gh_scalar(chain, i)) <= 1e-9);
  }
}

TEST_CASE("momentum identification") {
  const auto chain1 = l1_chain(0.5, 0.3);
  const auto spec1 = spin_chain::joint_diagonalize(chain1);
  CHECK(verify_momentum_identification(chain1, spec1) <= 1e-12);
  const auto p = momenta_from_g(chain1.eta, spec1.states[0].G);
  CHECK(test::rel(std::exp(-chain1.eta * p[0]), -chain1.eta * spec1.states[0].G[0]) < 1e-14);

  Rng rng(5);
  for (int L = 2; L <= 4; ++L) {
    const auto chain = sampling::draw_chain(rng, L);
    const auto spec = spin_chain::joint_diagonalize(chain);
    CHECK(verify_momentum_identification(chain, spec) <= (L == 3 ? 1e-9 : 1e-8));
    // The recovered momenta reproduce the RS velocities -H.
    for (const auto& st : spec.states) {
      const rs::RSState state{chain.eta, chain.inhom, momenta_from_g(chain.eta, st.G)};
      const auto v = rs::velocities(state);
      for (int i = 0; i < L; ++i) CHECK(test::rel(v[i], -st.H[i]) <= 1e-8);
    }
  }
  CHECK_THROWS_AS(momenta_from_g(0.5, {cplx(0.0)}), ZeroGValue);
}

TEST_CASE("inverse spectral problem, L = 1 and 2") {
  const auto chain1 = l1_chain(0.5, 0.2);
  const auto r1 = inverse_spectral_solve(chain1, 0, 1);
  REQUIRE(r1.solutions.size() == 1);
  CHECK(test::rel(r1.solutions[0].H[0], std::exp(0.2)) <= 1e-9);

  Rng rng(6);
  const auto chain2 = sampling::draw_chain(rng, 2);
  const auto r2 = inverse_spectral_solve(chain2, 1, 2);
  CHECK(r2.solutions.size() >= 2);
  CHECK(r2.ed_states_found == r2.ed_states_in_sector);
  CHECK(r2.ed_states_in_sector == 2);
}

TEST_CASE("inverse spectral problem recovers every eigenstate, L <= 4") {
  Rng rng(7);
  for (int L = 2; L <= 4; ++L) {
    const auto chain = sampling::draw_chain(rng, L);
    const auto spec = spin_chain::joint_diagonalize(chain);
    for (int m2 = 0; m2 <= L; ++m2) {
      const auto r = inverse_spectral_solve(chain, m2, 100 + m2);
      CHECK(r.ed_states_in_sector == test::binomial(L, m2));
      CHECK(r.ed_states_found == r.ed_states_in_sector);
      const auto e = predicted_elementary(L, m2, chain.h, chain.eta);
      for (const auto& sol : r.solutions) {
        CHECK(sol.residual <= 1e-9);
        CHECK(inverse_residual(chain, m2, sol.H) <= 1e-9);
        REQUIRE(sol.ed_state >= 0);
        CHECK(sol.ed_distance <= 1e-6);
        const auto& st = spec.states[static_cast<std::size_t>(sol.ed_state)];
        CHECK(st.sector_M2 == m2);
        const auto en = integrals_from_h(chain, sol.H);
        for (int n = 1; n <= L; ++n) CHECK(std::abs(en[n] - e[n]) <= 1e-8 * std::max(1.0, std::abs(e[n])));
      }
      for (const auto& ex : r.extraneous) {
        CHECK(ex.residual <= 1e-9);
        CHECK(ex.ed_state == -1);
      }
    }
  }
}

TEST_CASE("distinct eigenstates have distinct H vectors, L <= 4") {
  Rng rng(8);
  for (int L = 1; L <= 4; ++L) {
    const auto chain = sampling::draw_chain(rng, L);
    const auto spec = spin_chain::joint_diagonalize(chain);
    for (std::size_t a = 0; a < spec.states.size(); ++a)
      for (std::size_t b = a + 1; b < spec.states.size(); ++b) {
        double dist = 0.0;
        for (int i = 0; i < L; ++i) dist = std::max(dist, test::rel(spec.states[a].H[i], spec.states[b].H[i]));
        CHECK(dist > 1e-6);
      }
  }
}

}  // TEST_SUITE
