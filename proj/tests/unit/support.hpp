#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "qcd/common.hpp"
#include "qcd/rng.hpp"
#include "qcd/spin_chain.hpp"

namespace qcd::test {

using namespace std::complex_literals;

inline double min_pair_gap(const std::vector<cplx>& q, cplx eta) {
  double gap = std::abs(std::sinh(eta));
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) {
      if (i == j) continue;
      const cplx d = q[i] - q[j];
      gap = std::min({gap, std::abs(std::sinh(d)), std::abs(std::sinh(d + eta)), std::abs(std::sinh(d - eta))});
    }
  return gap;
}

// Complex parameters: x in [0, 2] x i[-0.4, 0.4], eta in [0.2, 1] x i[-0.3, 0.3],
// small complex fields; pair gaps at least 0.05.
inline spin_chain::ChainParams complex_chain(Rng& rng, int L, bool with_v = false) {
  spin_chain::ChainParams p;
  p.L = L;
  for (;;) {
    p.eta = rng.complex_in_box(0.2, 1.0, -0.3, 0.3);
    p.h = rng.complex_in_box(-0.5, 0.5, -0.3, 0.3);
    p.v = with_v ? rng.complex_in_box(-0.5, 0.5, -0.3, 0.3) : cplx{0.0};
    p.inhom.clear();
    for (int i = 0; i < L; ++i) p.inhom.push_back(rng.complex_in_box(0.0, 2.0, -0.4, 0.4));
    if (min_pair_gap(p.inhom, p.eta) >= 0.05) return p;
  }
}

inline cplx random_point(Rng& rng) { return rng.complex_in_box(-1.5, 1.5, -1.0, 1.0); }

// exp(v S^z) as a diagonal operator.
inline CMatrix exp_sz(int L, cplx v) {
  const auto dim = Eigen::Index{1} << L;
  CMatrix out = CMatrix::Zero(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    int sz = 0;
    for (int s = 0; s < L; ++s) sz += ((b >> s) & 1) ? -1 : 1;
    out(b, b) = std::exp(v * double(sz));
  }
  return out;
}

inline double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline double max_rel(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, rel(a[i], b[i]));
  return worst;
}

inline int binomial(int n, int k) {
  int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace qcd::test
