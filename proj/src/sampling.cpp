#include "qcd/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace qcd::sampling {

spin_chain::ChainParams draw_chain(Rng& rng, int L) {
  if (L < 1 || L > spin_chain::kMaxSites) throw ConfigError("draw_chain: L out of range");
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    spin_chain::ChainParams c;
    c.L = L;
    c.eta = rng.uniform(0.2, 1.0);
    c.h = rng.uniform(-0.5, 0.5);
    c.inhom.clear();
    for (int i = 0; i < L; ++i) c.inhom.emplace_back(rng.uniform(0.0, 2.0));
    bool ok = true;
    for (int i = 0; i < L && ok; ++i)
      for (int j = 0; j < L && ok; ++j) {
        if (i == j) continue;
        const cplx d = c.inhom[i] - c.inhom[j];
        ok = std::abs(std::sinh(d)) >= kChainSinhGap && std::abs(std::sinh(d + c.eta)) >= kChainSinhGap;
      }
    if (ok) return c;
  }
  throw NoConvergence("draw_chain: rejection sampling exhausted");
}

identities::LemmaParams draw_lemma(Rng& rng, int N, int M) {
  if (N < 1 || M < 0 || M > N) throw ConfigError("draw_lemma requires 0 <= M <= N, N >= 1");
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    identities::LemmaParams p;
    p.eta = rng.complex_in_box(0.2, 1.0, -0.3, 0.3);
    p.g = std::exp(rng.complex_in_box(-1.0, 1.0, -0.5, 0.5));
    for (int i = 0; i < N; ++i) p.x.push_back(rng.complex_in_box(0.0, 2.0, -0.4, 0.4));
    for (int a = 0; a < M; ++a) p.y.push_back(rng.complex_in_box(0.0, 2.0, -0.4, 0.4));
    try {
      p.validate();
      return p;
    } catch (const Error&) {
    }
  }
  throw NoConvergence("draw_lemma: rejection sampling exhausted");
}

namespace {

rs::RSState chain_of_particles(Rng& rng, int L, cplx eta, double gap_lo, double gap_hi) {
  if (L < 1) throw ConfigError("RS draw needs L >= 1");
  rs::RSState s;
  s.eta = eta;
  double x = rng.uniform(0.0, 0.5);
  for (int i = 0; i < L; ++i) {
    s.x.emplace_back(x);
    x += rng.uniform(gap_lo, gap_hi);
    s.p.emplace_back(rng.uniform(-0.5, 0.5));
  }
  return s;
}

}  // namespace

rs::RSState draw_rs_real(Rng& rng, int L) {
  const double eta = rng.uniform(0.2, 1.0);
  return chain_of_particles(rng, L, eta, eta + 0.3, eta + 0.8);
}

rs::RSState draw_rs_half_ipi(Rng& rng, int L) { return chain_of_particles(rng, L, cplx(0.0, kPi / 2), 0.5, 1.0); }

double min_pair_sinh(const rs::Trajectory& trajectory) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& pt : trajectory.points)
    for (std::size_t i = 0; i < pt.state.x.size(); ++i)
      for (std::size_t j = i + 1; j < pt.state.x.size(); ++j)
        m = std::min(m, std::abs(std::sinh(pt.state.x[i] - pt.state.x[j])));
  return m;
}

}  // namespace qcd::sampling
