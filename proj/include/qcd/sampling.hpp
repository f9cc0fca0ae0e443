#pragma once

#include "qcd/identities.hpp"
#include "qcd/rng.hpp"
#include "qcd/ruijsenaars.hpp"
#include "qcd/spin_chain.hpp"

// Seeded parameter draws shared by the command line tool and the tests.
namespace qcd::sampling {

inline constexpr double kChainSinhGap = 0.05;
inline constexpr int kMaxRejections = 100000;

// eta in [0.2, 1], h in [-0.5, 0.5], real x_i in [0, 2] with
// |sinh(x_i - x_j)| and |sinh(x_i - x_j +- eta)| >= 0.05.
spin_chain::ChainParams draw_chain(Rng& rng, int L);

// x, y in [0, 2] x i[-0.4, 0.4], eta in [0.2, 1] x i[-0.3, 0.3], g = e^w with
// w in [-1, 1] x i[-0.5, 0.5]; redrawn until general position holds.
identities::LemmaParams draw_lemma(Rng& rng, int N, int M);

// Real eta in [0.2, 1], x_1 in [0, 0.5], gaps eta + U(0.3, 0.8),
// p in [-0.5, 0.5]. The gaps keep particles out of the attracting range.
rs::RSState draw_rs_real(Rng& rng, int L);

// eta = i pi / 2, x_1 in [0, 0.5], gaps U(0.5, 1), p in [-0.5, 0.5].
rs::RSState draw_rs_half_ipi(Rng& rng, int L);

// min over samples and pairs of |sinh(x_i - x_j)|.
double min_pair_sinh(const rs::Trajectory& trajectory);

}  // namespace qcd::sampling
