#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qcd/common.hpp"
#include "qcd/spin_chain.hpp"

// Bethe equations of the twisted chain and the eigenvalue formulas for
// T(x), H_j and G_j in terms of the roots.
namespace qcd::bethe {

using spin_chain::ChainParams;

struct BetheRootSet {
  int M2 = 0;
  std::vector<cplx> roots;
  double residual = 0.0;          // max |log-form defect|
  std::uint64_t params_hash = 0;
};

// Imag parts reduced to (-pi/2, pi/2], sorted by (Re, Im).
void canonicalize(std::vector<cplx>& roots);

// Reduce z modulo i pi to imag part in (-pi/2, pi/2].
cplx reduce_mod_ipi(cplx z);

// Distance between two root sets up to permutation and i pi shifts:
// min over assignments of max_alpha |reduce(u_alpha - u'_alpha)|.
double root_set_distance(std::span<const cplx> a, std::span<const cplx> b);

// For each alpha, log(LHS) - log(RHS) of the Bethe equation with every sinh
// factor on its principal log, imag part wrapped to (-pi, pi].
// Throws SingularConfiguration when a factor vanishes.
std::vector<cplx> bae_defect(std::span<const cplx> roots, const ChainParams& params);

// d defect_alpha / d u_beta.
CMatrix bae_jacobian(std::span<const cplx> roots, const ChainParams& params);

struct SolveOptions {
  double accept_tol = 1e-10;
  double dedup_tol = 1e-7;
  double distinct_tol = 1e-8;
  int max_iterations = 80;
};

struct SolveStats {
  int starts = 0;
  int converged = 0;
  int failed = 0;      // NoConvergence or singular along the way, per start
  int duplicates = 0;
};

// Twist continuation from every choice of M2 sites, then n_starts random
// Newton starts. Returns deduplicated, canonicalized solutions sorted
// lexicographically by their roots.
std::vector<BetheRootSet> solve_bae(const ChainParams& params, int M2, std::uint64_t seed, int n_starts,
                                    const SolveOptions& options = {}, SolveStats* stats = nullptr);

// Newton from a single start. Throws NoConvergence / SingularConfiguration.
BetheRootSet newton_polish(const ChainParams& params, std::vector<cplx> start, const SolveOptions& options = {});

// Eigenvalue of T^(h)(x). Throws SingularSpectralPoint at x = x_k or u_alpha.
cplx eigenvalue_t(std::span<const cplx> roots, const ChainParams& params, cplx x);

// Eigenvalue of H_j, j 0-based.
cplx eigenvalue_h(std::span<const cplx> roots, const ChainParams& params, int j);

// Eigenvalue of G_j, j 0-based.
cplx eigenvalue_g(std::span<const cplx> roots, const ChainParams& params, int j);

std::vector<cplx> eigenvalues_h(std::span<const cplx> roots, const ChainParams& params);
std::vector<cplx> eigenvalues_g(std::span<const cplx> roots, const ChainParams& params);

}  // namespace qcd::bethe
