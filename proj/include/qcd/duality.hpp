#pragma once

#include <cstdint>
#include <vector>

#include "qcd/common.hpp"
#include "qcd/spin_chain.hpp"

// Quantum-classical correspondence between the twisted inhomogeneous chain
// and the trigonometric RS model: predicted Lax spectra, the check over all
// eigenstates, the momentum identification and the inverse spectral problem.
namespace qcd::duality {

using spin_chain::ChainParams;
using spin_chain::JointSpectrum;

inline constexpr double kDualityTol = 1e-8;
inline constexpr double kMatchFailedTol = 1e-4;

struct StringSpectrum {
  int M1 = 0;
  int M2 = 0;
  cplx h{0.0};
  cplx eta{0.0};
  std::vector<cplx> values;  // M1 string then M2 string, ascending j
};

// {e^{Lh-(M1-1)eta+2 eta j}} and {e^{-Lh-(M2-1)eta+2 eta j}}.
StringSpectrum predicted_strings(int L, int M2, cplx h, cplx eta);

// tr L^n = e^{Lhn} sinh(M1 eta n)/sinh(eta n) + e^{-Lhn} sinh(M2 eta n)/sinh(eta n).
cplx predicted_integrals(int L, int M2, cplx h, cplx eta, int n);

// e_0..e_L of the string values.
std::vector<cplx> predicted_elementary(int L, int M2, cplx h, cplx eta);

// L({x}, {xdot = -H}).
CMatrix lax_from_chain_state(const ChainParams& chain, const std::vector<cplx>& H);

// E_0..E_L of the subset-sum form as functions of H. E_0 = 1.
std::vector<cplx> integrals_from_h(const ChainParams& chain, const std::vector<cplx>& H);

// d E_n / d H_j for n = 1..L (rows) and j = 1..L (columns).
CMatrix integrals_jacobian(const ChainParams& chain, const std::vector<cplx>& H);

struct StateRecord {
  int sector_M2 = 0;
  std::vector<cplx> H;
  std::vector<cplx> lax_eigenvalues;  // sorted by (Re, Im)
  StringSpectrum matched_string;
  double max_match_error = 0.0;
  double power_sum_error = 0.0;  // tr L^n vs predicted_integrals, n = 1..L
};

struct DualityReport {
  std::vector<StateRecord> states;
  double worst_error = 0.0;
  double worst_power_sum_error = 0.0;
  int n_states = 0;
  std::uint64_t params_hash = 0;
  double joint_residual = 0.0;

  bool passed(double tol = kDualityTol) const { return worst_error <= tol; }
};

// Throws DegenerateSpectrum (from diagonalization) or MatchFailed when a
// state misses its strings by more than kMatchFailedTol.
DualityReport verify_duality(const ChainParams& chain);
DualityReport verify_duality(const ChainParams& chain, const JointSpectrum& spectrum);

// p_i = -eta^-1 log(-eta G_i), principal branch.
std::vector<cplx> momenta_from_g(cplx eta, const std::vector<cplx>& G);

// Max over states and sites of |eta e^{eta p_i} prod f(x_i - x_k) + H_i| / |H_i|
// with p from momenta_from_g. Throws ZeroGValue.
double verify_momentum_identification(const ChainParams& chain, const JointSpectrum& spectrum);

struct InverseSolveOptions {
  int random_starts = 24;
  int perturbed_starts_per_state = 2;
  double perturbation = 1e-2;
  double accept_tol = 1e-9;    // relative residual of E_n = e_n
  double match_tol = 1e-6;     // distance to an ED H-vector
  double dedup_tol = 1e-7;
  int max_iterations = 100;
};

struct InverseSolution {
  std::vector<cplx> H;
  double residual = 0.0;
  int ed_state = -1;       // index into the spectrum, -1 when unmatched
  double ed_distance = 0.0;
};

struct InverseSolveResult {
  std::vector<InverseSolution> solutions;   // ED-confirmed
  std::vector<InverseSolution> extraneous;  // solve E_n = e_n, match no eigenstate
  int starts = 0;
  int failed = 0;
  int ed_states_in_sector = 0;
  int ed_states_found = 0;
};

// Newton on E_n(H) = e_n from perturbed ED H-vectors and random starts.
// The ED spectrum is computed internally.
InverseSolveResult inverse_spectral_solve(const ChainParams& chain, int M2, std::uint64_t seed,
                                          const InverseSolveOptions& options = {});

// Relative residual max_n |E_n(H) - e_n| / e_n(|xi|).
double inverse_residual(const ChainParams& chain, int M2, const std::vector<cplx>& H);

}  // namespace qcd::duality
