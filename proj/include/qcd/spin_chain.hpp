#pragma once

#include <cstdint>
#include <vector>

#include "qcd/common.hpp"

// Six-vertex R-matrices and the transfer-matrix operators acting on the
// 2^L dimensional spin space.
//
// Basis convention: a computational basis index b encodes the spins of all
// sites, site 1 being the most significant bit. Bit value 0 is spin up,
// 1 is spin down. Two-site matrices are ordered (up up, up down, down up,
// down down) with the first factor being the auxiliary space.
namespace qcd::spin_chain {

inline constexpr int kMaxSites = 10;

struct ChainParams {
  int L = 1;
  cplx eta{0.5};
  cplx h{0.0};
  cplx v{0.0};
  std::vector<cplx> inhom{cplx{0.0}};
  double tol_general_position = 1e-9;

  // Throws GeneralPositionViolated / ConfigError.
  void validate() const;

  // FNV-1a over the numeric content; stable across runs and platforms with
  // IEEE doubles.
  std::uint64_t hash() const;
};

struct QuantumOperator {
  enum class SiteOrder { FirstSiteMostSignificant };
  static constexpr SiteOrder site_order = SiteOrder::FirstSiteMostSignificant;

  int sites = 0;
  CMatrix entries;

  Eigen::Index dim() const { return entries.rows(); }
};

// Symmetric trigonometric R-matrix. Throws SingularSpectralPoint when
// |sinh x| <= tol.
CMatrix4 r_matrix(cplx x, cplx eta, double tol = 1e-12);

// Asymmetric R-matrix, explicit entry form.
CMatrix4 r_matrix_asymmetric(cplx x, cplx eta, cplx h, cplx v, double tol = 1e-12);

// Same matrix through the diagonal conjugation of the symmetric one.
CMatrix4 r_matrix_asymmetric_conjugated(cplx x, cplx eta, cplx h, cplx v, double tol = 1e-12);

// R(x) at x -> +inf (sign = +1) or -inf (sign = -1).
CMatrix4 r_matrix_limit(cplx eta, int sign);

// Residue of R at x = 0 divided by sinh eta: the permutation of two spins.
CMatrix4 permutation_matrix();

// Operator on `sites` spins acting as `two_site` on sites (i, j), 1-based,
// i != j. The first tensor factor of `two_site` is placed on site i.
CMatrix embed_two_site(const CMatrix4& two_site, int i, int j, int sites);

// Operator acting as the 2x2 matrix `one_site` on site i, 1-based.
CMatrix embed_one_site(const Eigen::Matrix2cd& one_site, int i, int sites);

// Frobenius norm of R12(x-x') R13(x) R23(x') - R23(x') R13(x) R12(x-x').
double yang_baxter_residual(cplx x, cplx xp, cplx eta);

// Same for the asymmetric matrices:
// R12^{-v',v}(x-x') R13^{h,v}(x) R23^{h,v'}(x') = reversed product.
double yang_baxter_asymmetric_residual(cplx x, cplx xp, cplx eta, cplx h, cplx v, cplx vp);

// tr_0( F_1 F_2 ... F_L diag(twist_up, twist_down)_0 ) where F_i is a
// 4x4 matrix on (auxiliary, site i).
CMatrix trace_monodromy(const std::vector<CMatrix4>& factors, cplx twist_up, cplx twist_down);

// Transfer matrix of the asymmetric model with periodic boundary.
QuantumOperator transfer_matrix_asym(const ChainParams& params, cplx x);

// Transfer matrix of the symmetric model twisted by exp(L h sigma^z).
QuantumOperator transfer_matrix_twisted(const ChainParams& params, cplx x);

// T^(h)(+inf) for sign = +1 and T^(h)(-inf) for sign = -1.
QuantumOperator transfer_matrix_twisted_limit(const ChainParams& params, int sign);

// U = exp(sum_j (j-1) h sigma^z_j).
QuantumOperator similarity_u(const ChainParams& params);

struct SpinOperators {
  QuantumOperator sz, m1, m2;
};

SpinOperators sz_m1_m2_operators(int L);

// Residue Hamiltonians H_k with the k-th R factor replaced by the
// permutation (exact residue, no limit taken).
std::vector<QuantumOperator> hamiltonians_h(const ChainParams& params);

// G_i = T^(h)(x_i - eta).
std::vector<QuantumOperator> hamiltonians_g(const ChainParams& params);

// C = (T^(h)(+inf) + T^(h)(-inf)) / 2.
QuantumOperator constant_term(const ChainParams& params);

// C + sinh eta sum_k H_k coth(x - x_k).
CMatrix pole_expansion(const QuantumOperator& c, const std::vector<QuantumOperator>& h,
                       const ChainParams& params, cplx x);

// Closed forms of the sum rules: diagonal operators built from M_1, M_2.
QuantumOperator constant_term_closed_form(const ChainParams& params);
QuantumOperator hamiltonian_sum_closed_form(const ChainParams& params);

// prod_{k != i} sinh(x_i - x_k + eta) / sinh(x_i - x_k), the scalar of G_i H_i.
cplx gh_scalar(const ChainParams& params, int i);

struct SectorBasis {
  int L = 0;
  int M2 = 0;
  std::vector<Eigen::Index> indices;
};

SectorBasis sector_basis(int L, int M2);

CMatrix restrict_to_sector(const CMatrix& op, const SectorBasis& basis);

struct JointState {
  int sector_M2 = 0;
  CVector eigenvector;          // full 2^L space, unit norm
  std::vector<cplx> H;          // eigenvalues of H_1..H_L
  std::vector<cplx> G;          // eigenvalues of G_1..G_L
  cplx C_value{0.0};
  std::vector<double> residual_h;  // ||(H_k - H_k I) psi|| / (||H_k||_F ||psi||)
  std::vector<double> residual_g;
};

struct JointSpectrum {
  std::vector<JointState> states;
  int retries_used = 0;

  double max_residual() const;
};

struct JointDiagonalizeOptions {
  std::uint64_t seed = 0x6a09e667f3bcc908ULL;
  double residual_tol = 1e-8;
  int max_retries = 5;
};

// Throws DegenerateSpectrum after max_retries failed combinations.
JointSpectrum joint_diagonalize(const ChainParams& params, const JointDiagonalizeOptions& options = {});

// psi^* A psi / psi^* psi.
cplx rayleigh(const CMatrix& a, const CVector& psi);

}  // namespace qcd::spin_chain
