#pragma once

#include <span>
#include <vector>

#include "qcd/bethe.hpp"
#include "qcd/common.hpp"
#include "qcd/linalg.hpp"
#include "qcd/ruijsenaars.hpp"

// Numerical checks of the determinant lemma behind the duality: the Q and
// Q-tilde matrices, their factorizations, the pole-free pencil form and the
// determinant identity for the Lax matrix built from Bethe roots.
namespace qcd::identities {

inline constexpr double kLemmaGeneralPositionTol = 1e-6;

struct LemmaParams {
  std::vector<cplx> x;  // N entries
  std::vector<cplx> y;  // M entries, M <= N
  cplx g{1.0};
  cplx eta{0.5};

  int N() const { return static_cast<int>(x.size()); }
  int M() const { return static_cast<int>(y.size()); }

  // Throws GeneralPositionViolated, SingularVandermonde or ConfigError.
  void validate(double tol = kLemmaGeneralPositionTol) const;
};

using rs::d_matrix;
using rs::s_matrix;
using rs::vandermonde;

// Entry formulas.
CMatrix q_matrix(const LemmaParams& params);
CMatrix q_tilde_matrix(const LemmaParams& params);

// W = diag prod_gamma sinh(y_gamma - x_i)/sinh(y_gamma - x_i - eta), N x N.
CMatrix w_matrix(const LemmaParams& params);
// W-tilde = diag prod_k sinh(y_alpha - x_k)/sinh(y_alpha - x_k - eta), M x M.
CMatrix w_tilde_matrix(const LemmaParams& params);

// Q and Q-tilde through their Vandermonde factorizations.
CMatrix q_matrix_factorized(const LemmaParams& params);
CMatrix q_tilde_matrix_factorized(const LemmaParams& params);

struct FactorizationResiduals {
  double q = 0.0;        // relative Frobenius, direct vs factorized
  double q_tilde = 0.0;  // 0 when M = 0
  double det_w = 0.0;    // |det W - det W-tilde| / |det W|
};
FactorizationResiduals factorization_residuals(const LemmaParams& params);

// det(lambda I - Q) against det(lambda I - g S_{N-M}) det(lambda I - Q-tilde),
// coefficient-wise relative deviation.
double verify_lemma1(const LemmaParams& params);

// Same comparison with Q from lhs_side and g S, Q-tilde from rhs_side.
double lemma1_residual(const LemmaParams& lhs_side, const LemmaParams& rhs_side);

// Secondary route: eigenvalue multisets matched by assignment.
double lemma1_spectrum_residual(const LemmaParams& params);

// M = 0: eigenvalues of Q(x, {}, g) against g e^{-(2i-N+1) eta}.
double geometric_string_residual(std::span<const cplx> x, cplx g, cplx eta);

// Pencil form. lhs = det(lambda W^-1 - Q_0(x, g)),
// rhs = det(lambda I - g S_{N-M}) det(lambda W-tilde^-1 - Q-tilde_0(y, g)).
struct PencilForm {
  linalg::Poly lhs;
  linalg::Poly rhs;
  double residual = 0.0;  // max_k |lhs_k - rhs_k| / max_k max(|lhs_k|, |rhs_k|)
};
PencilForm pencil_form(const LemmaParams& params);

// Moves y_alpha to Re y_alpha = re_y and compares both pencils with their
// y_alpha -> infinity limits (one y fewer, rescaled). Normalized residuals.
struct YLimitCheck {
  double lhs = 0.0;
  double rhs = 0.0;
};
YLimitCheck y_limit_check(const LemmaParams& params, int alpha, double re_y = 8.0);

// (V-tilde^t)^-1 for t_i = e^{2 x_i} from the Lagrange basis coefficients.
// Throws SingularVandermonde.
CMatrix vandermonde_inverse(std::span<const cplx> x);

// ||(V-tilde^t)^-1 V-tilde^t - I||_F with the double result of
// vandermonde_inverse, the product formed in extended precision.
double vandermonde_inverse_residual(std::span<const cplx> x);

struct Theorem1Check {
  double charpoly = 0.0;  // det(lambda - L) vs the two string factors
  double q_form = 0.0;    // L(x, -H) vs Q({x - eta}, {u}, e^{Lh})
};

// Throws InvalidBetheRoots when the roots do not solve the Bethe equations
// to 1e-10.
Theorem1Check verify_theorem1_identity(const spin_chain::ChainParams& chain, const bethe::BetheRootSet& roots);

}  // namespace qcd::identities
