#pragma once

#include <span>
#include <vector>

#include "qcd/common.hpp"
#include "qcd/linalg.hpp"

// Classical trigonometric Ruijsenaars-Schneider system: Hamiltonian flow,
// Lax matrix in velocity and momentum form, its factorizations, integrals
// of motion and an adaptive integrator.
namespace qcd::rs {

inline constexpr double kGeneralPositionTol = 1e-9;
inline constexpr int kMaxSubsetParticles = 12;

struct RSState {
  cplx eta{0.5};
  std::vector<cplx> x;
  std::vector<cplx> p;

  int size() const { return static_cast<int>(x.size()); }

  // Throws GeneralPositionViolated, or ConfigError on size mismatch.
  void validate(double tol = kGeneralPositionTol) const;
};

cplx hamiltonian(const RSState& state);

// x'_i = dH/dp_i.
std::vector<cplx> velocities(const RSState& state);

// p'_i = -dH/dx_i.
std::vector<cplx> forces(const RSState& state);

// L_ij = sinh(eta) xdot_i / sinh(x_i - x_j - eta).
CMatrix lax_from_velocities(std::span<const cplx> x, std::span<const cplx> xdot, cplx eta);

CMatrix lax_from_momenta(const RSState& state);

// C_ij = sinh(eta) / sinh(x_i - x_j - eta).
CMatrix cauchy_matrix(std::span<const cplx> x, cplx eta);

// Companion matrix of the Lax pair, L' = [A, L].
CMatrix a_matrix(std::span<const cplx> x, std::span<const cplx> xdot, cplx eta);

struct CauchyDeterminant {
  cplx direct;       // LU determinant
  cplx closed_form;  // (-1)^n prod_{i<j} C(x_i - x_j)
  double relative_gap = 0.0;
};

// Cauchy determinant on the principal submatrix picked by subset.
CauchyDeterminant cauchy_det(std::span<const cplx> x, cplx eta, std::span<const int> subset);

// E_0..E_L by the explicit subset sum. E_0 = 1.
std::vector<cplx> integrals_e(std::span<const cplx> x, std::span<const cplx> xdot, cplx eta);

// det(lambda I - L) = sum_n (-1)^n E_n lambda^{L-n}, descending powers.
linalg::Poly char_poly_via_en(std::span<const cplx> x, std::span<const cplx> xdot, cplx eta);

// H_k = tr L^k for k = 0..kmax.
std::vector<cplx> trace_powers(const CMatrix& lax, int kmax);

// |sum_{k=0}^{L} (-1)^k E_{L-k} H_k| relative to the largest term.
double newton_identity_residual(std::span<const cplx> e, std::span<const cplx> h);

// Diagonal matrices and the Vandermonde-type matrix of the factorized form.
// D_xi: prod_{k != i} sinh(q_i - q_k + xi). S_K: e^{-(2i-K-1) eta}, i 1-based.
// V_ij = e^{(2j-K-1) q_i}.
CMatrix d_matrix(std::span<const cplx> q, cplx xi);
CMatrix s_matrix(int K, cplx eta);
CMatrix vandermonde(std::span<const cplx> q);

// L = -eta e^{eta P} D_eta (V^t)^-1 S^-1 V^t D_eta^-1. Throws SingularVandermonde.
CMatrix factorized_lax(const RSState& state);

// ||e^-eta e^X L e^-X - e^eta e^-X L e^X - 2 sinh(eta) Xdot E||_F / ||L||_F.
double xle_relation_check(const RSState& state);

// Right-hand sides of the second-order equations of motion.
std::vector<cplx> acceleration(std::span<const cplx> x, std::span<const cplx> xdot, cplx eta);
std::vector<cplx> acceleration_eta_infinite(std::span<const cplx> x, std::span<const cplx> xdot);
std::vector<cplx> acceleration_eta_half_ipi(std::span<const cplx> x, std::span<const cplx> xdot);

struct EvolveOptions {
  double tol = 1e-10;           // per-step mixed abs/rel error target
  double dt_output = 1e-3;      // spacing of the returned samples
  double min_step = 1e-12;
  long max_steps = 2'000'000;
  double collision_tol = 1e-6;  // on |sinh(x_i - x_j)|
};

struct TrajectoryPoint {
  double t = 0.0;
  RSState state;
  std::vector<cplx> xdot;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;  // uniform in t, spacing dt_output
  long steps_accepted = 0;
  long steps_rejected = 0;
};

// Dormand-Prince 5(4) on the Hamilton equations in (x, p). Throws
// CollisionDetected when a pair reaches collision_tol, or when the step
// stalls with |sinh(x_i - x_j)| or |sinh(x_i - x_j + eta)| < 1e-2; StepSizeUnderflow otherwise.
Trajectory evolve(const RSState& initial, double t_final, const EvolveOptions& options = {});

// max over samples of the assignment-matched relative distance between the
// spectrum of L(t) and of L(0).
double spectral_drift(const Trajectory& trajectory);

// max over samples and n of |E_n(t) - E_n(0)| / max(|E_n(0)|, 1).
double integrals_drift(const Trajectory& trajectory);

// Residual of xddot = rhs(x, xdot) with xddot from a seven-point central
// difference of the sampled velocities, relative to max(1, |rhs|).
enum class EquationOfMotion { General, EtaHalfIPi };
double second_order_residual(const Trajectory& trajectory, EquationOfMotion form = EquationOfMotion::General);

// ||dL/dt - [A, L]||_F / ||L||_F with dL/dt from a seven-point difference.
double lax_equation_residual(const Trajectory& trajectory);

}  // namespace qcd::rs
