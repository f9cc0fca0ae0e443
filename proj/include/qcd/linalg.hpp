#pragma once

#include <span>
#include <vector>

#include "qcd/common.hpp"

// Dense complex helpers shared by all modules. Polynomials are stored in
// descending powers: p[0] lambda^n + p[1] lambda^(n-1) + ... + p[n].
namespace qcd::linalg {

using Poly = std::vector<cplx>;

// Monic characteristic polynomial det(lambda I - A) from the eigenvalues of A.
Poly charpoly(const CMatrix& a);

// Faddeev-LeVerrier recursion. Exact in exact arithmetic, used as a second route.
Poly charpoly_leverrier(const CMatrix& a);

// prod_i (lambda - r_i).
Poly poly_from_roots(std::span<const cplx> roots);

Poly poly_mul(const Poly& a, const Poly& b);

cplx poly_eval(const Poly& p, cplx z);

// Coefficients of det(lambda A - B), degree n, by sampling on a circle of
// the given radius and inverse DFT. No eigensolver involved. A radius <= 0
// picks |det B / det A|^(1/n), the geometric mean root modulus.
Poly pencil_det_poly(const CMatrix& a, const CMatrix& b, double radius = 1.0);

// Diagonal similarity by powers of two with balanced row and column norms.
CMatrix balance(const CMatrix& a);

// Eigenvalues of the balanced matrix.
CVector eigenvalues(const CMatrix& a);

// e_0..e_n of the given values.
std::vector<cplx> elementary_symmetric(std::span<const cplx> values);

// Same recursion on |values|; the cancellation-free scale of e_k.
std::vector<double> elementary_symmetric_abs(std::span<const cplx> values);

// p_k = sum_i values_i^k for k = 0..kmax (p_0 = count).
std::vector<cplx> power_sums(std::span<const cplx> values, int kmax);

// max_k |a_k - b_k| / scale_k. scale must have the same length.
double coefficient_deviation(const Poly& a, const Poly& b, std::span<const double> scale);

// Scale for comparing two monic polynomials: for each coefficient the larger
// of e_k(|roots_a|) and e_k(|roots_b|), floored at tiny.
std::vector<double> poly_scale(std::span<const cplx> roots_a, std::span<const cplx> roots_b);

// ||a - b||_F / max(||b||_F, tiny).
double relative_frobenius(const CMatrix& a, const CMatrix& b);

// ||a b - b a||_F / (||a||_F ||b||_F).
double relative_commutator(const CMatrix& a, const CMatrix& b);

// Hungarian algorithm. Returns perm with row i assigned to column perm[i],
// minimizing the summed cost. Square cost matrices only.
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

struct MultisetMatch {
  std::vector<int> assignment;   // observed[i] <-> expected[assignment[i]]
  double max_relative_error = 0; // max_i |obs_i - exp_j| / |exp_j|
};

// Matches two equally sized multisets by minimal total relative distance.
MultisetMatch match_multisets(std::span<const cplx> observed, std::span<const cplx> expected);

// Sort by (Re, Im).
void sort_lex(std::vector<cplx>& values);

}  // namespace qcd::linalg
