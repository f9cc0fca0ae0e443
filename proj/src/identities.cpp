#include "qcd/identities.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qcd::identities {

namespace {

void require_pair_gap(cplx a, cplx b, cplx shift, double tol, const char* what) {
  if (std::abs(std::sinh(a - b + shift)) <= tol) {
    std::ostringstream os;
    os << what << ": " << a << " and " << b << " too close (shift " << shift << ")";
    throw GeneralPositionViolated(os.str());
  }
}

void require_distinct_exponentials(std::span<const cplx> q, const char* what) {
  double tmax = 0.0;
  std::vector<cplx> t;
  for (const cplx z : q) {
    t.push_back(std::exp(2.0 * z));
    tmax = std::max(tmax, std::abs(t.back()));
  }
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j)
      if (std::abs(t[i] - t[j]) <= 1e-13 * tmax) throw SingularVandermonde(std::string("coinciding e^{2q} in ") + what);
}

double max_abs_coefficient(const linalg::Poly& p) {
  double m = 0.0;
  for (const cplx c : p) m = std::max(m, std::abs(c));
  return m;
}

// Relative deviation of two monic polynomials whose roots are known.
double monic_deviation(const linalg::Poly& a, std::span<const cplx> roots_a, const linalg::Poly& b,
                       std::span<const cplx> roots_b) {
  const auto scale = linalg::poly_scale(roots_a, roots_b);
  return linalg::coefficient_deviation(a, b, scale);
}

std::vector<cplx> s_values(int K, cplx g, cplx eta) {
  std::vector<cplx> out;
  for (int i = 1; i <= K; ++i) out.push_back(g * std::exp(-double(2 * i - K - 1) * eta));
  return out;
}

template <class R>
using MatrixT = Eigen::Matrix<std::complex<R>, Eigen::Dynamic, Eigen::Dynamic>;

template <class R>
std::vector<std::complex<R>> widen(const std::vector<cplx>& v) {
  return {v.begin(), v.end()};
}

template <class R>
MatrixT<R> q_entries(const LemmaParams& params) {
  using C = std::complex<R>;
  const C eta(params.eta), g(params.g);
  const auto x = widen<R>(params.x);
  const auto y = widen<R>(params.y);
  const int n = params.N();
  MatrixT<R> q(n, n);
  for (int i = 0; i < n; ++i) {
    C row = g * std::sinh(eta);
    for (int k = 0; k < n; ++k)
      if (k != i) row *= std::sinh(x[i] - x[k] + eta) / std::sinh(x[i] - x[k]);
    for (const C yg : y) row *= std::sinh(x[i] - yg) / std::sinh(x[i] - yg + eta);
    for (int j = 0; j < n; ++j) q(i, j) = row / std::sinh(x[j] - x[i] + eta);
  }
  return q;
}

template <class R>
MatrixT<R> q_tilde_entries(const LemmaParams& params) {
  using C = std::complex<R>;
  const C eta(params.eta), g(params.g);
  const auto x = widen<R>(params.x);
  const auto y = widen<R>(params.y);
  const int m = params.M();
  MatrixT<R> q(m, m);
  for (int a = 0; a < m; ++a) {
    C row = g * std::sinh(eta);
    for (int c = 0; c < m; ++c)
      if (c != a) row *= std::sinh(y[a] - y[c] - eta) / std::sinh(y[a] - y[c]);
    for (const C xk : x) row *= std::sinh(y[a] - xk) / std::sinh(y[a] - xk - eta);
    for (int b = 0; b < m; ++b) q(a, b) = row / std::sinh(y[b] - y[a] + eta);
  }
  return q;
}

// Extended-precision spectrum, balanced first, rounded back to double.
std::vector<cplx> eigenvalues_extended(MatrixT<long double> b) {
  const Eigen::Index n = b.rows();
  if (n == 0) return {};
  bool changed = true;
  for (int sweep = 0; changed && sweep < 100; ++sweep) {
    changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      long double c = 0.0L, r = 0.0L;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(b(j, i));
        r += std::abs(b(i, j));
      }
      if (c == 0.0L || r == 0.0L) continue;
      long double f = 1.0L;
      const long double s = c + r;
      while (c < r / 2.0L) { c *= 2.0L; r /= 2.0L; f *= 2.0L; }
      while (c >= r * 2.0L) { c /= 2.0L; r *= 2.0L; f /= 2.0L; }
      if (c + r < 0.95L * s) {
        changed = true;
        b.col(i) *= f;
        b.row(i) /= f;
      }
    }
  }
  Eigen::ComplexEigenSolver<MatrixT<long double>> solver(b, false);
  std::vector<cplx> out;
  for (Eigen::Index i = 0; i < n; ++i) out.emplace_back(solver.eigenvalues()(i));
  return out;
}

std::vector<std::complex<long double>> monic_from_roots_extended(const std::vector<cplx>& roots) {
  std::vector<std::complex<long double>> p{1.0L};
  for (const cplx r : roots) {
    const std::complex<long double> z(r);
    p.emplace_back(0.0L);
    for (std::size_t k = p.size() - 1; k > 0; --k) p[k] -= z * p[k - 1];
  }
  return p;
}

// Coefficients of det(lambda A - B), descending, from n + 1 determinant
// samples on a circle and an inverse DFT, all with a 64-bit mantissa.
linalg::Poly pencil_extended(const MatrixT<long double>& a, const MatrixT<long double>& b) {
  using C = std::complex<long double>;
  const Eigen::Index n = a.rows();
  if (n == 0) return {cplx{1.0}};
  const C det_a = a.partialPivLu().determinant();
  const C det_b = b.partialPivLu().determinant();
  long double radius = 1.0L;
  if (std::abs(det_a) > 0.0L && std::abs(det_b) > 0.0L)
    radius = std::pow(std::abs(det_b / det_a), 1.0L / static_cast<long double>(n));
  const auto samples = static_cast<std::size_t>(n) + 1;
  const long double two_pi = 6.283185307179586476925286766559L;
  std::vector<C> values(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const C lambda = std::polar(radius, two_pi * static_cast<long double>(k) / samples);
    values[k] = (lambda * a - b).partialPivLu().determinant();
  }
  linalg::Poly out(samples);
  for (std::size_t m = 0; m < samples; ++m) {
    C acc{0.0L};
    for (std::size_t k = 0; k < samples; ++k)
      acc += values[k] * std::polar(1.0L, -two_pi * static_cast<long double>(k * m % samples) / samples);
    acc /= static_cast<long double>(samples) * std::pow(radius, static_cast<long double>(m));
    out[samples - 1 - m] = cplx(acc);
  }
  return out;
}

template <class R>
MatrixT<R> inverse_diagonal(const MatrixT<R>& d) {
  return d.diagonal().cwiseInverse().asDiagonal();
}

template <class R>
MatrixT<R> diag_matrix(const std::vector<std::complex<R>>& v) {
  MatrixT<R> m = MatrixT<R>::Zero(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = v[i];
  return m;
}

template <class R>
std::vector<std::complex<R>> w_values(const std::vector<std::complex<R>>& centers,
                                      const std::vector<std::complex<R>>& others, std::complex<R> eta,
                                      bool centers_are_y) {
  std::vector<std::complex<R>> out;
  for (const auto c : centers) {
    std::complex<R> v{1.0};
    for (const auto o : others) {
      const auto diff = centers_are_y ? c - o : o - c;  // always y - x
      v *= std::sinh(diff) / std::sinh(diff - eta);
    }
    out.push_back(v);
  }
  return out;
}

template <class R>
MatrixT<R> d_entries(const std::vector<std::complex<R>>& q, std::complex<R> xi) {
  std::vector<std::complex<R>> v;
  for (std::size_t i = 0; i < q.size(); ++i) {
    std::complex<R> d{1.0};
    for (std::size_t k = 0; k < q.size(); ++k)
      if (k != i) d *= std::sinh(q[i] - q[k] + xi);
    v.push_back(d);
  }
  return diag_matrix<R>(v);
}

template <class R>
MatrixT<R> s_entries(int K, std::complex<R> eta) {
  std::vector<std::complex<R>> v;
  for (int i = 1; i <= K; ++i) v.push_back(std::exp(-static_cast<R>(2 * i - K - 1) * eta));
  return diag_matrix<R>(v);
}

template <class R>
MatrixT<R> v_entries(const std::vector<std::complex<R>>& q) {
  const auto K = static_cast<Eigen::Index>(q.size());
  MatrixT<R> v(K, K);
  for (Eigen::Index i = 0; i < K; ++i)
    for (Eigen::Index j = 0; j < K; ++j) v(i, j) = std::exp(static_cast<R>(2 * (j + 1) - K - 1) * q[i]);
  return v;
}

// Both pencils of the pole-free form, extended precision.
struct PencilPair {
  linalg::Poly lhs, rhs;
};

PencilPair pencil_pair(const LemmaParams& params, long double lhs_shift_exp = 0.0L) {
  using C = std::complex<long double>;
  const C eta(params.eta);
  const auto x = widen<long double>(params.x);
  const auto y = widen<long double>(params.y);
  LemmaParams bare_x{params.x, {}, params.g, params.eta};
  const MatrixT<long double> w_inv = inverse_diagonal<long double>(diag_matrix<long double>(w_values<long double>(x, y, eta, false)));
  PencilPair out;
  out.lhs = pencil_extended(std::exp(lhs_shift_exp * eta) * w_inv, q_entries<long double>(bare_x));
  out.rhs = linalg::poly_from_roots(s_values(params.N() - params.M(), params.g, params.eta));
  if (params.M() > 0) {
    LemmaParams bare_y{{}, params.y, params.g, params.eta};
    const MatrixT<long double> wt_inv =
        inverse_diagonal<long double>(diag_matrix<long double>(w_values<long double>(y, x, eta, true)));
    out.rhs = linalg::poly_mul(out.rhs, pencil_extended(wt_inv, q_tilde_entries<long double>(bare_y)));
  }
  return out;
}

double normalized_gap(const linalg::Poly& a, const linalg::Poly& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  const double scale = std::max(max_abs_coefficient(a), max_abs_coefficient(b));
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst / std::max(scale, 1e-300);
}

}  // namespace

void LemmaParams::validate(double tol) const {
  if (x.empty()) throw ConfigError("lemma needs N >= 1");
  if (y.size() > x.size()) throw ConfigError("lemma needs M <= N");
  if (std::abs(g) == 0.0) throw ConfigError("lemma needs g != 0");
  if (std::abs(std::sinh(eta)) <= tol) throw GeneralPositionViolated("sinh(eta) vanishes");
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (i == j) continue;
      require_pair_gap(x[i], x[j], 0.0, tol, "x");
      require_pair_gap(x[i], x[j], eta, tol, "x");
    }
  for (std::size_t a = 0; a < y.size(); ++a)
    for (std::size_t b = 0; b < y.size(); ++b) {
      if (a == b) continue;
      require_pair_gap(y[a], y[b], 0.0, tol, "y");
      require_pair_gap(y[a], y[b], eta, tol, "y");
    }
  for (const cplx xi : x)
    for (const cplx ya : y) {
      require_pair_gap(xi, ya, 0.0, tol, "x/y");
      require_pair_gap(xi, ya, -eta, tol, "x/y");
      require_pair_gap(xi, ya, eta, tol, "x/y");
    }
  require_distinct_exponentials(x, "x");
  require_distinct_exponentials(y, "y");
}

CMatrix q_matrix(const LemmaParams& params) {
  params.validate();
  return q_entries<double>(params);
}

CMatrix q_tilde_matrix(const LemmaParams& params) {
  params.validate();
  return q_tilde_entries<double>(params);
}

CMatrix w_matrix(const LemmaParams& params) {
  const int n = params.N();
  CMatrix w = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    cplx v{1.0};
    for (const cplx yg : params.y) v *= sinh_ratio(yg - params.x[i], yg - params.x[i] - params.eta);
    w(i, i) = v;
  }
  return w;
}

CMatrix w_tilde_matrix(const LemmaParams& params) {
  const int m = params.M();
  CMatrix w = CMatrix::Zero(m, m);
  for (int a = 0; a < m; ++a) {
    cplx v{1.0};
    for (const cplx xk : params.x) v *= sinh_ratio(params.y[a] - xk, params.y[a] - xk - params.eta);
    w(a, a) = v;
  }
  return w;
}

CMatrix q_matrix_factorized(const LemmaParams& params) {
  params.validate();
  using C = std::complex<long double>;
  const C eta(params.eta), g(params.g);
  const auto x = widen<long double>(params.x);
  const auto y = widen<long double>(params.y);
  const MatrixT<long double> vt = v_entries<long double>(x).transpose();
  const MatrixT<long double> d = d_entries<long double>(x, eta);
  const MatrixT<long double> s_inv = inverse_diagonal<long double>(s_entries<long double>(params.N(), eta));
  const MatrixT<long double> middle = vt.partialPivLu().solve(s_inv * vt);
  const MatrixT<long double> w = diag_matrix<long double>(w_values<long double>(x, y, eta, false));
  const MatrixT<long double> q = g * w * d * middle * inverse_diagonal<long double>(d);
  return q.cast<cplx>();
}

CMatrix q_tilde_matrix_factorized(const LemmaParams& params) {
  params.validate();
  if (params.M() == 0) return CMatrix(0, 0);
  using C = std::complex<long double>;
  const C eta(params.eta), g(params.g);
  const auto x = widen<long double>(params.x);
  const auto y = widen<long double>(params.y);
  const MatrixT<long double> v = v_entries<long double>(y);
  const MatrixT<long double> d0 = d_entries<long double>(y, C{0.0L});
  const MatrixT<long double> s = s_entries<long double>(params.M(), eta);
  // V S V^-1 = (V^-t S V^t)^t
  const MatrixT<long double> middle = v.transpose().partialPivLu().solve(s * v.transpose()).transpose();
  const MatrixT<long double> wt = diag_matrix<long double>(w_values<long double>(y, x, eta, true));
  const MatrixT<long double> q = g * wt * inverse_diagonal<long double>(d0) * middle * d0;
  return q.cast<cplx>();
}

FactorizationResiduals factorization_residuals(const LemmaParams& params) {
  FactorizationResiduals out;
  out.q = linalg::relative_frobenius(q_matrix_factorized(params), q_matrix(params));
  if (params.M() > 0)
    out.q_tilde = linalg::relative_frobenius(q_tilde_matrix_factorized(params), q_tilde_matrix(params));
  const cplx dw = w_matrix(params).diagonal().prod();
  const cplx dwt = w_tilde_matrix(params).diagonal().prod();
  out.det_w = std::abs(dw - dwt) / std::max(std::abs(dw), 1e-300);
  return out;
}

double lemma1_residual(const LemmaParams& lhs_side, const LemmaParams& rhs_side) {
  lhs_side.validate();
  rhs_side.validate();
  if (lhs_side.N() != rhs_side.N() || lhs_side.M() != rhs_side.M())
    throw ConfigError("lemma1_residual: both sides need the same N and M");
  // Coefficients of a non-normal N <= 6 matrix lose up to ~1e-7 in double;
  // both sides are evaluated with a 64-bit mantissa.
  const auto roots_lhs = eigenvalues_extended(q_entries<long double>(lhs_side));
  auto roots_rhs = s_values(rhs_side.N() - rhs_side.M(), rhs_side.g, rhs_side.eta);
  for (const cplx z : eigenvalues_extended(q_tilde_entries<long double>(rhs_side))) roots_rhs.push_back(z);
  const auto lhs = monic_from_roots_extended(roots_lhs);
  const auto rhs = monic_from_roots_extended(roots_rhs);
  const auto scale = linalg::poly_scale(roots_lhs, roots_rhs);
  double worst = 0.0;
  for (std::size_t k = 0; k < lhs.size(); ++k)
    worst = std::max(worst, static_cast<double>(std::abs(lhs[k] - rhs[k])) / scale[k]);
  return worst;
}

double verify_lemma1(const LemmaParams& params) { return lemma1_residual(params, params); }

double lemma1_spectrum_residual(const LemmaParams& params) {
  params.validate();
  const auto observed = eigenvalues_extended(q_entries<long double>(params));
  auto expected = s_values(params.N() - params.M(), params.g, params.eta);
  for (const cplx z : eigenvalues_extended(q_tilde_entries<long double>(params))) expected.push_back(z);
  return linalg::match_multisets(observed, expected).max_relative_error;
}

double geometric_string_residual(std::span<const cplx> x, cplx g, cplx eta) {
  LemmaParams p{{x.begin(), x.end()}, {}, g, eta};
  p.validate();
  const auto observed = eigenvalues_extended(q_entries<long double>(p));
  std::vector<cplx> expected;
  const int n = p.N();
  for (int i = 0; i < n; ++i) expected.push_back(g * std::exp(-double(2 * i - n + 1) * eta));
  return linalg::match_multisets(observed, expected).max_relative_error;
}

PencilForm pencil_form(const LemmaParams& params) {
  params.validate();
  const PencilPair pair = pencil_pair(params);
  PencilForm out;
  out.lhs = pair.lhs;
  out.rhs = pair.rhs;
  out.residual = normalized_gap(out.lhs, out.rhs);
  return out;
}

YLimitCheck y_limit_check(const LemmaParams& params, int alpha, double re_y) {
  params.validate();
  if (alpha < 0 || alpha >= params.M()) throw ConfigError("y_limit_check: alpha out of range");
  LemmaParams far = params;
  far.y[static_cast<std::size_t>(alpha)] = cplx(re_y, params.y[static_cast<std::size_t>(alpha)].imag());
  far.validate();
  LemmaParams reduced = params;
  reduced.y.erase(reduced.y.begin() + alpha);

  const PencilPair at_far = pencil_pair(far);
  YLimitCheck out;
  // det(lambda e^-eta W^{N,M-1}^-1 - Q_0)
  out.lhs = normalized_gap(at_far.lhs, pencil_pair(reduced, -1.0L).lhs);

  using C = std::complex<long double>;
  const C eta(params.eta);
  const auto x = widen<long double>(params.x);
  const auto y_rest = widen<long double>(reduced.y);
  linalg::Poly limit_rhs = linalg::poly_from_roots(s_values(params.N() - params.M(), params.g, params.eta));
  // (lambda e^{-N eta} - g e^{-(M-1) eta})
  const cplx lead = std::exp(-double(params.N()) * params.eta);
  limit_rhs = linalg::poly_mul(limit_rhs, {lead, -params.g * std::exp(-double(params.M() - 1) * params.eta)});
  if (!y_rest.empty()) {
    LemmaParams bare{{}, reduced.y, params.g, params.eta};
    const MatrixT<long double> wt_inv =
        inverse_diagonal<long double>(diag_matrix<long double>(w_values<long double>(y_rest, x, eta, true)));
    limit_rhs = linalg::poly_mul(limit_rhs, pencil_extended(wt_inv, std::exp(eta) * q_tilde_entries<long double>(bare)));
  }
  out.rhs = normalized_gap(at_far.rhs, limit_rhs);
  return out;
}

namespace {

MatrixT<long double> vandermonde_inverse_extended(std::span<const cplx> x) {
  using C = std::complex<long double>;
  const auto n = static_cast<Eigen::Index>(x.size());
  require_distinct_exponentials(x, "x");
  std::vector<C> t;
  for (const cplx z : x) t.push_back(std::exp(2.0L * C(z)));
  MatrixT<long double> inv(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    // prod_{l != k} (s - t_l), ascending powers of s
    std::vector<C> num{C{1.0L}};
    C denom{1.0L};
    for (Eigen::Index l = 0; l < n; ++l) {
      if (l == k) continue;
      num.push_back(C{0.0L});
      for (std::size_t m = num.size() - 1; m > 0; --m) num[m] = num[m - 1] - t[l] * num[m];
      num[0] = -t[l] * num[0];
      denom *= t[k] - t[l];
    }
    for (Eigen::Index j = 0; j < n; ++j) inv(k, j) = num[static_cast<std::size_t>(j)] / denom;
  }
  return inv;
}

}  // namespace

CMatrix vandermonde_inverse(std::span<const cplx> x) { return vandermonde_inverse_extended(x).cast<cplx>(); }

double vandermonde_inverse_residual(std::span<const cplx> x) {
  using C = std::complex<long double>;
  const auto n = static_cast<Eigen::Index>(x.size());
  const MatrixT<long double> inv = vandermonde_inverse(x).cast<C>();
  MatrixT<long double> vt(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) vt(j, i) = std::exp(2.0L * static_cast<long double>(j) * C(x[i]));
  return static_cast<double>((inv * vt - MatrixT<long double>::Identity(n, n)).norm());
}

Theorem1Check verify_theorem1_identity(const spin_chain::ChainParams& chain, const bethe::BetheRootSet& roots) {
  chain.validate();
  if (static_cast<int>(roots.roots.size()) != roots.M2 || roots.M2 > chain.L)
    throw InvalidBetheRoots("root count does not match the sector");
  double residual = 0.0;
  try {
    for (const cplx d : bethe::bae_defect(roots.roots, chain)) residual = std::max(residual, std::abs(d));
  } catch (const SingularConfiguration& e) {
    throw InvalidBetheRoots(e.what());
  }
  if (!(residual <= 1e-10)) {
    std::ostringstream os;
    os << "Bethe residual " << residual << " above 1e-10";
    throw InvalidBetheRoots(os.str());
  }
  const auto h = bethe::eigenvalues_h(roots.roots, chain);
  std::vector<cplx> xdot;
  for (const cplx hv : h) xdot.push_back(-hv);
  const CMatrix lax = rs::lax_from_velocities(chain.inhom, xdot, chain.eta);

  LemmaParams lemma;
  for (const cplx xk : chain.inhom) lemma.x.push_back(xk - chain.eta);
  lemma.y = roots.roots;
  lemma.g = std::exp(double(chain.L) * chain.h);
  lemma.eta = chain.eta;

  Theorem1Check out;
  out.q_form = linalg::relative_frobenius(lax, q_matrix(lemma));

  const int m2 = roots.M2;
  const int m1 = chain.L - m2;
  std::vector<cplx> strings = s_values(m1, std::exp(double(chain.L) * chain.h), chain.eta);
  for (const cplx z : s_values(m2, std::exp(-double(chain.L) * chain.h), chain.eta)) strings.push_back(z);
  const auto lax_roots = to_std(linalg::eigenvalues(lax));
  out.charpoly = monic_deviation(linalg::poly_from_roots(lax_roots), lax_roots, linalg::poly_from_roots(strings),
                                 strings);
  return out;
}

}  // namespace qcd::identities
