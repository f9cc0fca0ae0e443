#include "qcd/linalg.hpp"

#include <algorithm>
#include <limits>

namespace qcd::linalg {

CMatrix balance(const CMatrix& a) {
  // Parlett-Reinsch: power-of-two diagonal similarity equalizing row and
  // column norms. Exact in floating point.
  CMatrix b = a;
  const Eigen::Index n = b.rows();
  bool changed = true;
  for (int sweep = 0; changed && sweep < 100; ++sweep) {
    changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(b(j, i));
        r += std::abs(b(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      const double s = c + r;
      while (c < r / 2.0) { c *= 2.0; r /= 2.0; f *= 2.0; }
      while (c >= r * 2.0) { c /= 2.0; r *= 2.0; f /= 2.0; }
      if (c + r < 0.95 * s) {
        changed = true;
        b.col(i) *= f;
        b.row(i) /= f;
      }
    }
  }
  return b;
}

CVector eigenvalues(const CMatrix& a) {
  if (a.rows() == 0) return CVector(0);
  Eigen::ComplexEigenSolver<CMatrix> solver(balance(a), /*computeEigenvectors=*/false);
  return solver.eigenvalues();
}

Poly poly_from_roots(std::span<const cplx> roots) {
  Poly p{cplx{1.0}};
  for (const cplx r : roots) {
    p.push_back(cplx{0.0});
    for (std::size_t k = p.size() - 1; k > 0; --k) p[k] -= r * p[k - 1];
  }
  return p;
}

Poly charpoly(const CMatrix& a) {
  const CVector ev = eigenvalues(a);
  return poly_from_roots(std::span<const cplx>(ev.data(), static_cast<std::size_t>(ev.size())));
}

Poly charpoly_leverrier(const CMatrix& a) {
  const Eigen::Index n = a.rows();
  Poly p(static_cast<std::size_t>(n) + 1, cplx{0.0});
  p[0] = 1.0;
  CMatrix m = CMatrix::Zero(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    m = a * m;
    m.diagonal().array() += p[static_cast<std::size_t>(k - 1)];
    p[static_cast<std::size_t>(k)] = -(a * m).trace() / static_cast<double>(k);
  }
  return p;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, cplx{0.0});
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

cplx poly_eval(const Poly& p, cplx z) {
  cplx acc{0.0};
  for (const cplx c : p) acc = acc * z + c;
  return acc;
}

Poly pencil_det_poly(const CMatrix& a, const CMatrix& b, double radius) {
  const Eigen::Index n = a.rows();
  if (n == 0) return Poly{cplx{1.0}};
  if (radius <= 0.0) {
    const cplx da = a.determinant();
    const cplx db = b.determinant();
    radius = 1.0;
    if (std::abs(da) > 0.0 && std::abs(db) > 0.0) {
      const double r = std::pow(std::abs(db / da), 1.0 / static_cast<double>(n));
      if (std::isfinite(r) && r > 0.0) radius = r;
    }
  }
  const auto samples = static_cast<std::size_t>(n) + 1;
  std::vector<cplx> values(samples);
  for (std::size_t j = 0; j < samples; ++j) {
    const cplx z = std::polar(radius, 2.0 * kPi * static_cast<double>(j) / static_cast<double>(samples));
    const CMatrix pencil = z * a - b;
    values[j] = pencil.partialPivLu().determinant();
  }
  // ascending[k] = coefficient of lambda^k
  Poly out(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    cplx acc{0.0};
    for (std::size_t j = 0; j < samples; ++j) {
      acc += values[j] * std::polar(1.0, -2.0 * kPi * static_cast<double>(j * k % samples) /
                                             static_cast<double>(samples));
    }
    acc /= static_cast<double>(samples) * std::pow(radius, static_cast<double>(k));
    out[samples - 1 - k] = acc;
  }
  return out;
}

std::vector<cplx> elementary_symmetric(std::span<const cplx> values) {
  std::vector<cplx> e(values.size() + 1, cplx{0.0});
  e[0] = 1.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t k = i + 1; k > 0; --k) e[k] += values[i] * e[k - 1];
  return e;
}

std::vector<double> elementary_symmetric_abs(std::span<const cplx> values) {
  std::vector<double> e(values.size() + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t k = i + 1; k > 0; --k) e[k] += std::abs(values[i]) * e[k - 1];
  return e;
}

std::vector<cplx> power_sums(std::span<const cplx> values, int kmax) {
  std::vector<cplx> p(static_cast<std::size_t>(kmax) + 1, cplx{0.0});
  for (const cplx v : values) {
    cplx pw{1.0};
    for (int k = 0; k <= kmax; ++k) {
      p[static_cast<std::size_t>(k)] += pw;
      pw *= v;
    }
  }
  return p;
}

double coefficient_deviation(const Poly& a, const Poly& b, std::span<const double> scale) {
  if (a.size() != b.size() || a.size() != scale.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]) / scale[k]);
  return worst;
}

std::vector<double> poly_scale(std::span<const cplx> roots_a, std::span<const cplx> roots_b) {
  const auto ea = elementary_symmetric_abs(roots_a);
  const auto eb = elementary_symmetric_abs(roots_b);
  std::vector<double> s(std::max(ea.size(), eb.size()), 0.0);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double va = k < ea.size() ? ea[k] : 0.0;
    const double vb = k < eb.size() ? eb[k] : 0.0;
    s[k] = std::max({va, vb, 1e-300});
  }
  return s;
}

double relative_frobenius(const CMatrix& a, const CMatrix& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

double relative_commutator(const CMatrix& a, const CMatrix& b) {
  return (a * b - b * a).norm() / std::max(a.norm() * b.norm(), 1e-300);
}

std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost) {
  // Classic O(n^3) potentials formulation, 1-indexed internally.
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) assignment[p[j] - 1] = j - 1;
  return assignment;
}

MultisetMatch match_multisets(std::span<const cplx> observed, std::span<const cplx> expected) {
  MultisetMatch out;
  const auto n = static_cast<Eigen::Index>(observed.size());
  if (observed.size() != expected.size()) {
    out.max_relative_error = std::numeric_limits<double>::infinity();
    return out;
  }
  Eigen::MatrixXd cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      cost(i, j) = std::abs(observed[i] - expected[j]) / std::max(std::abs(expected[j]), 1e-300);
  out.assignment = min_cost_assignment(cost);
  for (Eigen::Index i = 0; i < n; ++i)
    out.max_relative_error = std::max(out.max_relative_error, cost(i, out.assignment[i]));
  return out;
}

void sort_lex(std::vector<cplx>& values) {
  std::sort(values.begin(), values.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

}  // namespace qcd::linalg
