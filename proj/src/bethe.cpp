#include "qcd/bethe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qcd/linalg.hpp"
#include "qcd/rng.hpp"

namespace qcd::bethe {

namespace {

constexpr double kSingular = 1e-14;

cplx checked_log_sinh(cplx z) {
  const cplx s = std::sinh(z);
  if (std::abs(s) <= kSingular) {
    std::ostringstream os;
    os << "vanishing sinh factor at argument " << z;
    throw SingularConfiguration(os.str());
  }
  return std::log(s);
}

cplx wrap_2pi(cplx z) {
  double im = std::remainder(z.imag(), 2.0 * kPi);
  if (im <= -kPi) im += 2.0 * kPi;
  return {z.real(), im};
}

// Root coordinates u_a = base_a + delta_a. An anchored root has
// base_a = x_{k_a} - eta and its differences to the inhomogeneities are
// formed symbolically, so sinh(u_a - x_{k_a} + eta) is evaluated as
// sinh(delta_a) without cancellation. Unanchored roots store u_a in delta.
struct RootCoords {
  std::vector<int> anchor;
  std::vector<cplx> delta;

  static RootCoords plain(std::vector<cplx> u) {
    RootCoords rc;
    rc.anchor.assign(u.size(), -1);
    rc.delta = std::move(u);
    return rc;
  }

  std::size_t size() const { return delta.size(); }

  cplx root(const ChainParams& p, std::size_t a) const {
    return anchor[a] < 0 ? delta[a] : (p.inhom[anchor[a]] - p.eta) + delta[a];
  }

  std::vector<cplx> roots(const ChainParams& p) const {
    std::vector<cplx> out(size());
    for (std::size_t a = 0; a < size(); ++a) out[a] = root(p, a);
    return out;
  }

  // u_a - x_k (+ eta when plus_eta).
  cplx minus_site(const ChainParams& p, std::size_t a, int k, bool plus_eta) const {
    if (anchor[a] < 0) return delta[a] - p.inhom[k] + (plus_eta ? p.eta : cplx{0.0});
    const cplx base = p.inhom[anchor[a]] - p.inhom[k];
    return (plus_eta ? base : base - p.eta) + delta[a];
  }

  cplx minus_root(const ChainParams& p, std::size_t a, std::size_t b) const {
    if (anchor[a] >= 0 && anchor[b] >= 0)
      return (p.inhom[anchor[a]] - p.inhom[anchor[b]]) + (delta[a] - delta[b]);
    return root(p, a) - root(p, b);
  }
};

std::vector<cplx> defect_coords(const RootCoords& rc, const ChainParams& p, cplx two_lh) {
  const cplx eta = p.eta;
  std::vector<cplx> out;
  out.reserve(rc.size());
  for (std::size_t a = 0; a < rc.size(); ++a) {
    cplx f = two_lh;
    for (int k = 0; k < p.L; ++k)
      f += checked_log_sinh(rc.minus_site(p, a, k, true)) - checked_log_sinh(rc.minus_site(p, a, k, false));
    for (std::size_t b = 0; b < rc.size(); ++b) {
      if (b == a) continue;
      const cplx d = rc.minus_root(p, a, b);
      f -= checked_log_sinh(d + eta) - checked_log_sinh(d - eta);
    }
    out.push_back(wrap_2pi(f));
  }
  return out;
}

CMatrix jacobian_coords(const RootCoords& rc, const ChainParams& p) {
  const cplx eta = p.eta;
  const auto m = static_cast<Eigen::Index>(rc.size());
  CMatrix jac = CMatrix::Zero(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    cplx diag{0.0};
    for (int k = 0; k < p.L; ++k) diag += coth(rc.minus_site(p, a, k, true)) - coth(rc.minus_site(p, a, k, false));
    for (Eigen::Index b = 0; b < m; ++b) {
      if (b == a) continue;
      const cplx d = rc.minus_root(p, a, b);
      const cplx w = coth(d + eta) - coth(d - eta);
      diag -= w;
      jac(a, b) = w;
    }
    jac(a, a) = diag;
  }
  return jac;
}

double max_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const cplx z : v) m = std::max(m, std::abs(z));
  return m;
}

bool roots_distinct(const std::vector<cplx>& roots, double tol) {
  for (std::size_t a = 0; a < roots.size(); ++a)
    for (std::size_t b = a + 1; b < roots.size(); ++b)
      if (std::abs(std::sinh(roots[a] - roots[b])) <= tol) return false;
  return true;
}

// Damped Newton on the defect at the given twist exponent. Returns the final
// residual; rc is updated in place. Throws NoConvergence.
double newton_core(const ChainParams& p, cplx two_lh, RootCoords& rc, int max_iterations, double target_tol) {
  const auto m = rc.size();
  std::vector<cplx> f = defect_coords(rc, p, two_lh);
  double res = max_abs(f);
  for (int it = 0; it < max_iterations && res > 1e-15; ++it) {
    const CVector step = jacobian_coords(rc, p).partialPivLu().solve(-to_eigen(f));
    if (!step.allFinite()) throw NoConvergence("singular Jacobian");
    double lambda = 1.0;
    bool improved = false;
    for (int damp = 0; damp < 12 && !improved; ++damp, lambda *= 0.5) {
      RootCoords trial = rc;
      for (std::size_t a = 0; a < m; ++a) trial.delta[a] += lambda * step(static_cast<Eigen::Index>(a));
      try {
        std::vector<cplx> ft = defect_coords(trial, p, two_lh);
        const double rt = max_abs(ft);
        if (rt < res) {
          rc = std::move(trial);
          f = std::move(ft);
          res = rt;
          improved = true;
        }
      } catch (const SingularConfiguration&) {
      }
    }
    for (std::size_t a = 0; a < m; ++a) {
      const cplx u = rc.root(p, a);
      if (!std::isfinite(u.real()) || !std::isfinite(u.imag()) || std::abs(u.real()) > 60.0)
        throw NoConvergence("root escaped to infinity");
    }
    if (!improved) break;
  }
  if (!(res <= target_tol)) throw NoConvergence("residual above tolerance");
  return res;
}

// Smallest distance from any root to another root or to a pole/zero of the
// Bethe equation. Sets the length scale for path tracking.
double local_separation(const RootCoords& rc, const ChainParams& p) {
  double sep = 0.1;
  for (std::size_t a = 0; a < rc.size(); ++a) {
    for (std::size_t b = a + 1; b < rc.size(); ++b) {
      const cplx d = rc.minus_root(p, a, b);
      sep = std::min({sep, std::abs(reduce_mod_ipi(d)), std::abs(reduce_mod_ipi(d - p.eta)),
                      std::abs(reduce_mod_ipi(d + p.eta))});
    }
    for (int k = 0; k < p.L; ++k)
      sep = std::min({sep, std::abs(reduce_mod_ipi(rc.minus_site(p, a, k, false))),
                      std::abs(reduce_mod_ipi(rc.minus_site(p, a, k, true)))});
  }
  return std::max(sep, 1e-9);
}

// Follows one solution from the large-twist limit, where the roots sit just
// off x_k - eta for the chosen sites, to the target twist. The path
// two_lh(s) = target + (1 - s) offset is a straight line in the complex
// plane with a non-real offset so it generically misses branch points.
RootCoords continue_from_large_twist(const ChainParams& p, const std::vector<int>& sites, cplx offset) {
  const cplx eta = p.eta;
  const cplx target = 2.0 * double(p.L) * p.h;
  const auto m = sites.size();

  RootCoords rc;
  rc.anchor = sites;
  rc.delta.assign(m, cplx{0.0});
  // First-order estimate: exp(c0) sinh(d)/sinh(d - eta) prod_{k != k_a} f = rhs.
  const cplx c0 = target + offset;
  std::vector<cplx> first(m);
  for (std::size_t a = 0; a < m; ++a) {
    cplx rhs{1.0};
    for (std::size_t b = 0; b < m; ++b) {
      if (b == a) continue;
      const cplx d = rc.minus_root(p, a, b);
      rhs *= sinh_ratio(d + eta, d - eta);
    }
    cplx others{1.0};
    for (int k = 0; k < p.L; ++k)
      if (k != sites[a]) others *= sinh_ratio(rc.minus_site(p, a, k, true), rc.minus_site(p, a, k, false));
    first[a] = rhs * std::sinh(-eta) / (std::exp(c0) * others);
  }
  rc.delta = first;
  newton_core(p, c0, rc, 40, 1e-11);

  // Secant predictor, Newton corrector; a step is accepted only if the
  // corrector stays within a fraction of the local separation.
  double s = 0.0;
  double ds = 0.02;
  std::vector<cplx> velocity(m, cplx{0.0});
  int steps = 0;
  while (s < 1.0) {
    if (++steps > 4000) throw NoConvergence("twist continuation exceeded step budget");
    const double s_next = std::min(1.0, s + ds);
    const double step = s_next - s;
    RootCoords trial = rc;
    for (std::size_t a = 0; a < m; ++a) trial.delta[a] += step * velocity[a];
    const std::vector<cplx> predicted = trial.delta;
    bool ok = false;
    try {
      newton_core(p, target + (1.0 - s_next) * offset, trial, 6, 1e-11);
      double correction = 0.0, moved = 0.0;
      for (std::size_t a = 0; a < m; ++a) {
        correction = std::max(correction, std::abs(trial.delta[a] - predicted[a]));
        moved = std::max(moved, std::abs(trial.delta[a] - rc.delta[a]));
      }
      const double sep = local_separation(rc, p);
      ok = correction < 0.1 * sep && moved < 2.0 * sep + 0.05;
    } catch (const Error&) {
    }
    if (ok) {
      for (std::size_t a = 0; a < m; ++a) velocity[a] = (trial.delta[a] - rc.delta[a]) / step;
      rc = std::move(trial);
      s = s_next;
      ds = std::min(0.1, ds * 1.5);
    } else {
      ds *= 0.5;
      if (ds < 1e-8) throw NoConvergence("twist continuation step underflow");
    }
  }
  return rc;
}

void next_combination(std::vector<int>& comb, int n, bool& done) {
  const int k = static_cast<int>(comb.size());
  int i = k - 1;
  while (i >= 0 && comb[i] == n - k + i) --i;
  if (i < 0) {
    done = true;
    return;
  }
  ++comb[i];
  for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
}

// Final polish at the target twist, in whatever coordinates the caller had.
BetheRootSet finish(const ChainParams& p, RootCoords rc, const SolveOptions& options) {
  newton_core(p, 2.0 * double(p.L) * p.h, rc, options.max_iterations, options.accept_tol);
  std::vector<cplx> u = rc.roots(p);
  if (!roots_distinct(u, options.distinct_tol)) throw SingularConfiguration("coinciding roots");
  canonicalize(u);
  BetheRootSet out{static_cast<int>(u.size()), std::move(u), 0.0, p.hash()};
  out.residual = max_abs(bae_defect(out.roots, p));
  if (!(out.residual <= options.accept_tol)) throw NoConvergence("residual above tolerance in root coordinates");
  return out;
}

}  // namespace

cplx reduce_mod_ipi(cplx z) {
  double im = std::remainder(z.imag(), kPi);  // [-pi/2, pi/2]
  if (im <= -kPi / 2) im += kPi;
  return {z.real(), im};
}

void canonicalize(std::vector<cplx>& roots) {
  for (cplx& u : roots) u = reduce_mod_ipi(u);
  linalg::sort_lex(roots);
}

double root_set_distance(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  const auto n = static_cast<Eigen::Index>(a.size());
  if (n == 0) return 0.0;
  Eigen::MatrixXd cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) cost(i, j) = std::abs(reduce_mod_ipi(a[i] - b[j]));
  const auto perm = linalg::min_cost_assignment(cost);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) worst = std::max(worst, cost(i, perm[i]));
  return worst;
}

std::vector<cplx> bae_defect(std::span<const cplx> roots, const ChainParams& params) {
  return defect_coords(RootCoords::plain({roots.begin(), roots.end()}), params, 2.0 * double(params.L) * params.h);
}

CMatrix bae_jacobian(std::span<const cplx> roots, const ChainParams& params) {
  return jacobian_coords(RootCoords::plain({roots.begin(), roots.end()}), params);
}

BetheRootSet newton_polish(const ChainParams& params, std::vector<cplx> start, const SolveOptions& options) {
  if (start.empty()) return {0, {}, 0.0, params.hash()};
  return finish(params, RootCoords::plain(std::move(start)), options);
}

std::vector<BetheRootSet> solve_bae(const ChainParams& params, int M2, std::uint64_t seed, int n_starts,
                                    const SolveOptions& options, SolveStats* stats) {
  params.validate();
  if (M2 < 0 || M2 > params.L) throw ConfigError("solve_bae requires 0 <= M2 <= L");
  SolveStats local;
  std::vector<BetheRootSet> found;
  if (M2 == 0) {
    found.push_back({0, {}, 0.0, params.hash()});
    local.starts = local.converged = 1;
    if (stats) *stats = local;
    return found;
  }

  auto accept = [&](BetheRootSet sol) {
    ++local.converged;
    for (const auto& other : found) {
      if (root_set_distance(sol.roots, other.roots) <= options.dedup_tol) {
        ++local.duplicates;
        return false;
      }
    }
    found.push_back(std::move(sol));
    return true;
  };

  // Continuation family: one path per choice of M2 sites. A path that fails
  // or lands on an already known solution is retried along another offset.
  static constexpr cplx kOffsets[] = {{10.0, 2.3}, {16.0, -3.1}, {24.0, 1.7}, {8.0, -6.0}, {12.0, 9.0}};
  std::vector<int> comb(static_cast<std::size_t>(M2));
  for (int a = 0; a < M2; ++a) comb[a] = a;
  for (bool done = false; !done; next_combination(comb, params.L, done)) {
    ++local.starts;
    bool tracked = false;
    for (const cplx offset : kOffsets) {
      try {
        if (accept(finish(params, continue_from_large_twist(params, comb, offset), options))) {
          tracked = true;
          break;
        }
      } catch (const Error&) {
      }
    }
    if (!tracked) ++local.failed;
  }

  // Multi-start family: jittered points near x_k and x_k - eta/2, and free
  // random points in a box around the inhomogeneities.
  std::vector<cplx> pool;
  double re_lo = params.inhom[0].real(), re_hi = re_lo;
  for (const cplx xk : params.inhom) {
    pool.push_back(xk);
    pool.push_back(xk - 0.5 * params.eta);
    re_lo = std::min(re_lo, xk.real());
    re_hi = std::max(re_hi, xk.real());
  }
  Rng rng(seed);
  for (int s = 0; s < n_starts; ++s) {
    ++local.starts;
    const bool structured = (s % 3) != 2;
    std::vector<std::size_t> order(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.next_u64() % i]);
    std::vector<cplx> start;
    for (int a = 0; a < M2; ++a) {
      if (structured && static_cast<std::size_t>(a) < order.size()) {
        start.push_back(pool[order[a]] + rng.complex_in_box(-0.3, 0.3, -0.3, 0.3));
      } else {
        start.push_back(rng.complex_in_box(re_lo - 1.5, re_hi + 1.5, -kPi / 2, kPi / 2));
      }
    }
    try {
      accept(newton_polish(params, std::move(start), options));
    } catch (const Error&) {
      ++local.failed;
    }
  }

  std::sort(found.begin(), found.end(), [](const BetheRootSet& a, const BetheRootSet& b) {
    return std::lexicographical_compare(a.roots.begin(), a.roots.end(), b.roots.begin(), b.roots.end(),
                                        [](cplx p, cplx q) {
                                          if (p.real() != q.real()) return p.real() < q.real();
                                          return p.imag() < q.imag();
                                        });
  });
  if (stats) *stats = local;
  return found;
}

cplx eigenvalue_t(std::span<const cplx> roots, const ChainParams& params, cplx x) {
  const cplx eta = params.eta;
  for (const cplx xk : params.inhom)
    if (std::abs(std::sinh(x - xk)) <= kSingular) throw SingularSpectralPoint("x at an inhomogeneity");
  for (const cplx u : roots)
    if (std::abs(std::sinh(x - u)) <= kSingular) throw SingularSpectralPoint("x at a Bethe root");
  const cplx lhc = double(params.L) * params.h;
  cplx first = std::exp(lhc);
  for (const cplx xk : params.inhom) first *= pair_factor(x - xk, eta);
  cplx second = std::exp(-lhc);
  for (const cplx u : roots) {
    first *= sinh_ratio(x - u - eta, x - u);
    second *= pair_factor(x - u, eta);
  }
  return first + second;
}

cplx eigenvalue_h(std::span<const cplx> roots, const ChainParams& params, int j) {
  const cplx eta = params.eta;
  const cplx xj = params.inhom.at(static_cast<std::size_t>(j));
  cplx out = std::exp(double(params.L) * params.h);
  for (int k = 0; k < params.L; ++k)
    if (k != j) out *= pair_factor(xj - params.inhom[k], eta);
  for (const cplx u : roots) {
    const cplx den = std::sinh(xj - u);
    if (std::abs(den) <= kSingular) throw SingularConfiguration("Bethe root at an inhomogeneity");
    out *= std::sinh(xj - u - eta) / den;
  }
  return out;
}

cplx eigenvalue_g(std::span<const cplx> roots, const ChainParams& params, int j) {
  const cplx eta = params.eta;
  const cplx xj = params.inhom.at(static_cast<std::size_t>(j));
  cplx out = std::exp(-double(params.L) * params.h);
  for (const cplx u : roots) {
    const cplx den = std::sinh(xj - u - eta);
    if (std::abs(den) <= kSingular) throw SingularConfiguration("Bethe root at x_j - eta");
    out *= std::sinh(xj - u) / den;
  }
  return out;
}

std::vector<cplx> eigenvalues_h(std::span<const cplx> roots, const ChainParams& params) {
  std::vector<cplx> out;
  for (int j = 0; j < params.L; ++j) out.push_back(eigenvalue_h(roots, params, j));
  return out;
}

std::vector<cplx> eigenvalues_g(std::span<const cplx> roots, const ChainParams& params) {
  std::vector<cplx> out;
  for (int j = 0; j < params.L; ++j) out.push_back(eigenvalue_g(roots, params, j));
  return out;
}

}  // namespace qcd::bethe
