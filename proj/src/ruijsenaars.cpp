#include "qcd/ruijsenaars.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <sstream>

namespace qcd::rs {

namespace {

void require_sizes(std::span<const cplx> x, std::span<const cplx> xdot) {
  if (x.size() != xdot.size()) throw ConfigError("coordinate and velocity counts differ");
}

void require_position(std::span<const cplx> x, cplx eta) {
  require_general_position({x.begin(), x.end()}, eta, kGeneralPositionTol, "particle coordinates");
}

// prod_{k != i} sinh(x_i - x_k + eta) / sinh(x_i - x_k).
std::vector<cplx> velocity_factors(std::span<const cplx> x, cplx eta) {
  const auto n = x.size();
  std::vector<cplx> f(n, cplx{1.0});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (k != i) f[i] *= pair_factor(x[i] - x[k], eta);
  return f;
}

CVector diag_exp(std::span<const cplx> x, double sign) {
  CVector d(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) d(static_cast<Eigen::Index>(i)) = std::exp(sign * x[i]);
  return d;
}

}  // namespace

void RSState::validate(double tol) const {
  if (x.empty()) throw ConfigError("RS state needs at least one particle");
  if (x.size() != p.size()) throw ConfigError("RS state coordinate and momentum counts differ");
  require_general_position(x, eta, tol, "particle coordinates");
}

cplx hamiltonian(const RSState& state) {
  state.validate();
  const auto f = velocity_factors(state.x, state.eta);
  cplx h{0.0};
  for (std::size_t i = 0; i < f.size(); ++i) h += std::exp(state.eta * state.p[i]) * f[i];
  return h;
}

namespace {

// Hamilton vector field without the general-position check; out has room
// for 2n entries (velocities then forces).
void hamilton_field(const cplx* x, const cplx* p, std::size_t n, cplx eta, cplx* out) {
  cplx* v = out;
  cplx* f = out + n;
  for (std::size_t i = 0; i < n; ++i) {
    cplx w = std::exp(eta * p[i]);
    for (std::size_t k = 0; k < n; ++k)
      if (k != i) w *= pair_factor(x[i] - x[k], eta);
    v[i] = w;  // e^{eta p_i} F_i for now
    f[i] = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k) {
      const cplx z = x[j] - x[k];
      // d log f(z)/dz at z and -z
      const cplx gz = coth(z + eta) - coth(z);
      const cplx gmz = coth(eta - z) + coth(z);
      const cplx c = v[j] * gz - v[k] * gmz;
      f[j] -= c;
      f[k] += c;
    }
  for (std::size_t i = 0; i < n; ++i) v[i] *= eta;
}

}  // namespace

std::vector<cplx> velocities(const RSState& state) {
  state.validate();
  auto f = velocity_factors(state.x, state.eta);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] *= state.eta * std::exp(state.eta * state.p[i]);
  return f;
}

std::vector<cplx> forces(const RSState& state) {
  state.validate();
  const auto n = state.x.size();
  std::vector<cplx> field(2 * n);
  hamilton_field(state.x.data(), state.p.data(), n, state.eta, field.data());
  return {field.begin() + static_cast<std::ptrdiff_t>(n), field.end()};
}

CMatrix cauchy_matrix(std::span<const cplx> x, cplx eta) {
  const auto n = static_cast<Eigen::Index>(x.size());
  CMatrix c(n, n);
  const cplx s = std::sinh(eta);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) c(i, j) = s / std::sinh(x[i] - x[j] - eta);
  return c;
}

CMatrix lax_from_velocities(std::span<const cplx> x, std::span<const cplx> xdot, cplx eta) {
  require_sizes(x, xdot);
  require_position(x, eta);
  CMatrix l = cauchy_matrix(x, eta);
  for (Eigen::Index i = 0; i < l.rows(); ++i) l.row(i) *= xdot[i];
  return l;
}

CMatrix lax_from_momenta(const RSState& state) {
  state.validate();
  const cplx eta = state.eta;
  const auto f = velocity_factors(state.x, eta);
  const auto n = static_cast<Eigen::Index>(state.x.size());
  CMatrix l(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const cplx row = eta * std::sinh(eta) * std::exp(eta * state.p[i]) * f[i];
    for (Eigen::Index j = 0; j < n; ++j) l(i, j) = row / std::sinh(state.x[i] - state.x[j] - eta);
  }
  return l;
}

CMatrix a_matrix(std::span<const cplx> x, std::span<const cplx> xdot, cplx eta) {
  require_sizes(x, xdot);
  require_position(x, eta);
  const auto n = static_cast<Eigen::Index>(x.size());
  CMatrix a(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    cplx d{0.0};
    for (Eigen::Index l = 0; l < n; ++l) {
      if (l != j) d += xdot[l] * coth(x[j] - x[l]);
      d -= xdot[l] * coth(x[j] - x[l] + eta);
    }
    for (Eigen::Index k = 0; k < n; ++k) a(j, k) = (j == k) ? d : xdot[j] / std::sinh(x[j] - x[k]);
  }
  return a;
}

CauchyDeterminant cauchy_det(std::span<const cplx> x, cplx eta, std::span<const int> subset) {
  std::vector<cplx> q;
  for (const int i : subset) q.push_back(x[static_cast<std::size_t>(i)]);
  require_position(q, eta);
  CauchyDeterminant out;
  out.direct = q.empty() ? cplx{1.0} : cauchy_matrix(q, eta).partialPivLu().determinant();
  cplx closed = (q.size() % 2 == 0) ? cplx{1.0} : cplx{-1.0};
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = i + 1; j < q.size(); ++j) closed *= cauchy_factor(q[i] - q[j], eta);
  out.closed_form = closed;
  out.relative_gap = std::abs(out.direct - closed) / std::max(std::abs(closed), 1e-300);
  return out;
}

std::vector<cplx> integrals_e(std::span<const cplx> x, std::span<const cplx> xdot, cplx eta) {
  require_sizes(x, xdot);
  require_position(x, eta);
  const int n = static_cast<int>(x.size());
  if (n > kMaxSubsetParticles) throw ConfigError("subset enumeration is capped at 12 particles");
  std::vector<cplx> e(static_cast<std::size_t>(n) + 1, cplx{0.0});
  e[0] = 1.0;
  const unsigned full = 1u << n;
  for (unsigned mask = 1; mask < full; ++mask) {
    cplx term{1.0};
    for (int a = 0; a < n; ++a) {
      if (!(mask >> a & 1u)) continue;
      term *= xdot[a];
      for (int b = a + 1; b < n; ++b)
        if (mask >> b & 1u) term *= cauchy_factor(x[a] - x[b], eta);
    }
    e[static_cast<std::size_t>(std::popcount(mask))] += term;
  }
  for (int k = 1; k <= n; ++k)
    if (k % 2) e[k] = -e[k];
  return e;
}

linalg::Poly char_poly_via_en(std::span<const cplx> x, std::span<const cplx> xdot, cplx eta) {
  auto e = integrals_e(x, xdot, eta);
  for (std::size_t k = 1; k < e.size(); k += 2) e[k] = -e[k];
  return e;
}

std::vector<cplx> trace_powers(const CMatrix& lax, int kmax) {
  std::vector<cplx> out;
  CMatrix power = CMatrix::Identity(lax.rows(), lax.cols());
  for (int k = 0; k <= kmax; ++k) {
    out.push_back(power.trace());
    power = power * lax;
  }
  return out;
}

double newton_identity_residual(std::span<const cplx> e, std::span<const cplx> h) {
  const auto n = e.size() - 1;
  if (h.size() < n + 1) throw ConfigError("need H_0..H_L for the Newton identity");
  cplx sum{0.0};
  double scale = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const cplx term = ((k % 2) ? -1.0 : 1.0) * e[n - k] * h[k];
    sum += term;
    scale = std::max(scale, std::abs(term));
  }
  return std::abs(sum) / std::max(scale, 1e-300);
}

CMatrix d_matrix(std::span<const cplx> q, cplx xi) {
  const auto n = static_cast<Eigen::Index>(q.size());
  CMatrix d = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    cplx v{1.0};
    for (Eigen::Index k = 0; k < n; ++k)
      if (k != i) v *= std::sinh(q[i] - q[k] + xi);
    d(i, i) = v;
  }
  return d;
}

CMatrix s_matrix(int K, cplx eta) {
  if (K < 0) throw ConfigError("matrix size must be non-negative");
  CMatrix s = CMatrix::Zero(K, K);
  for (int i = 1; i <= K; ++i) s(i - 1, i - 1) = std::exp(-double(2 * i - K - 1) * eta);
  return s;
}

CMatrix vandermonde(std::span<const cplx> q) {
  const auto n = static_cast<Eigen::Index>(q.size());
  CMatrix v(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 1; j <= n; ++j) v(i, j - 1) = std::exp(double(2 * j - n - 1) * q[i]);
  return v;
}

CMatrix factorized_lax(const RSState& state) {
  state.validate();
  const cplx eta = state.eta;
  const auto n = static_cast<Eigen::Index>(state.x.size());
  double tmax = 0.0;
  std::vector<cplx> t;
  for (const cplx xi : state.x) {
    t.push_back(std::exp(2.0 * xi));
    tmax = std::max(tmax, std::abs(t.back()));
  }
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j)
      if (std::abs(t[i] - t[j]) <= 1e-13 * tmax) throw SingularVandermonde("coinciding e^{2x_i}");
  // The Vandermonde sandwich loses about log10(cond V) digits; all factors
  // are formed and multiplied in extended precision.
  using CL = std::complex<long double>;
  using ML = Eigen::Matrix<CL, Eigen::Dynamic, Eigen::Dynamic>;
  const CL eta_l(eta);
  ML vt(n, n), d = ML::Zero(n, n), d_inv = ML::Zero(n, n), s_inv = ML::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const CL xi(state.x[i]);
    CL di{1.0L};
    for (Eigen::Index k = 0; k < n; ++k) {
      vt(k, i) = std::exp(static_cast<long double>(2 * k - n + 1) * xi);
      if (k != i) di *= std::sinh(xi - CL(state.x[k]) + eta_l);
    }
    d(i, i) = std::exp(eta_l * CL(state.p[i])) * di;
    d_inv(i, i) = 1.0L / di;
    s_inv(i, i) = std::exp(static_cast<long double>(2 * i - n + 1) * eta_l);
  }
  const ML middle = vt.partialPivLu().solve(s_inv * vt);
  const ML out = -eta_l * d * middle * d_inv;
  return out.cast<cplx>();
}

double xle_relation_check(const RSState& state) {
  const CMatrix l = lax_from_momenta(state);
  const auto xdot = velocities(state);
  const cplx eta = state.eta;
  const CVector ex = diag_exp(state.x, 1.0);
  const CVector emx = diag_exp(state.x, -1.0);
  const auto n = l.rows();
  CMatrix lhs = std::exp(-eta) * ex.asDiagonal() * l * emx.asDiagonal();
  lhs -= std::exp(eta) * emx.asDiagonal() * l * ex.asDiagonal();
  CMatrix rhs(n, n);
  for (Eigen::Index i = 0; i < n; ++i) rhs.row(i).setConstant(2.0 * std::sinh(eta) * xdot[i]);
  return (lhs - rhs).norm() / std::max(l.norm(), 1e-300);
}

std::vector<cplx> acceleration(std::span<const cplx> x, std::span<const cplx> xdot, cplx eta) {
  require_sizes(x, xdot);
  const auto n = x.size();
  const cplx s2 = std::sinh(eta) * std::sinh(eta);
  std::vector<cplx> out(n, cplx{0.0});
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      const cplx z = x[j] - x[k];
      out[j] -= 2.0 * xdot[j] * xdot[k] * s2 * std::cosh(z) /
                (std::sinh(z + eta) * std::sinh(z) * std::sinh(z - eta));
    }
  return out;
}

std::vector<cplx> acceleration_eta_infinite(std::span<const cplx> x, std::span<const cplx> xdot) {
  require_sizes(x, xdot);
  std::vector<cplx> out(x.size(), cplx{0.0});
  for (std::size_t j = 0; j < x.size(); ++j)
    for (std::size_t k = 0; k < x.size(); ++k)
      if (k != j) out[j] += 2.0 * xdot[j] * xdot[k] * coth(x[j] - x[k]);
  return out;
}

std::vector<cplx> acceleration_eta_half_ipi(std::span<const cplx> x, std::span<const cplx> xdot) {
  require_sizes(x, xdot);
  std::vector<cplx> out(x.size(), cplx{0.0});
  for (std::size_t j = 0; j < x.size(); ++j)
    for (std::size_t k = 0; k < x.size(); ++k)
      if (k != j) out[j] += 4.0 * xdot[j] * xdot[k] / std::sinh(2.0 * (x[j] - x[k]));
  return out;
}

namespace {

using State = Eigen::VectorXcd;  // (x_1..x_L, p_1..p_L)

constexpr double kStallCollisionTol = 1e-2;

RSState unpack(const State& y, cplx eta) {
  const auto n = y.size() / 2;
  RSState s;
  s.eta = eta;
  for (Eigen::Index i = 0; i < n; ++i) {
    s.x.push_back(y(i));
    s.p.push_back(y(n + i));
  }
  return s;
}

void check_collision(const RSState& s, double tol, double t) {
  for (std::size_t i = 0; i < s.x.size(); ++i)
    for (std::size_t j = i + 1; j < s.x.size(); ++j)
      if (std::abs(std::sinh(s.x[i] - s.x[j])) < tol) {
        std::ostringstream os;
        os << "particles " << i + 1 << " and " << j + 1 << " collide at t = " << t;
        throw CollisionDetected(os.str());
      }
}

// Stalled integration: names the pair sitting on a pole of the flow,
// x_i - x_j = 0 or +-eta.
void check_stall(const RSState& s, double tol, double t) {
  check_collision(s, tol, t);
  for (std::size_t i = 0; i < s.x.size(); ++i)
    for (std::size_t j = 0; j < s.x.size(); ++j)
      if (i != j && std::abs(std::sinh(s.x[i] - s.x[j] + s.eta)) < tol) {
        std::ostringstream os;
        os << "particles " << i + 1 << " and " << j + 1 << " reach x_i - x_j = -eta at t = " << t;
        throw CollisionDetected(os.str());
      }
}

State rhs(const State& y, cplx eta) {
  const auto n = static_cast<std::size_t>(y.size() / 2);
  State out(y.size());
  hamilton_field(y.data(), y.data() + n, n, eta, out.data());
  return out;
}

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

// Seven-point central difference, error O(h^6).
constexpr std::array<double, 3> kStencil = {45.0 / 60, -9.0 / 60, 1.0 / 60};
constexpr std::size_t kHalfWidth = kStencil.size();

std::vector<cplx> central_derivative(const std::vector<std::vector<cplx>>& samples, std::size_t i, double h) {
  std::vector<cplx> d(samples[i].size(), cplx{0.0});
  for (std::size_t k = 0; k < d.size(); ++k) {
    for (std::size_t m = 1; m <= kHalfWidth; ++m)
      d[k] += kStencil[m - 1] * (samples[i + m][k] - samples[i - m][k]);
    d[k] /= h;
  }
  return d;
}

CMatrix central_derivative(const std::vector<CMatrix>& samples, std::size_t i, double h) {
  CMatrix d = CMatrix::Zero(samples[i].rows(), samples[i].cols());
  for (std::size_t m = 1; m <= kHalfWidth; ++m) d += kStencil[m - 1] * (samples[i + m] - samples[i - m]);
  return d / h;
}

double sample_spacing(const Trajectory& tr) {
  if (tr.points.size() < 2) return 0.0;
  return tr.points[1].t - tr.points[0].t;
}

// Samples on the uniform grid; a shortened final interval is dropped.
std::size_t uniform_count(const Trajectory& tr) {
  const auto n = tr.points.size();
  if (n < 3) return n;
  const double h = sample_spacing(tr);
  const double last = tr.points[n - 1].t - tr.points[n - 2].t;
  return std::abs(last - h) > 1e-9 * h ? n - 1 : n;
}

}  // namespace

Trajectory evolve(const RSState& initial, double t_final, const EvolveOptions& options) {
  initial.validate();
  if (!(t_final >= 0.0)) throw ConfigError("t_final must be non-negative");
  if (!(options.tol > 0.0) || !(options.dt_output > 0.0)) throw ConfigError("tolerances must be positive");
  const cplx eta = initial.eta;
  const auto n = static_cast<Eigen::Index>(initial.x.size());
  State y(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i) = initial.x[i];
    y(n + i) = initial.p[i];
  }

  Trajectory tr;
  auto record = [&](double t, const State& state) {
    RSState s = unpack(state, eta);
    auto v = velocities(s);
    tr.points.push_back({t, std::move(s), std::move(v)});
  };
  check_collision(initial, options.collision_tol, 0.0);
  record(0.0, y);

  const long n_out = std::lround(std::ceil(t_final / options.dt_output - 1e-9));
  double t = 0.0;
  double h = std::min(options.dt_output, 1e-3);
  State k1 = rhs(y, eta);
  for (long out = 1; out <= n_out; ++out) {
    const double t_next = std::min(t_final, double(out) * options.dt_output);
    while (t < t_next) {
      if (tr.steps_accepted + tr.steps_rejected >= options.max_steps)
        throw StepSizeUnderflow("step budget exhausted");
      const bool last = t + h >= t_next;
      const double step = last ? t_next - t : h;
      State y_new, k7;
      double err = 0.0;
      bool finite = true;
      try {
        const State k2 = rhs(y + step * (a21 * k1), eta);
        const State k3 = rhs(y + step * (a31 * k1 + a32 * k2), eta);
        const State k4 = rhs(y + step * (a41 * k1 + a42 * k2 + a43 * k3), eta);
        const State k5 = rhs(y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), eta);
        const State k6 = rhs(y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), eta);
        y_new = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = rhs(y_new, eta);
        const State e = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        for (Eigen::Index i = 0; i < e.size(); ++i) {
          const double sc = options.tol * (1.0 + std::max(std::abs(y(i)), std::abs(y_new(i))));
          err = std::max(err, std::abs(e(i)) / sc);
        }
        finite = y_new.allFinite() && std::isfinite(err);
      } catch (const Error&) {
        finite = false;
      }
      if (finite && err <= 1.0) {
        y = y_new;
        k1 = k7;
        t = last ? t_next : t + step;
        ++tr.steps_accepted;
        check_collision(unpack(y, eta), options.collision_tol, t);
        const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        if (!last) h = step * std::clamp(grow, 0.2, 5.0);
      } else {
        ++tr.steps_rejected;
        const double shrink = finite ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25;
        h = step * shrink;
      }
      if (h < options.min_step) {
        // A stalled step next to a coincidence is the approach to a collision.
        check_stall(unpack(y, eta), kStallCollisionTol, t);
        std::ostringstream os;
        os << "step size " << h << " below minimum at t = " << t;
        throw StepSizeUnderflow(os.str());
      }
    }
    record(t, y);
  }
  return tr;
}

double spectral_drift(const Trajectory& trajectory) {
  if (trajectory.points.empty()) return 0.0;
  auto spectrum = [](const TrajectoryPoint& pt) {
    return to_std(linalg::eigenvalues(lax_from_velocities(pt.state.x, pt.xdot, pt.state.eta)));
  };
  const auto ref = spectrum(trajectory.points.front());
  double worst = 0.0;
  for (const auto& pt : trajectory.points)
    worst = std::max(worst, linalg::match_multisets(spectrum(pt), ref).max_relative_error);
  return worst;
}

double integrals_drift(const Trajectory& trajectory) {
  if (trajectory.points.empty()) return 0.0;
  auto integrals = [](const TrajectoryPoint& pt) { return integrals_e(pt.state.x, pt.xdot, pt.state.eta); };
  const auto ref = integrals(trajectory.points.front());
  double worst = 0.0;
  for (const auto& pt : trajectory.points) {
    const auto e = integrals(pt);
    for (std::size_t k = 1; k < e.size(); ++k)
      worst = std::max(worst, std::abs(e[k] - ref[k]) / std::max(std::abs(ref[k]), 1.0));
  }
  return worst;
}

double second_order_residual(const Trajectory& trajectory, EquationOfMotion form) {
  const auto& pts = trajectory.points;
  const std::size_t count = uniform_count(trajectory);
  if (count < 2 * kHalfWidth + 1) return 0.0;
  const double h = sample_spacing(trajectory);
  std::vector<std::vector<cplx>> v;
  for (const auto& pt : pts) v.push_back(pt.xdot);
  double worst = 0.0;
  for (std::size_t i = kHalfWidth; i + kHalfWidth < count; ++i) {
    const auto xddot = central_derivative(v, i, h);
    const auto& s = pts[i].state;
    const auto expected = form == EquationOfMotion::General ? acceleration(s.x, pts[i].xdot, s.eta)
                                                            : acceleration_eta_half_ipi(s.x, pts[i].xdot);
    double scale = 1.0;
    for (const cplx a : expected) scale = std::max(scale, std::abs(a));
    for (std::size_t k = 0; k < xddot.size(); ++k)
      worst = std::max(worst, std::abs(xddot[k] - expected[k]) / scale);
  }
  return worst;
}

double lax_equation_residual(const Trajectory& trajectory) {
  const auto& pts = trajectory.points;
  const std::size_t count = uniform_count(trajectory);
  if (count < 2 * kHalfWidth + 1) return 0.0;
  const double h = sample_spacing(trajectory);
  std::vector<CMatrix> l;
  for (const auto& pt : pts) l.push_back(lax_from_velocities(pt.state.x, pt.xdot, pt.state.eta));
  double worst = 0.0;
  for (std::size_t i = kHalfWidth; i + kHalfWidth < count; ++i) {
    const CMatrix dl = central_derivative(l, i, h);
    const CMatrix a = a_matrix(pts[i].state.x, pts[i].xdot, pts[i].state.eta);
    const CMatrix comm = a * l[i] - l[i] * a;
    worst = std::max(worst, (dl - comm).norm() / std::max(l[i].norm(), 1e-300));
  }
  return worst;
}

}  // namespace qcd::rs
