#include "qcd/duality.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "qcd/linalg.hpp"
#include "qcd/rng.hpp"
#include "qcd/ruijsenaars.hpp"

namespace qcd::duality {

namespace {

std::vector<cplx> negated(const std::vector<cplx>& v) {
  std::vector<cplx> out;
  out.reserve(v.size());
  for (const cplx z : v) out.push_back(-z);
  return out;
}

void require_state_size(const ChainParams& chain, const std::vector<cplx>& H) {
  if (static_cast<int>(H.size()) != chain.L) throw ConfigError("H must have L entries");
}

// Weight of every subset: prod_{a<b in I} C(x_a - x_b).
std::vector<cplx> subset_weights(const ChainParams& chain) {
  const int n = chain.L;
  if (n > rs::kMaxSubsetParticles) throw ConfigError("subset enumeration is capped at 12 sites");
  std::vector<cplx> w(std::size_t{1} << n, cplx{1.0});
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    const int top = std::bit_width(mask) - 1;
    const unsigned rest = mask & ~(1u << top);
    cplx v = w[rest];
    for (int a = 0; a < top; ++a)
      if (rest >> a & 1u) v *= cauchy_factor(chain.inhom[a] - chain.inhom[top], chain.eta);
    w[mask] = v;
  }
  return w;
}

// sum |xi|^k, the natural size of a power sum.
double power_scale(const std::vector<cplx>& values, int k) {
  double s = 0.0;
  for (const cplx v : values) s += std::pow(std::abs(v), k);
  return std::max(s, 1e-300);
}

double h_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
  return d;
}

struct NewtonOutcome {
  bool converged = false;
  std::vector<cplx> H;
  double residual = 0.0;
};

NewtonOutcome newton_inverse(const ChainParams& chain, const std::vector<cplx>& e,
                             const std::vector<double>& scale, std::vector<cplx> H, const InverseSolveOptions& opt) {
  const int n = chain.L;
  auto residual_vector = [&](const std::vector<cplx>& h) {
    const auto en = integrals_from_h(chain, h);
    CVector f(n);
    for (int k = 1; k <= n; ++k) f(k - 1) = (en[k] - e[k]) / scale[k];
    return f;
  };
  CVector f = residual_vector(H);
  double norm = f.cwiseAbs().maxCoeff();
  for (int it = 0; it < opt.max_iterations; ++it) {
    if (!std::isfinite(norm)) break;
    if (norm <= 1e-14) break;
    CMatrix jac = integrals_jacobian(chain, H);
    for (int k = 0; k < n; ++k) jac.row(k) /= scale[k + 1];
    const Eigen::PartialPivLU<CMatrix> lu(jac);
    if (!std::isfinite(std::abs(lu.determinant())) || std::abs(lu.determinant()) == 0.0) break;
    const CVector step = lu.solve(-f);
    double t = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
      std::vector<cplx> trial = H;
      for (int i = 0; i < n; ++i) trial[i] += t * step(i);
      const CVector ft = residual_vector(trial);
      const double nt = ft.cwiseAbs().maxCoeff();
      if (std::isfinite(nt) && nt < norm) {
        H = std::move(trial);
        f = ft;
        norm = nt;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  NewtonOutcome out;
  out.H = std::move(H);
  out.residual = norm;
  out.converged = std::isfinite(norm) && norm <= opt.accept_tol;
  return out;
}

}  // namespace

StringSpectrum predicted_strings(int L, int M2, cplx h, cplx eta) {
  if (L < 1 || M2 < 0 || M2 > L) throw ConfigError("predicted_strings requires 0 <= M2 <= L");
  StringSpectrum s;
  s.M1 = L - M2;
  s.M2 = M2;
  s.h = h;
  s.eta = eta;
  const double l = static_cast<double>(L);
  for (int j = 0; j < s.M1; ++j) s.values.push_back(std::exp(l * h - double(s.M1 - 1) * eta + 2.0 * eta * double(j)));
  for (int j = 0; j < s.M2; ++j) s.values.push_back(std::exp(-l * h - double(s.M2 - 1) * eta + 2.0 * eta * double(j)));
  return s;
}

cplx predicted_integrals(int L, int M2, cplx h, cplx eta, int n) {
  if (n < 1) throw ConfigError("predicted_integrals requires n >= 1");
  const double nn = static_cast<double>(n);
  const double l = static_cast<double>(L);
  const cplx denom = std::sinh(eta * nn);
  return std::exp(l * h * nn) * std::sinh(double(L - M2) * eta * nn) / denom +
         std::exp(-l * h * nn) * std::sinh(double(M2) * eta * nn) / denom;
}

std::vector<cplx> predicted_elementary(int L, int M2, cplx h, cplx eta) {
  return linalg::elementary_symmetric(predicted_strings(L, M2, h, eta).values);
}

CMatrix lax_from_chain_state(const ChainParams& chain, const std::vector<cplx>& H) {
  chain.validate();
  require_state_size(chain, H);
  return rs::lax_from_velocities(chain.inhom, negated(H), chain.eta);
}

std::vector<cplx> integrals_from_h(const ChainParams& chain, const std::vector<cplx>& H) {
  require_state_size(chain, H);
  const auto w = subset_weights(chain);
  const int n = chain.L;
  std::vector<cplx> e(static_cast<std::size_t>(n) + 1, cplx{0.0});
  std::vector<cplx> prod(w.size(), cplx{1.0});
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    const int top = std::bit_width(mask) - 1;
    prod[mask] = prod[mask & ~(1u << top)] * H[top];
    e[std::popcount(mask)] += prod[mask] * w[mask];
  }
  e[0] = 1.0;
  return e;
}

CMatrix integrals_jacobian(const ChainParams& chain, const std::vector<cplx>& H) {
  require_state_size(chain, H);
  const auto w = subset_weights(chain);
  const int n = chain.L;
  CMatrix jac = CMatrix::Zero(n, n);
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    const int size = std::popcount(mask);
    for (int j = 0; j < n; ++j) {
      if (!(mask >> j & 1u)) continue;
      cplx others = w[mask];
      for (int i = 0; i < n; ++i)
        if (i != j && (mask >> i & 1u)) others *= H[i];
      jac(size - 1, j) += others;
    }
  }
  return jac;
}

DualityReport verify_duality(const ChainParams& chain) {
  chain.validate();
  return verify_duality(chain, spin_chain::joint_diagonalize(chain));
}

DualityReport verify_duality(const ChainParams& chain, const JointSpectrum& spectrum) {
  chain.validate();
  DualityReport report;
  report.params_hash = chain.hash();
  report.joint_residual = spectrum.max_residual();
  for (const auto& state : spectrum.states) {
    StateRecord rec;
    rec.sector_M2 = state.sector_M2;
    rec.H = state.H;
    const CMatrix lax = lax_from_chain_state(chain, state.H);
    rec.lax_eigenvalues = to_std(linalg::eigenvalues(lax));
    rec.matched_string = predicted_strings(chain.L, state.sector_M2, chain.h, chain.eta);
    rec.max_match_error = linalg::match_multisets(rec.lax_eigenvalues, rec.matched_string.values).max_relative_error;
    linalg::sort_lex(rec.lax_eigenvalues);
    const auto traces = rs::trace_powers(lax, chain.L);
    for (int k = 1; k <= chain.L; ++k) {
      const cplx expected = predicted_integrals(chain.L, state.sector_M2, chain.h, chain.eta, k);
      const double scale = std::max(std::abs(expected), power_scale(rec.matched_string.values, k));
      rec.power_sum_error = std::max(rec.power_sum_error, std::abs(traces[k] - expected) / scale);
    }
    if (!(rec.max_match_error <= kMatchFailedTol)) {
      std::ostringstream os;
      os << "state in sector M2=" << rec.sector_M2 << " misses its strings by " << rec.max_match_error;
      throw MatchFailed(os.str());
    }
    report.worst_error = std::max(report.worst_error, rec.max_match_error);
    report.worst_power_sum_error = std::max(report.worst_power_sum_error, rec.power_sum_error);
    report.states.push_back(std::move(rec));
  }
  report.n_states = static_cast<int>(report.states.size());
  return report;
}

std::vector<cplx> momenta_from_g(cplx eta, const std::vector<cplx>& G) {
  std::vector<cplx> p;
  for (const cplx g : G) {
    if (std::abs(g) == 0.0) throw ZeroGValue("G eigenvalue vanishes, momentum undefined");
    p.push_back(-std::log(-eta * g) / eta);
  }
  return p;
}

double verify_momentum_identification(const ChainParams& chain, const JointSpectrum& spectrum) {
  chain.validate();
  double worst = 0.0;
  for (const auto& state : spectrum.states) {
    const auto p = momenta_from_g(chain.eta, state.G);
    for (int i = 0; i < chain.L; ++i) {
      const cplx velocity = chain.eta * std::exp(chain.eta * p[i]) * spin_chain::gh_scalar(chain, i);
      const double scale = std::max(std::abs(state.H[i]), 1e-300);
      worst = std::max(worst, std::abs(velocity + state.H[i]) / scale);
    }
  }
  return worst;
}

double inverse_residual(const ChainParams& chain, int M2, const std::vector<cplx>& H) {
  const auto strings = predicted_strings(chain.L, M2, chain.h, chain.eta).values;
  const auto e = linalg::elementary_symmetric(strings);
  const auto scale = linalg::elementary_symmetric_abs(strings);
  const auto en = integrals_from_h(chain, H);
  double worst = 0.0;
  for (int k = 1; k <= chain.L; ++k) worst = std::max(worst, std::abs(en[k] - e[k]) / scale[k]);
  return worst;
}

InverseSolveResult inverse_spectral_solve(const ChainParams& chain, int M2, std::uint64_t seed,
                                          const InverseSolveOptions& options) {
  chain.validate();
  if (M2 < 0 || M2 > chain.L) throw ConfigError("inverse_spectral_solve requires 0 <= M2 <= L");
  const auto spectrum = spin_chain::joint_diagonalize(chain);
  const auto strings = predicted_strings(chain.L, M2, chain.h, chain.eta).values;
  const auto e = linalg::elementary_symmetric(strings);
  const auto scale = linalg::elementary_symmetric_abs(strings);

  std::vector<int> sector_states;
  for (int s = 0; s < static_cast<int>(spectrum.states.size()); ++s)
    if (spectrum.states[s].sector_M2 == M2) sector_states.push_back(s);

  Rng rng(seed);
  std::vector<std::vector<cplx>> starts;
  for (const int s : sector_states)
    for (int r = 0; r < options.perturbed_starts_per_state; ++r) {
      auto h = spectrum.states[s].H;
      for (cplx& v : h) v += options.perturbation * std::max(1.0, std::abs(v)) * rng.complex_in_box(-1, 1, -1, 1);
      starts.push_back(std::move(h));
    }
  double h_scale = 1.0;
  for (const cplx xi : strings) h_scale = std::max(h_scale, std::abs(xi));
  for (int r = 0; r < options.random_starts; ++r) {
    std::vector<cplx> h(static_cast<std::size_t>(chain.L));
    for (cplx& v : h) v = h_scale * rng.complex_in_box(-2, 2, -2, 2);
    starts.push_back(std::move(h));
  }

  InverseSolveResult result;
  result.ed_states_in_sector = static_cast<int>(sector_states.size());
  std::vector<InverseSolution> found;
  for (const auto& start : starts) {
    ++result.starts;
    NewtonOutcome out;
    try {
      out = newton_inverse(chain, e, scale, start, options);
    } catch (const Error&) {
      ++result.failed;
      continue;
    }
    if (!out.converged) {
      ++result.failed;
      continue;
    }
    bool duplicate = false;
    for (const auto& f : found)
      if (h_distance(out.H, f.H) <= options.dedup_tol) duplicate = true;
    if (duplicate) continue;
    InverseSolution sol;
    sol.H = out.H;
    sol.residual = inverse_residual(chain, M2, out.H);
    if (!(sol.residual <= options.accept_tol)) {
      ++result.failed;
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    for (const int s : sector_states) {
      const double d = h_distance(sol.H, spectrum.states[s].H);
      if (d < best) {
        best = d;
        sol.ed_state = s;
      }
    }
    sol.ed_distance = best;
    if (!(best <= options.match_tol)) sol.ed_state = -1;
    found.push_back(std::move(sol));
  }

  std::vector<bool> hit(spectrum.states.size(), false);
  for (auto& sol : found) {
    if (sol.ed_state >= 0) {
      hit[static_cast<std::size_t>(sol.ed_state)] = true;
      result.solutions.push_back(std::move(sol));
    } else {
      result.extraneous.push_back(std::move(sol));
    }
  }
  for (const int s : sector_states)
    if (hit[static_cast<std::size_t>(s)]) ++result.ed_states_found;
  auto by_h = [](const InverseSolution& a, const InverseSolution& b) {
    for (std::size_t i = 0; i < a.H.size(); ++i) {
      if (a.H[i].real() != b.H[i].real()) return a.H[i].real() < b.H[i].real();
      if (a.H[i].imag() != b.H[i].imag()) return a.H[i].imag() < b.H[i].imag();
    }
    return false;
  };
  std::sort(result.solutions.begin(), result.solutions.end(), by_h);
  std::sort(result.extraneous.begin(), result.extraneous.end(), by_h);
  return result;
}

}  // namespace qcd::duality
