#include "qcd/spin_chain.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <sstream>

#include "qcd/rng.hpp"

namespace qcd::spin_chain {

namespace {

void require_nonsingular(cplx x, double tol) {
  if (std::abs(std::sinh(x)) <= tol) {
    std::ostringstream os;
    os << "|sinh x| <= " << tol << " at x = " << x;
    throw SingularSpectralPoint(os.str());
  }
}

// Spin value +1 for up (bit 0), -1 for down (bit 1) of site i (1-based).
int spin_of(Eigen::Index basis, int site, int sites) {
  return ((basis >> (sites - site)) & 1) ? -1 : 1;
}

int down_count(Eigen::Index basis) { return std::popcount(static_cast<std::uint64_t>(basis)); }

QuantumOperator diagonal_operator(int sites, const std::vector<cplx>& diag) {
  QuantumOperator op{sites, CMatrix::Zero(static_cast<Eigen::Index>(diag.size()),
                                          static_cast<Eigen::Index>(diag.size()))};
  for (std::size_t b = 0; b < diag.size(); ++b) op.entries(b, b) = diag[b];
  return op;
}

template <class F>
QuantumOperator diagonal_from_counts(int L, F&& f) {
  const auto dim = Eigen::Index{1} << L;
  std::vector<cplx> d(static_cast<std::size_t>(dim));
  for (Eigen::Index b = 0; b < dim; ++b) {
    const int m2 = down_count(b);
    d[static_cast<std::size_t>(b)] = f(L - m2, m2);
  }
  return diagonal_operator(L, d);
}

}  // namespace

void ChainParams::validate() const {
  if (L < 1) throw ConfigError("L must be >= 1");
  if (L > kMaxSites) throw ConfigError("L must be <= " + std::to_string(kMaxSites));
  if (static_cast<int>(inhom.size()) != L)
    throw ConfigError("inhom must have exactly L entries");
  if (!(tol_general_position > 0.0)) throw ConfigError("tol_general_position must be > 0");
  require_general_position(inhom, eta, tol_general_position, "inhomogeneities");
}

std::uint64_t ChainParams::hash() const {
  std::uint64_t h_acc = 0xcbf29ce484222325ULL;
  auto mix = [&h_acc](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_acc ^= bytes[i];
      h_acc *= 0x100000001b3ULL;
    }
  };
  auto mix_c = [&mix](cplx z) {
    const double parts[2] = {z.real(), z.imag()};
    mix(parts, sizeof(parts));
  };
  const std::int64_t l64 = L;
  mix(&l64, sizeof(l64));
  mix_c(eta);
  mix_c(h);
  mix_c(v);
  for (const cplx x : inhom) mix_c(x);
  return h_acc;
}

CMatrix4 r_matrix(cplx x, cplx eta, double tol) {
  require_nonsingular(x, tol);
  const cplx a = sinh_ratio(x + eta, x);
  const cplx c = sinh_ratio(eta, x);
  CMatrix4 r = CMatrix4::Zero();
  r(0, 0) = a;
  r(1, 1) = 1.0;
  r(1, 2) = c;
  r(2, 1) = c;
  r(2, 2) = 1.0;
  r(3, 3) = a;
  return r;
}

CMatrix4 r_matrix_asymmetric(cplx x, cplx eta, cplx h, cplx v, double tol) {
  require_nonsingular(x, tol);
  const cplx a = sinh_ratio(x + eta, x);
  const cplx c = sinh_ratio(eta, x);
  CMatrix4 r = CMatrix4::Zero();
  r(0, 0) = std::exp(h + v) * a;
  r(1, 1) = std::exp(h - v);
  r(1, 2) = c;
  r(2, 1) = c;
  r(2, 2) = std::exp(-h + v);
  r(3, 3) = std::exp(-h - v) * a;
  return r;
}

CMatrix4 r_matrix_asymmetric_conjugated(cplx x, cplx eta, cplx h, cplx v, double tol) {
  Eigen::Vector4cd d;
  for (int a = 0; a < 2; ++a)
    for (int s = 0; s < 2; ++s)
      d(2 * a + s) = std::exp(0.5 * (h * double(1 - 2 * a) + v * double(1 - 2 * s)));
  return d.asDiagonal() * r_matrix(x, eta, tol) * d.asDiagonal();
}

CMatrix4 r_matrix_limit(cplx eta, int sign) {
  // sinh(x + eta)/sinh x -> exp(+-eta), sinh eta / sinh x -> 0.
  const cplx a = std::exp(double(sign > 0 ? 1 : -1) * eta);
  CMatrix4 r = CMatrix4::Zero();
  r(0, 0) = a;
  r(1, 1) = 1.0;
  r(2, 2) = 1.0;
  r(3, 3) = a;
  return r;
}

CMatrix4 permutation_matrix() {
  CMatrix4 p = CMatrix4::Zero();
  p(0, 0) = 1.0;
  p(1, 2) = 1.0;
  p(2, 1) = 1.0;
  p(3, 3) = 1.0;
  return p;
}

CMatrix embed_two_site(const CMatrix4& two_site, int i, int j, int sites) {
  const auto dim = Eigen::Index{1} << sites;
  CMatrix out = CMatrix::Zero(dim, dim);
  const int shift_i = sites - i;
  const int shift_j = sites - j;
  const Eigen::Index mask = (Eigen::Index{1} << shift_i) | (Eigen::Index{1} << shift_j);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const int ci = static_cast<int>((col >> shift_i) & 1);
    const int cj = static_cast<int>((col >> shift_j) & 1);
    const Eigen::Index rest = col & ~mask;
    for (int ri = 0; ri < 2; ++ri) {
      for (int rj = 0; rj < 2; ++rj) {
        const cplx w = two_site(2 * ri + rj, 2 * ci + cj);
        if (w == cplx{0.0}) continue;
        const Eigen::Index row =
            rest | (Eigen::Index{ri} << shift_i) | (Eigen::Index{rj} << shift_j);
        out(row, col) += w;
      }
    }
  }
  return out;
}

CMatrix embed_one_site(const Eigen::Matrix2cd& one_site, int i, int sites) {
  const auto dim = Eigen::Index{1} << sites;
  CMatrix out = CMatrix::Zero(dim, dim);
  const int shift = sites - i;
  for (Eigen::Index col = 0; col < dim; ++col) {
    const int c = static_cast<int>((col >> shift) & 1);
    const Eigen::Index rest = col & ~(Eigen::Index{1} << shift);
    for (int r = 0; r < 2; ++r) out(rest | (Eigen::Index{r} << shift), col) += one_site(r, c);
  }
  return out;
}

double yang_baxter_residual(cplx x, cplx xp, cplx eta) {
  const CMatrix r12 = embed_two_site(r_matrix(x - xp, eta), 1, 2, 3);
  const CMatrix r13 = embed_two_site(r_matrix(x, eta), 1, 3, 3);
  const CMatrix r23 = embed_two_site(r_matrix(xp, eta), 2, 3, 3);
  return (r12 * r13 * r23 - r23 * r13 * r12).norm();
}

double yang_baxter_asymmetric_residual(cplx x, cplx xp, cplx eta, cplx h, cplx v, cplx vp) {
  const CMatrix r12 = embed_two_site(r_matrix_asymmetric(x - xp, eta, -vp, v), 1, 2, 3);
  const CMatrix r13 = embed_two_site(r_matrix_asymmetric(x, eta, h, v), 1, 3, 3);
  const CMatrix r23 = embed_two_site(r_matrix_asymmetric(xp, eta, h, vp), 2, 3, 3);
  return (r12 * r13 * r23 - r23 * r13 * r12).norm();
}

CMatrix trace_monodromy(const std::vector<CMatrix4>& factors, cplx twist_up, cplx twist_down) {
  // mono[a][b] is the operator-valued (a, b) entry of the auxiliary 2x2
  // monodromy. Appending site i tensors on the right (least significant bit).
  CMatrix mono[2][2];
  mono[0][0] = CMatrix::Identity(1, 1);
  mono[1][1] = CMatrix::Identity(1, 1);
  mono[0][1] = CMatrix::Zero(1, 1);
  mono[1][0] = CMatrix::Zero(1, 1);
  for (const CMatrix4& r : factors) {
    const Eigen::Index n = mono[0][0].rows();
    CMatrix next[2][2];
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        CMatrix acc = CMatrix::Zero(2 * n, 2 * n);
        for (int c = 0; c < 2; ++c) {
          const CMatrix& left = mono[a][c];
          for (int s = 0; s < 2; ++s) {
            for (int t = 0; t < 2; ++t) {
              const cplx w = r(2 * c + s, 2 * b + t);
              if (w == cplx{0.0}) continue;
              for (Eigen::Index j = 0; j < n; ++j)
                for (Eigen::Index i = 0; i < n; ++i) acc(2 * i + s, 2 * j + t) += w * left(i, j);
            }
          }
        }
        next[a][b] = std::move(acc);
      }
    }
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) mono[a][b] = std::move(next[a][b]);
  }
  return twist_up * mono[0][0] + twist_down * mono[1][1];
}

namespace {

void require_off_pole(const ChainParams& params, cplx x) {
  for (int k = 0; k < params.L; ++k) {
    if (std::abs(std::sinh(x - params.inhom[k])) <= params.tol_general_position) {
      std::ostringstream os;
      os << "spectral parameter x = " << x << " hits the pole at x_" << k + 1;
      throw SingularSpectralPoint(os.str());
    }
  }
}

}  // namespace

QuantumOperator transfer_matrix_asym(const ChainParams& params, cplx x) {
  require_off_pole(params, x);
  std::vector<CMatrix4> factors;
  factors.reserve(params.L);
  for (int k = 0; k < params.L; ++k)
    factors.push_back(r_matrix_asymmetric(x - params.inhom[k], params.eta, params.h, params.v, 0.0));
  return {params.L, trace_monodromy(factors, 1.0, 1.0)};
}

QuantumOperator transfer_matrix_twisted(const ChainParams& params, cplx x) {
  require_off_pole(params, x);
  std::vector<CMatrix4> factors;
  factors.reserve(params.L);
  for (int k = 0; k < params.L; ++k) factors.push_back(r_matrix(x - params.inhom[k], params.eta, 0.0));
  const cplx lh = double(params.L) * params.h;
  return {params.L, trace_monodromy(factors, std::exp(lh), std::exp(-lh))};
}

QuantumOperator transfer_matrix_twisted_limit(const ChainParams& params, int sign) {
  const std::vector<CMatrix4> factors(static_cast<std::size_t>(params.L), r_matrix_limit(params.eta, sign));
  const cplx lh = double(params.L) * params.h;
  return {params.L, trace_monodromy(factors, std::exp(lh), std::exp(-lh))};
}

QuantumOperator similarity_u(const ChainParams& params) {
  const int L = params.L;
  const auto dim = Eigen::Index{1} << L;
  std::vector<cplx> d(static_cast<std::size_t>(dim));
  for (Eigen::Index b = 0; b < dim; ++b) {
    cplx expo{0.0};
    for (int j = 1; j <= L; ++j) expo += double((j - 1) * spin_of(b, j, L)) * params.h;
    d[static_cast<std::size_t>(b)] = std::exp(expo);
  }
  return diagonal_operator(L, d);
}

SpinOperators sz_m1_m2_operators(int L) {
  if (L < 1) throw ConfigError("L must be >= 1");
  return {
      diagonal_from_counts(L, [](int m1, int m2) { return cplx(m1 - m2); }),
      diagonal_from_counts(L, [](int m1, int) { return cplx(m1); }),
      diagonal_from_counts(L, [](int, int m2) { return cplx(m2); }),
  };
}

std::vector<QuantumOperator> hamiltonians_h(const ChainParams& params) {
  params.validate();
  const cplx lh = double(params.L) * params.h;
  std::vector<QuantumOperator> out;
  out.reserve(params.L);
  for (int k = 0; k < params.L; ++k) {
    std::vector<CMatrix4> factors;
    factors.reserve(params.L);
    for (int l = 0; l < params.L; ++l) {
      factors.push_back(l == k ? permutation_matrix()
                               : r_matrix(params.inhom[k] - params.inhom[l], params.eta, 0.0));
    }
    out.push_back({params.L, trace_monodromy(factors, std::exp(lh), std::exp(-lh))});
  }
  return out;
}

std::vector<QuantumOperator> hamiltonians_g(const ChainParams& params) {
  params.validate();
  const cplx lh = double(params.L) * params.h;
  std::vector<QuantumOperator> out;
  out.reserve(params.L);
  for (int i = 0; i < params.L; ++i) {
    std::vector<CMatrix4> factors;
    factors.reserve(params.L);
    for (int k = 0; k < params.L; ++k)
      factors.push_back(r_matrix(params.inhom[i] - params.eta - params.inhom[k], params.eta, 0.0));
    out.push_back({params.L, trace_monodromy(factors, std::exp(lh), std::exp(-lh))});
  }
  return out;
}

QuantumOperator constant_term(const ChainParams& params) {
  const auto plus = transfer_matrix_twisted_limit(params, +1);
  const auto minus = transfer_matrix_twisted_limit(params, -1);
  return {params.L, 0.5 * (plus.entries + minus.entries)};
}

CMatrix pole_expansion(const QuantumOperator& c, const std::vector<QuantumOperator>& h,
                       const ChainParams& params, cplx x) {
  CMatrix out = c.entries;
  const cplx se = std::sinh(params.eta);
  for (int k = 0; k < params.L; ++k) out += se * coth(x - params.inhom[k]) * h[k].entries;
  return out;
}

QuantumOperator constant_term_closed_form(const ChainParams& params) {
  const cplx lh = double(params.L) * params.h;
  const cplx eta = params.eta;
  return diagonal_from_counts(params.L, [&](int m1, int m2) {
    return std::exp(lh) * std::cosh(eta * double(m1)) + std::exp(-lh) * std::cosh(eta * double(m2));
  });
}

QuantumOperator hamiltonian_sum_closed_form(const ChainParams& params) {
  const cplx lh = double(params.L) * params.h;
  const cplx eta = params.eta;
  const cplx se = std::sinh(eta);
  return diagonal_from_counts(params.L, [&](int m1, int m2) {
    return (std::exp(lh) * std::sinh(eta * double(m1)) + std::exp(-lh) * std::sinh(eta * double(m2))) / se;
  });
}

cplx gh_scalar(const ChainParams& params, int i) {
  cplx prod{1.0};
  for (int k = 0; k < params.L; ++k)
    if (k != i) prod *= pair_factor(params.inhom[i] - params.inhom[k], params.eta);
  return prod;
}

SectorBasis sector_basis(int L, int M2) {
  if (L < 1 || M2 < 0 || M2 > L) throw ConfigError("sector requires 0 <= M2 <= L");
  SectorBasis basis{L, M2, {}};
  const auto dim = Eigen::Index{1} << L;
  for (Eigen::Index b = 0; b < dim; ++b)
    if (down_count(b) == M2) basis.indices.push_back(b);
  return basis;
}

CMatrix restrict_to_sector(const CMatrix& op, const SectorBasis& basis) {
  const auto n = static_cast<Eigen::Index>(basis.indices.size());
  CMatrix out(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) out(i, j) = op(basis.indices[i], basis.indices[j]);
  return out;
}

cplx rayleigh(const CMatrix& a, const CVector& psi) { return psi.dot(a * psi) / psi.squaredNorm(); }

double JointSpectrum::max_residual() const {
  double worst = 0.0;
  for (const auto& s : states) {
    for (double r : s.residual_h) worst = std::max(worst, r);
    for (double r : s.residual_g) worst = std::max(worst, r);
  }
  return worst;
}

JointSpectrum joint_diagonalize(const ChainParams& params, const JointDiagonalizeOptions& options) {
  params.validate();
  const int L = params.L;

  // Store only sector blocks; the full operators are not kept around.
  std::vector<SectorBasis> bases;
  for (int m2 = 0; m2 <= L; ++m2) bases.push_back(sector_basis(L, m2));
  auto blocks_of = [&](const CMatrix& full) {
    std::vector<CMatrix> out;
    for (const auto& b : bases) out.push_back(restrict_to_sector(full, b));
    return out;
  };
  std::vector<std::vector<CMatrix>> h_blocks, g_blocks;
  for (const auto& op : hamiltonians_h(params)) h_blocks.push_back(blocks_of(op.entries));
  for (const auto& op : hamiltonians_g(params)) g_blocks.push_back(blocks_of(op.entries));
  const auto c_blocks = blocks_of(constant_term(params).entries);

  JointSpectrum spectrum;
  Rng rng(options.seed);
  for (int m2 = 0; m2 <= L; ++m2) {
    const auto& basis = bases[static_cast<std::size_t>(m2)];
    const auto n = static_cast<Eigen::Index>(basis.indices.size());
    std::vector<double> h_norm(L), g_norm(L);
    for (int k = 0; k < L; ++k) {
      h_norm[k] = std::max(h_blocks[k][m2].norm(), 1e-300);
      g_norm[k] = std::max(g_blocks[k][m2].norm(), 1e-300);
    }

    bool accepted = false;
    for (int attempt = 0; attempt <= options.max_retries && !accepted; ++attempt) {
      CMatrix combo = CMatrix::Zero(n, n);
      for (int k = 0; k < L; ++k) combo += rng.complex_in_box(-1.0, 1.0, -1.0, 1.0) * h_blocks[k][m2];
      Eigen::ComplexEigenSolver<CMatrix> solver(combo);
      if (solver.info() != Eigen::Success) continue;

      std::vector<JointState> sector_states;
      double worst = 0.0;
      for (Eigen::Index s = 0; s < n; ++s) {
        CVector local = solver.eigenvectors().col(s);
        local.normalize();
        JointState st;
        st.sector_M2 = m2;
        for (int k = 0; k < L; ++k) {
          const cplx hk = rayleigh(h_blocks[k][m2], local);
          const cplx gk = rayleigh(g_blocks[k][m2], local);
          st.H.push_back(hk);
          st.G.push_back(gk);
          st.residual_h.push_back((h_blocks[k][m2] * local - hk * local).norm() / h_norm[k]);
          st.residual_g.push_back((g_blocks[k][m2] * local - gk * local).norm() / g_norm[k]);
          worst = std::max({worst, st.residual_h.back(), st.residual_g.back()});
        }
        st.C_value = rayleigh(c_blocks[m2], local);
        st.eigenvector = CVector::Zero(Eigen::Index{1} << L);
        for (Eigen::Index i = 0; i < n; ++i) st.eigenvector(basis.indices[i]) = local(i);
        sector_states.push_back(std::move(st));
      }
      if (worst <= options.residual_tol) {
        accepted = true;
        spectrum.retries_used += attempt;
        for (auto& st : sector_states) spectrum.states.push_back(std::move(st));
      }
    }
    if (!accepted) {
      std::ostringstream os;
      os << "sector M2 = " << m2 << " not resolved after " << options.max_retries
         << " retries of the random Hamiltonian combination";
      throw DegenerateSpectrum(os.str());
    }
  }
  return spectrum;
}

}  // namespace qcd::spin_chain
