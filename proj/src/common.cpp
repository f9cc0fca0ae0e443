#include "qcd/common.hpp"

#include <sstream>

namespace qcd {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularSpectralPoint: return "SingularSpectralPoint";
    case ErrorKind::GeneralPositionViolated: return "GeneralPositionViolated";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::SingularConfiguration: return "SingularConfiguration";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::SingularVandermonde: return "SingularVandermonde";
    case ErrorKind::InvalidBetheRoots: return "InvalidBetheRoots";
    case ErrorKind::MatchFailed: return "MatchFailed";
    case ErrorKind::ZeroGValue: return "ZeroGValue";
    case ErrorKind::CollisionDetected: return "CollisionDetected";
    case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

void require_general_position(const std::vector<cplx>& q, cplx eta, double tol, const char* what) {
  if (std::abs(std::sinh(eta)) <= tol) {
    throw GeneralPositionViolated("|sinh eta| <= tol (eta = 0 mod i pi)");
  }
  const auto n = q.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const cplx d = q[i] - q[j];
      const bool bad = std::abs(std::sinh(d)) <= tol || std::abs(std::sinh(d + eta)) <= tol ||
                       std::abs(std::sinh(d - eta)) <= tol;
      if (bad) {
        std::ostringstream os;
        os << what << " " << i + 1 << " and " << j + 1
           << " are not in general position (x_i - x_j = " << d << ")";
        throw GeneralPositionViolated(os.str());
      }
    }
  }
}

std::vector<cplx> to_std(const CVector& v) { return {v.data(), v.data() + v.size()}; }

CVector to_eigen(const std::vector<cplx>& v) {
  CVector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

}  // namespace qcd
