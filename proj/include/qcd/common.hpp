#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qcd {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using CMatrix4 = Eigen::Matrix4cd;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

enum class ErrorKind {
  SingularSpectralPoint,
  GeneralPositionViolated,
  DegenerateSpectrum,
  SingularConfiguration,
  NoConvergence,
  SingularVandermonde,
  InvalidBetheRoots,
  MatchFailed,
  ZeroGValue,
  CollisionDetected,
  StepSizeUnderflow,
  ConfigError,
};

const char* to_string(ErrorKind kind);

// Base for every failure raised by the library. Catch the typed aliases below
// or inspect kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

template <ErrorKind K>
class TypedError : public Error {
 public:
  explicit TypedError(const std::string& what) : Error(K, what) {}
};

using SingularSpectralPoint = TypedError<ErrorKind::SingularSpectralPoint>;
using GeneralPositionViolated = TypedError<ErrorKind::GeneralPositionViolated>;
using DegenerateSpectrum = TypedError<ErrorKind::DegenerateSpectrum>;
using SingularConfiguration = TypedError<ErrorKind::SingularConfiguration>;
using NoConvergence = TypedError<ErrorKind::NoConvergence>;
using SingularVandermonde = TypedError<ErrorKind::SingularVandermonde>;
using InvalidBetheRoots = TypedError<ErrorKind::InvalidBetheRoots>;
using MatchFailed = TypedError<ErrorKind::MatchFailed>;
using ZeroGValue = TypedError<ErrorKind::ZeroGValue>;
using CollisionDetected = TypedError<ErrorKind::CollisionDetected>;
using StepSizeUnderflow = TypedError<ErrorKind::StepSizeUnderflow>;
using ConfigError = TypedError<ErrorKind::ConfigError>;

// sinh(a)/sinh(b), the building block of every weight in this library.
inline cplx sinh_ratio(cplx a, cplx b) { return std::sinh(a) / std::sinh(b); }

inline cplx coth(cplx z) { return std::cosh(z) / std::sinh(z); }

// Two-body factor f(z) = sinh(z + eta) / sinh(z).
inline cplx pair_factor(cplx z, cplx eta) { return std::sinh(z + eta) / std::sinh(z); }

// C(z) = sinh^2 z / (sinh(z + eta) sinh(z - eta)).
inline cplx cauchy_factor(cplx z, cplx eta) {
  const cplx s = std::sinh(z);
  return s * s / (std::sinh(z + eta) * std::sinh(z - eta));
}

// Checks the general-position condition |sinh(q_i - q_j)| > tol and
// |sinh(q_i - q_j +- eta)| > tol for i != j, plus |sinh eta| > tol.
// Throws GeneralPositionViolated naming the offending pair.
void require_general_position(const std::vector<cplx>& q, cplx eta, double tol,
                              const char* what = "coordinates");

std::vector<cplx> to_std(const CVector& v);
CVector to_eigen(const std::vector<cplx>& v);

}  // namespace qcd
