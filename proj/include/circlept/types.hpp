#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace circlept {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

template <typename Scalar>
using VecT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using CVecT = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

enum class ErrorCode {
  NotFinite,
  NonPositiveMass,
  NegativeDensity,
  BadGridSize,
  GridMismatch,
  TruncationTooCoarse,
  BadParams,
  Overflow,
  NoAttractivePart,
  PeriodicityMismatch,
  ZeroLeadCoefficient,
  NotNormalized,
  ExpOverflow,
  AllSeedsFailed,
  BracketNotStraddling,
  BlowUp,
  CflViolated,
  DegenerateWindow,
  NoClosedForm,
  ConstraintViolated,
  PeriodicityViolated,
  Config,
  Io,
};

const char* to_string(ErrorCode code);

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace circlept
