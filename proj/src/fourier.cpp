#include "circlept/fourier.hpp"

#include <vector>

#include <unsupported/Eigen/FFT>

namespace circlept {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFinite: return "NotFinite";
    case ErrorCode::NonPositiveMass: return "NonPositiveMass";
    case ErrorCode::NegativeDensity: return "NegativeDensity";
    case ErrorCode::BadGridSize: return "BadGridSize";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::TruncationTooCoarse: return "TruncationTooCoarse";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::NoAttractivePart: return "NoAttractivePart";
    case ErrorCode::PeriodicityMismatch: return "PeriodicityMismatch";
    case ErrorCode::ZeroLeadCoefficient: return "ZeroLeadCoefficient";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::ExpOverflow: return "ExpOverflow";
    case ErrorCode::AllSeedsFailed: return "AllSeedsFailed";
    case ErrorCode::BracketNotStraddling: return "BracketNotStraddling";
    case ErrorCode::BlowUp: return "BlowUp";
    case ErrorCode::CflViolated: return "CflViolated";
    case ErrorCode::DegenerateWindow: return "DegenerateWindow";
    case ErrorCode::NoClosedForm: return "NoClosedForm";
    case ErrorCode::ConstraintViolated: return "ConstraintViolated";
    case ErrorCode::PeriodicityViolated: return "PeriodicityViolated";
    case ErrorCode::Config: return "Config";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {

// Eigen::FFT caches plans internally; one instance per thread.
Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> fft = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::HalfSpectrum);
    return f;
  }();
  return fft;
}

}  // namespace

bool is_power_of_two(Index m) { return m >= 2 && (m & (m - 1)) == 0; }

Vec grid_points(Index m) {
  Vec out(m);
  for (Index j = 0; j < m; ++j) out[j] = grid_point(j, m);
  return out;
}

CVec to_fourier(const Vec& values) {
  const Index m = values.size();
  if (!is_power_of_two(m)) throw Error(ErrorCode::BadGridSize, "grid size must be a power of two");
  std::vector<Complex> spec(static_cast<std::size_t>(m / 2 + 1));
  fft_engine().fwd(spec.data(), values.data(), m);
  CVec out(m / 2 + 1);
  const double inv_m = 1.0 / static_cast<double>(m);
  // theta_0 = -1/2 contributes the phase e^{i pi k} = (-1)^k.
  for (Index k = 0; k <= m / 2; ++k) {
    const double sign = (k % 2 == 0) ? inv_m : -inv_m;
    out[k] = spec[static_cast<std::size_t>(k)] * sign;
  }
  out[0] = Complex(out[0].real(), 0.0);
  out[m / 2] = Complex(out[m / 2].real(), 0.0);
  return out;
}

Vec to_grid(const CVec& coeffs, Index m) {
  if (!is_power_of_two(m) || coeffs.size() != m / 2 + 1)
    throw Error(ErrorCode::BadGridSize, "coefficient count must be M/2+1 for a power-of-two M");
  std::vector<Complex> spec(static_cast<std::size_t>(m / 2 + 1));
  const double scale = static_cast<double>(m);
  for (Index k = 0; k <= m / 2; ++k) {
    const double sign = (k % 2 == 0) ? scale : -scale;
    spec[static_cast<std::size_t>(k)] = coeffs[k] * sign;
  }
  spec[0] = Complex(spec[0].real(), 0.0);
  spec[static_cast<std::size_t>(m / 2)] = Complex(spec[static_cast<std::size_t>(m / 2)].real(), 0.0);
  Vec out(m);
  fft_engine().inv(out.data(), spec.data(), m);
  return out;
}

void dealias(CVec& coeffs, Index m) {
  const Index cut = m / 3;
  for (Index k = cut + 1; k < coeffs.size(); ++k) coeffs[k] = Complex(0.0, 0.0);
}

}  // namespace circlept
