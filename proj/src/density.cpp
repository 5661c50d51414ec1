#include "circlept/density.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace circlept {

namespace {

constexpr double kMaxClippedMass = 1e-6;
constexpr double kMassTolerance = 1e-8;
constexpr char kBinaryMagic[4] = {'C', 'P', 'T', 'D'};

}  // namespace

Density Density::uniform(Index m) { return density_from_grid(Vec::Ones(m)); }

Complex Density::coeff(Index k) const {
  const Index half = grid_size() / 2;
  if (k > half || k < -half) return Complex(0.0, 0.0);
  return k >= 0 ? fourier_[k] : std::conj(fourier_[-k]);
}

Density density_from_grid(const Vec& values) {
  const Index m = values.size();
  if (!is_power_of_two(m)) throw Error(ErrorCode::BadGridSize, "M=" + std::to_string(m) + " is not a power of two");
  if (!values.allFinite()) throw Error(ErrorCode::NotFinite, "grid values contain NaN or Inf");

  Density q;
  q.min_raw_ = values.minCoeff();
  q.values_ = values;
  double clipped = 0.0;
  for (Index j = 0; j < m; ++j) {
    if (q.values_[j] < 0.0) {
      clipped -= q.values_[j];
      q.values_[j] = 0.0;
    }
  }
  q.clipped_mass_ = clipped / static_cast<double>(m);
  if (q.clipped_mass_ > kMaxClippedMass)
    throw Error(ErrorCode::NegativeDensity, "clipped mass " + std::to_string(q.clipped_mass_) + " exceeds 1e-6");

  const double mean = q.values_.mean();
  if (!(mean > 0.0)) throw Error(ErrorCode::NonPositiveMass, "mass must be positive");
  q.renormalized_ = std::abs(mean - 1.0) > kMassTolerance;
  q.values_ /= mean;
  q.fourier_ = to_fourier(q.values_);
  q.fourier_[0] = Complex(1.0, 0.0);
  return q;
}

Density density_from_function(const std::function<double(double)>& f, Index m) {
  Vec v(m);
  for (Index j = 0; j < m; ++j) v[j] = f(grid_point(j, m));
  return density_from_grid(v);
}

Density density_from_fourier(const CVec& coeffs, Index m) {
  CVec c = coeffs;
  c[0] = Complex(1.0, 0.0);
  return density_from_grid(to_grid(c, m));
}

Density rotate(const Density& q, Index cells) {
  const Index m = q.grid_size();
  const Index s = ((cells % m) + m) % m;
  Vec v(m);
  for (Index j = 0; j < m; ++j) v[(j + s) % m] = q.values()[j];
  return density_from_grid(v);
}

double ExtremalFamily::operator()(double theta) const {
  const double arg = kTwoPi * static_cast<double>(n + 1) * (theta - shift);
  return (1.0 - c * c) / (1.0 + c * c - 2.0 * c * std::cos(arg));
}

Complex ExtremalFamily::coefficient(Index k) const {
  const Index p = n + 1;
  if (k % p != 0) return Complex(0.0, 0.0);
  const Index l = k / p;
  const double mag = std::pow(c, static_cast<double>(std::abs(l)));
  return std::polar(mag, -kTwoPi * static_cast<double>(k) * shift);
}

Density ExtremalFamily::sample(Index m) const {
  return density_from_function([this](double t) { return (*this)(t); }, m);
}

std::string density_to_json(const Density& q) {
  nlohmann::json j;
  j["grid_size"] = q.grid_size();
  j["grid_values"] = std::vector<double>(q.values().data(), q.values().data() + q.grid_size());
  return j.dump();
}

Density density_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Io, std::string("density JSON: ") + e.what());
  }
  const auto values = j.at("grid_values").get<std::vector<double>>();
  const auto m = j.at("grid_size").get<Index>();
  if (static_cast<Index>(values.size()) != m) throw Error(ErrorCode::GridMismatch, "grid_size does not match grid_values");
  return density_from_grid(Eigen::Map<const Vec>(values.data(), m));
}

void write_density_csv(const Density& q, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path);
  out.precision(17);
  out << "theta,q\n";
  for (Index j = 0; j < q.grid_size(); ++j) out << grid_point(j, q.grid_size()) << ',' << q.values()[j] << '\n';
}

void write_density_binary(const Density& q, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path);
  const auto m = static_cast<std::uint64_t>(q.grid_size());
  out.write(kBinaryMagic, 4);
  out.write(reinterpret_cast<const char*>(&m), sizeof m);
  out.write(reinterpret_cast<const char*>(q.values().data()), static_cast<std::streamsize>(m * sizeof(double)));
}

Density read_density_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  char magic[4];
  std::uint64_t m = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&m), sizeof m);
  if (!in || std::memcmp(magic, kBinaryMagic, 4) != 0) throw Error(ErrorCode::Io, path + " is not a density column");
  Vec v(static_cast<Index>(m));
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(m * sizeof(double)));
  if (!in) throw Error(ErrorCode::Io, path + " is truncated");
  return density_from_grid(v);
}

}  // namespace circlept
