#include "circlept/particles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "circlept/critical.hpp"
#include "circlept/flow.hpp"
#include "circlept/parallel.hpp"

namespace circlept {

namespace {

constexpr Index kBlock = 1024;
constexpr std::uint64_t kSamplingStep = std::numeric_limits<std::uint64_t>::max();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::array<std::uint32_t, 4> keyed_block(std::uint64_t seed, std::uint64_t step, std::uint64_t index) {
  return philox4x32({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                     static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32)},
                    {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
}

double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

// Box-Muller on one Philox block: normals 2j and 2j+1 of a (seed, step) stream.
std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t step, std::uint64_t pair) {
  const auto b = keyed_block(seed, step, pair);
  const double r = std::sqrt(-2.0 * std::log(to_unit(b[0], b[1])));
  const double a = kTwoPi * to_unit(b[2], b[3]);
  return {r * std::cos(a), r * std::sin(a)};
}

// Fourier drift on the lattice p N: q_N(p l) reduced over fixed blocks in index order,
// then -4 pi K sum_l (p l) W^(p l) Im(q_N(p l) e^{2 pi i p l theta}).
// Each block holds the powers e^{2 pi i p l theta_j} as columns; Eigen's column sums and
// matrix-vector products run in a fixed order for a given block size.
Vec drift_fourier(const Vec& pos, const Potential& w, double k, int threads) {
  using Mat = Eigen::MatrixXd;
  const Index n = pos.size();
  const Index p = w.periodicity() + 1;
  const Index count = w.truncation() / p;
  const Index blocks = (n + kBlock - 1) / kBlock;
  // per calling thread, so repeated steps reuse the block storage
  thread_local std::vector<Mat> re_store, im_store;
  std::vector<Mat>& re = re_store;
  std::vector<Mat>& im = im_store;
  if (re.size() < static_cast<std::size_t>(blocks)) {
    re.resize(static_cast<std::size_t>(blocks));
    im.resize(static_cast<std::size_t>(blocks));
  }
  Mat partial(2 * count, blocks);
  parallel_for(blocks, threads, [&](Index b) {
    const Index start = b * kBlock;
    const Index len = std::min(kBlock, n - start);
    Mat& pr = re[static_cast<std::size_t>(b)];
    Mat& pi = im[static_cast<std::size_t>(b)];
    pr.resize(len, count);
    pi.resize(len, count);
    for (Index i = 0; i < len; ++i) {
      const double phase = kTwoPi * static_cast<double>(p) * pos[start + i];
      pr(i, 0) = std::cos(phase);
      pi(i, 0) = std::sin(phase);
    }
    for (Index l = 1; l < count; ++l) {
      pr.col(l).array() = pr.col(l - 1).array() * pr.col(0).array() - pi.col(l - 1).array() * pi.col(0).array();
      pi.col(l).array() = pr.col(l - 1).array() * pi.col(0).array() + pi.col(l - 1).array() * pr.col(0).array();
    }
    for (Index l = 0; l < count; ++l) {
      partial(2 * l, b) = pr.col(l).sum();
      partial(2 * l + 1, b) = pi.col(l).sum();
    }
  });
  // weight_l = (p l) W^(p l) conj(sum_j e^{2 pi i p l theta_j}) / N
  Vec wr(count), wi(count);
  for (Index l = 0; l < count; ++l) {
    double sr = 0.0, si = 0.0;
    for (Index b = 0; b < blocks; ++b) {
      sr += partial(2 * l, b);
      si += partial(2 * l + 1, b);
    }
    const Index mode = p * (l + 1);
    const double f = static_cast<double>(mode) * w.coeff(mode) / static_cast<double>(n);
    wr[l] = f * sr;
    wi[l] = -f * si;
  }

  Vec out(n);
  parallel_for(blocks, threads, [&](Index b) {
    const Index start = b * kBlock;
    const Mat& pr = re[static_cast<std::size_t>(b)];
    const Mat& pi = im[static_cast<std::size_t>(b)];
    Vec acc = pi * wr;
    acc.noalias() += pr * wi;
    out.segment(start, pr.rows()) = (-4.0 * kPi * k) * acc;
  });
  return out;
}

Vec drift_pairwise(const Vec& pos, const Potential& w, double k, int threads) {
  if (!w.has_closed_form()) throw Error(ErrorCode::NoClosedForm, w.params().label() + " has no closed-form W'");
  const Index n = pos.size();
  Vec out(n);
  const double scale = k / static_cast<double>(n);
  parallel_for((n + kBlock - 1) / kBlock, threads, [&](Index b) {
    const Index end = std::min(n, (b + 1) * kBlock);
    for (Index i = b * kBlock; i < end; ++i) {
      double s = 0.0;
      for (Index j = 0; j < n; ++j) s += w.derivative(wrap(pos[i] - pos[j]));
      out[i] = scale * s;
    }
  });
  return out;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> key) {
  constexpr std::uint64_t kM0 = 0xD2511F53;
  constexpr std::uint64_t kM1 = 0xCD9E8D57;
  constexpr std::uint32_t kW0 = 0x9E3779B9;
  constexpr std::uint32_t kW1 = 0xBB67AE85;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    const std::uint64_t p0 = kM0 * c[0];
    const std::uint64_t p1 = kM1 * c[2];
    c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ key[0], static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ key[1], static_cast<std::uint32_t>(p0)};
  }
  return c;
}

double keyed_normal(std::uint64_t seed, std::uint64_t step, std::uint64_t index) {
  return normal_pair(seed, step, index >> 1)[index & 1];
}

double keyed_uniform(std::uint64_t seed, std::uint64_t step, std::uint64_t index) {
  const auto b = keyed_block(seed, step, index);
  return to_unit(b[0], b[1]);
}

double wrap(double x) {
  double y = x - std::floor(x + 0.5);
  if (y >= 0.5) y -= 1.0;
  return y;
}

std::uint64_t replicate_seed(std::uint64_t seed, int r) {
  return splitmix64(seed ^ (0x632BE59BD9B4E019ULL * static_cast<std::uint64_t>(r + 1)));
}

const char* drift_mode_name(DriftMode m) { return m == DriftMode::PairwiseExact ? "pairwise_exact" : "fourier_truncated"; }

Vec drift(const Vec& positions, const Potential& w, double k, DriftMode mode, int threads) {
  if (positions.size() == 0) return Vec();
  return mode == DriftMode::PairwiseExact ? drift_pairwise(positions, w, k, threads)
                                          : drift_fourier(positions, w, k, threads);
}

namespace {

void fill_noise(std::uint64_t seed, std::uint64_t step, Vec& xi) {
  const Index n = xi.size();
  for (Index i = 0; i + 1 < n; i += 2) {
    const auto z = normal_pair(seed, step, static_cast<std::uint64_t>(i) >> 1);
    xi[i] = z[0];
    xi[i + 1] = z[1];
  }
  if (n % 2 == 1) xi[n - 1] = normal_pair(seed, step, static_cast<std::uint64_t>(n - 1) >> 1)[0];
}

void check_step(double dt) {
  if (!(dt > 0.0 && dt <= 1e-3 * (1.0 + 1e-12))) throw Error(ErrorCode::BadParams, "em_step needs 0 < dt <= 1e-3");
}

void advance(ParticleState& s, const Potential& w, double k, double dt, DriftMode mode, const Vec& xi, int threads) {
  const double sq = std::sqrt(dt);
  if (k == 0.0) {
    for (Index i = 0; i < s.positions.size(); ++i) s.positions[i] = wrap(s.positions[i] + sq * xi[i]);
  } else {
    const Vec b = drift(s.positions, w, k, mode, threads);
    for (Index i = 0; i < s.positions.size(); ++i) s.positions[i] = wrap(s.positions[i] + b[i] * dt + sq * xi[i]);
  }
  s.time += dt;
  s.step += 1;
}

}  // namespace

Vec step_noise(std::uint64_t seed, std::uint64_t step, Index n) {
  Vec xi(n);
  fill_noise(seed, step, xi);
  return xi;
}

ParticleState em_step_with_noise(const ParticleState& s, const Potential& w, double k, double dt, DriftMode mode,
                                 const Vec& xi, int threads) {
  check_step(dt);
  if (xi.size() != s.positions.size()) throw Error(ErrorCode::BadParams, "noise size differs from particle count");
  ParticleState out = s;
  advance(out, w, k, dt, mode, xi, threads);
  return out;
}

ParticleState em_step(const ParticleState& s, const Potential& w, double k, double dt, DriftMode mode, int threads) {
  return em_step_with_noise(s, w, k, dt, mode, step_noise(s.seed, s.step, s.positions.size()), threads);
}

Complex empirical_fourier(const Vec& positions, Index k) {
  if (k == 0) return Complex(1.0, 0.0);
  Complex sum(0.0, 0.0);
  for (Index i = 0; i < positions.size(); ++i) sum += std::polar(1.0, -kTwoPi * static_cast<double>(k) * positions[i]);
  return sum / static_cast<double>(positions.size());
}

Vec sample_positions(const Density& q, Index n, std::uint64_t seed) {
  const Index m = q.grid_size();
  std::vector<double> cum(static_cast<std::size_t>(m + 1), 0.0);
  for (Index j = 0; j < m; ++j) cum[static_cast<std::size_t>(j + 1)] = cum[static_cast<std::size_t>(j)] + q.values()[j];
  const double total = cum.back();
  for (double& c : cum) c /= total;
  Vec out(n);
  for (Index i = 0; i < n; ++i) {
    const double u = keyed_uniform(seed, kSamplingStep, static_cast<std::uint64_t>(i));
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    const std::size_t j = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - cum.begin() - 1, 0, m - 1));
    const double mass = cum[j + 1] - cum[j];
    const double frac = mass > 0.0 ? (u - cum[j]) / mass : 0.5;
    out[i] = wrap(-0.5 + (static_cast<double>(j) + frac) / static_cast<double>(m));
  }
  return out;
}

ChaosReport chaos_check(const Potential& w, const ChaosOptions& opt) {
  if (opt.n < 1000) throw Error(ErrorCode::BadParams, "chaos_check needs N >= 1000");
  if (opt.replicates < 2) throw Error(ErrorCode::BadParams, "chaos_check needs at least 2 replicates");
  ChaosReport rep;
  rep.mode = k_sharp(w).mode;
  const double kmode = static_cast<double>(rep.mode);
  std::function<double(double)> law = opt.initial;
  if (law) {
    rep.initial_law = "user-supplied";
  } else {
    law = [kmode](double t) { return 1.0 + 0.5 * std::cos(kTwoPi * kmode * t); };
    std::ostringstream s;
    s << "1 + 0.5 cos(2 pi " << rep.mode << " theta), i.i.d. particles";
    rep.initial_law = s.str();
  }

  const Density q0 = density_from_function(law, opt.pde_grid);
  RecordPolicy policy;
  policy.modes = {rep.mode};
  policy.w2 = false;
  policy.first = opt.t_end;
  const FlowTrace pde = integrate(q0, w, opt.k, opt.t_end, opt.pde_dt, policy);
  rep.pde_order = pde.mode_amplitude[0].back();

  const Density fine = density_from_function(law, 8192);
  const long steps = std::max<long>(1, std::lround(opt.t_end / opt.dt));
  const double dt = opt.t_end / static_cast<double>(steps);
  check_step(dt);
  const double nn = static_cast<double>(opt.n);
  rep.replicate_sq.assign(static_cast<std::size_t>(opt.replicates), 0.0);
  std::vector<double> abs_values(static_cast<std::size_t>(opt.replicates), 0.0);
  rep.trajectories.assign(static_cast<std::size_t>(opt.replicates), {});
  const long record_every = opt.trajectory_records > 0 ? std::max<long>(1, steps / opt.trajectory_records) : 0;

  parallel_for(opt.replicates, opt.threads, [&](Index r) {
    const std::uint64_t seed = replicate_seed(opt.seed, static_cast<int>(r));
    ParticleState s{sample_positions(fine, opt.n, seed), 0.0, seed, 0};
    Vec xi(opt.n);
    auto& traj = rep.trajectories[static_cast<std::size_t>(r)];
    auto snapshot = [&] {
      std::vector<double> row{s.time};
      for (Index m = 1; m <= opt.trajectory_modes; ++m) row.push_back(std::abs(empirical_fourier(s.positions, m)));
      traj.push_back(std::move(row));
    };
    if (record_every > 0) snapshot();
    for (long i = 1; i <= steps; ++i) {
      fill_noise(s.seed, s.step, xi);
      advance(s, w, opt.k, dt, opt.mode, xi, 1);
      if (record_every > 0 && i % record_every == 0) snapshot();
    }
    const double a = std::abs(empirical_fourier(s.positions, rep.mode));
    abs_values[static_cast<std::size_t>(r)] = a;
    rep.replicate_sq[static_cast<std::size_t>(r)] = (nn * a * a - 1.0) / (nn - 1.0);
  });

  const double reps = static_cast<double>(opt.replicates);
  double mean = 0.0;
  for (double v : rep.replicate_sq) mean += v;
  mean /= reps;
  double var = 0.0;
  for (double v : rep.replicate_sq) var += (v - mean) * (v - mean);
  var /= reps - 1.0;
  rep.particle_sq_mean = mean;
  rep.particle_sq_se = std::sqrt(var / reps);
  for (double v : abs_values) rep.particle_abs_mean += v / reps;
  const double diff = mean - rep.pde_order * rep.pde_order;
  rep.z = rep.particle_sq_se > 0.0 ? diff / rep.particle_sq_se : (diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff));
  return rep;
}

void write_trajectory_csv(const std::vector<std::vector<double>>& rows, Index k_max, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path);
  out.precision(17);
  out << 't';
  for (Index m = 1; m <= k_max; ++m) out << ",abs_qN_" << m;
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

}  // namespace circlept
