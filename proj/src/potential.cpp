#include "circlept/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "circlept/bessel.hpp"

namespace circlept {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRelTol = 1e-12;

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double doi_onsager_coeff(Index k) {
  if (k <= 0 || k % 2 != 0) return 0.0;
  const double l = static_cast<double>(k / 2);
  return (2.0 / kPi) / (4.0 * l * l - 1.0);
}

double hk_coeff(Index k, double r) {
  const double l = static_cast<double>(k);
  return 2.0 / (kPi * l * l * l) * (l * r - std::sin(l * r));
}

template <typename F>
double bisect(F f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

const char* model_name(Model model) {
  switch (model) {
    case Model::DoiOnsager: return "doi_onsager";
    case Model::Transformer: return "transformer";
    case Model::HegselmannKrause: return "hegselmann_krause";
    case Model::LogGas: return "log_gas";
    case Model::Custom: return "custom";
  }
  return "unknown";
}

Model parse_model(const std::string& name) {
  if (name == "doi_onsager" || name == "do") return Model::DoiOnsager;
  if (name == "transformer") return Model::Transformer;
  if (name == "hegselmann_krause" || name == "hk") return Model::HegselmannKrause;
  if (name == "log_gas" || name == "loggas") return Model::LogGas;
  if (name == "custom") return Model::Custom;
  throw Error(ErrorCode::BadParams, "unknown model '" + name + "'");
}

std::string ModelParams::label() const {
  std::ostringstream s;
  s << model_name(model);
  if (model == Model::Transformer) s << "(beta=" << beta << ")";
  if (model == Model::HegselmannKrause) s << "(R=" << radius << ")";
  if (model == Model::Custom) s << "(" << custom.size() << " modes)";
  return s.str();
}

double Potential::coeff(Index k) const {
  if (k < 0) k = -k;
  if (k == 0 || k > truncation()) return 0.0;
  return coeffs_[k];
}

double Potential::value(double theta) const {
  if (!value_) throw Error(ErrorCode::NoClosedForm, params_.label() + " has no closed-form W");
  return scale_ * value_(theta);
}

double Potential::derivative(double theta) const {
  if (!derivative_) throw Error(ErrorCode::NoClosedForm, params_.label() + " has no closed-form W'");
  return scale_ * derivative_(theta);
}

double Potential::series_value(double theta) const {
  double s = 0.0;
  for (Index k = truncation(); k >= 1; --k) s += coeffs_[k] * std::cos(kTwoPi * static_cast<double>(k) * theta);
  return 2.0 * s;
}

double Potential::series_derivative(double theta) const {
  double s = 0.0;
  for (Index k = truncation(); k >= 1; --k)
    s += static_cast<double>(k) * coeffs_[k] * std::sin(kTwoPi * static_cast<double>(k) * theta);
  return -4.0 * kPi * s;
}

std::vector<Index> Potential::attractive_modes() const {
  std::vector<Index> out;
  for (Index k = 1; k <= truncation(); ++k)
    if (coeffs_[k] > 0.0) out.push_back(k);
  return out;
}

Potential Potential::scaled(double factor) const {
  Potential w = *this;
  w.coeffs_ *= factor;
  w.scale_ *= factor;
  return w;
}

Potential make_potential(const ModelParams& p, Index truncation) {
  Potential w;
  w.params_ = p;
  w.coeffs_ = Vec::Zero(truncation + 1);

  switch (p.model) {
    case Model::DoiOnsager: {
      for (Index k = 1; k <= truncation; ++k) w.coeffs_[k] = doi_onsager_coeff(k);
      w.tail_ = [](Index l) {
        const double l0 = std::floor(static_cast<double>(l) / 2.0) + 1.0;
        return (1.0 / kPi) / (2.0 * l0 - 1.0);
      };
      w.envelope_ = [](Index l) {
        const double l0 = std::floor(static_cast<double>(l) / 2.0) + 1.0;
        return 2.0 * l0 * (2.0 / kPi) / (4.0 * l0 * l0 - 1.0);
      };
      w.value_ = [](double t) { return -std::abs(std::sin(kTwoPi * t)) + 2.0 / kPi; };
      // sign of sin(2 pi t) on the wrapped circle, zero exactly at the kinks t = 0 and t = +-1/2
      w.derivative_ = [](double t) {
        const double u = t - std::round(t);
        const double a = std::abs(u);
        const double s = (a == 0.0 || a == 0.5) ? 0.0 : sign(u);
        return -kTwoPi * std::cos(kTwoPi * t) * s;
      };
      break;
    }
    case Model::Transformer: {
      const double beta = p.beta;
      if (!(beta > 0.0)) throw Error(ErrorCode::BadParams, "transformer needs beta > 0");
      if (beta > kBesselMaxArgument) throw Error(ErrorCode::BadParams, "transformer beta must be <= 50");
      const Vec bessel = bessel_i_sequence(truncation, beta);
      for (Index k = 1; k <= truncation; ++k) w.coeffs_[k] = bessel[k] / beta;
      w.tail_ = [beta](Index l) {
        const double r = beta / (2.0 * static_cast<double>(l + 2));
        if (r >= 1.0) return kInf;
        return bessel_i(l + 1, beta) / beta / (1.0 - r);
      };
      w.envelope_ = [beta](Index l) {
        // k I_k(beta) is nonincreasing once k >= beta/2.
        const Index last = std::max<Index>(l + 1, static_cast<Index>(std::ceil(beta / 2.0)));
        double best = 0.0;
        for (Index k = l + 1; k <= last; ++k) best = std::max(best, static_cast<double>(k) * bessel_i(k, beta) / beta);
        return best;
      };
      const double i0 = bessel_i(0, beta);
      w.value_ = [beta, i0](double t) { return (std::exp(beta * std::cos(kTwoPi * t)) - i0) / beta; };
      w.derivative_ = [beta](double t) {
        return -kTwoPi * std::sin(kTwoPi * t) * std::exp(beta * std::cos(kTwoPi * t));
      };
      break;
    }
    case Model::HegselmannKrause: {
      const double r = p.radius;
      if (!(r > 0.0) || r > kPi) throw Error(ErrorCode::BadParams, "Hegselmann-Krause needs R in (0, pi]");
      for (Index k = 1; k <= truncation; ++k) w.coeffs_[k] = hk_coeff(k, r);
      w.tail_ = [r](Index l) {
        if (l == 0) return (4.0 * r / kPi) * (kPi * kPi / 6.0);
        return 4.0 * r / (kPi * static_cast<double>(l));
      };
      w.envelope_ = [r](Index l) {
        const double k = static_cast<double>(l + 1);
        return (2.0 / kPi) * (r / k + 1.0 / (k * k));
      };
      w.value_ = [r](double t) {
        const double s = std::max(r - kTwoPi * std::abs(t), 0.0);
        return s * s - r * r * r / (3.0 * kPi);
      };
      w.derivative_ = [r](double t) { return -2.0 * kTwoPi * std::max(r - kTwoPi * std::abs(t), 0.0) * sign(t); };
      break;
    }
    case Model::LogGas: {
      for (Index k = 1; k <= truncation; ++k) w.coeffs_[k] = 0.5 / static_cast<double>(k);
      w.tail_ = [](Index) { return kInf; };
      w.envelope_ = [](Index) { return 0.5; };
      break;
    }
    case Model::Custom: {
      const std::vector<double> c = p.custom;
      if (c.empty()) throw Error(ErrorCode::BadParams, "custom potential needs at least one coefficient");
      for (double v : c)
        if (!std::isfinite(v)) throw Error(ErrorCode::BadParams, "custom coefficients must be finite");
      for (Index k = 1; k <= truncation && k <= static_cast<Index>(c.size()); ++k)
        w.coeffs_[k] = c[static_cast<std::size_t>(k - 1)];
      w.tail_ = [c](Index l) {
        double s = 0.0;
        for (std::size_t k = static_cast<std::size_t>(std::max<Index>(l, 0)); k < c.size(); ++k) s += std::abs(c[k]);
        return s;
      };
      w.envelope_ = [c](Index l) {
        double s = 0.0;
        for (std::size_t k = static_cast<std::size_t>(std::max<Index>(l, 0)); k < c.size(); ++k)
          s = std::max(s, static_cast<double>(k + 1) * std::abs(c[k]));
        return s;
      };
      break;
    }
  }

  Index g = 0;
  for (Index k = 1; k <= truncation; ++k)
    if (w.coeffs_[k] != 0.0) g = std::gcd(g, k);
  if (g == 0) throw Error(ErrorCode::BadParams, "potential has no active modes");
  w.periodicity_ = static_cast<int>(g - 1);
  if (truncation < 4 * g)
    throw Error(ErrorCode::BadParams, "truncation " + std::to_string(truncation) + " < 4(n+1)");
  return w;
}

Potential make_potential(const ModelParams& p) {
  const Index custom_len = static_cast<Index>(p.custom.size());
  Index trunc = 256;
  if (p.model == Model::Custom) trunc = std::max<Index>(custom_len, 4);
  for (int attempt = 0;; ++attempt) {
    try {
      return make_potential(p, trunc);
    } catch (const Error& e) {
      // a sparse custom law may need a longer table to satisfy M_W >= 4(n+1)
      if (p.model != Model::Custom || attempt > 8 || e.code() != ErrorCode::BadParams) throw;
      trunc *= 2;
    }
  }
}

KSharp k_sharp(const Potential& w) {
  KSharp out;
  double best = 0.0;
  for (Index k = 1; k <= w.truncation(); ++k) {
    if (w.coeff(k) > best) {
      best = w.coeff(k);
      out.mode = k;
    }
  }
  if (best <= 0.0) throw Error(ErrorCode::NoAttractivePart, w.params().label() + " has no positive coefficient");
  out.value = 1.0 / (2.0 * best);
  const double beyond = w.decay_envelope(w.truncation()) / static_cast<double>(w.truncation() + 1);
  out.certified = beyond < best;
  return out;
}

DecayReport check_decay(const Potential& w, int n) {
  const Index p = n + 1;
  for (Index k = 1; k <= w.truncation(); ++k)
    if (k % p != 0 && w.coeff(k) != 0.0)
      throw Error(ErrorCode::PeriodicityMismatch,
                  "mode " + std::to_string(k) + " is active but not a multiple of " + std::to_string(p));
  const double lead = w.coeff(p);
  if (!(lead > 0.0)) throw Error(ErrorCode::ZeroLeadCoefficient, "W^(n+1) must be positive");

  DecayReport r;
  r.checked_up_to = w.truncation();
  r.min_margin = kInf;
  for (Index k = 1; k <= w.truncation(); ++k) {
    const double bound = static_cast<double>(p) / static_cast<double>(k);
    const double margin = bound - w.coeff(k) / lead;
    r.min_margin = std::min(r.min_margin, margin);
    if (margin < -kRelTol * bound && !r.first_violation) r.first_violation = k;
    if (k >= 2 * p && k % p == 0 && std::abs(margin) <= kRelTol * bound) ++r.equality_modes;
  }
  r.passed = !r.first_violation.has_value();
  // beyond the table: 2W^(k)/(2 lead) <= envelope / (k lead) <= (n+1)/k
  r.tail_certified = w.decay_envelope(w.truncation()) / lead <= static_cast<double>(p) * (1.0 + kRelTol);
  return r;
}

Normalized normalize(const Potential& w, int n) {
  const double lead = w.coeff(n + 1);
  if (!(lead > 0.0)) throw Error(ErrorCode::ZeroLeadCoefficient, "cannot normalize: W^(n+1) <= 0");
  const double scale = 2.0 * lead;
  return {w.scaled(1.0 / scale), scale};
}

double beta_star() {
  return bisect([](double b) { return bessel_i(2, b) - 0.5 * bessel_i(1, b); }, 2.4, 2.5);
}

double r_star() {
  return bisect([](double r) { return r - std::sin(r) * (2.0 - std::cos(r)); }, 2.1, 2.2);
}

std::string potential_spec_to_json(const ModelParams& p, Index truncation) {
  nlohmann::json j;
  j["model"] = model_name(p.model);
  nlohmann::json params = nlohmann::json::object();
  if (p.model == Model::Transformer) params["beta"] = p.beta;
  if (p.model == Model::HegselmannKrause) params["R"] = p.radius;
  if (p.model == Model::Custom) params["coefficients"] = p.custom;
  j["params"] = params;
  j["truncation"] = truncation;
  return j.dump(2);
}

Potential potential_from_spec_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ModelParams p;
    p.model = parse_model(j.at("model").get<std::string>());
    const auto params = j.value("params", nlohmann::json::object());
    if (p.model == Model::Transformer) p.beta = params.at("beta").get<double>();
    if (p.model == Model::HegselmannKrause) p.radius = params.at("R").get<double>();
    if (p.model == Model::Custom) p.custom = params.at("coefficients").get<std::vector<double>>();
    if (j.contains("truncation")) return make_potential(p, j.at("truncation").get<Index>());
    return make_potential(p);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Config, std::string("potential spec: ") + e.what());
  }
}

void write_coefficients_csv(const Potential& w, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path);
  out.precision(17);
  out << "k,W_hat\n";
  for (Index k = 1; k <= w.truncation(); ++k) out << k << ',' << w.coeff(k) << '\n';
}

}  // namespace circlept
