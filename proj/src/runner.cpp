#include "circlept/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <set>

#include <json.hpp>

#include "circlept/critical.hpp"
#include "circlept/flow.hpp"
#include "circlept/fourier.hpp"
#include "circlept/inequality.hpp"
#include "circlept/io.hpp"
#include "circlept/parallel.hpp"
#include "circlept/particles.hpp"
#include "circlept/spectral.hpp"

namespace circlept {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> kCommands{"thresholds", "scan", "minimize", "flow", "particles", "verify", "report"};

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::Config, what); }

json model_to_json(const ModelParams& p) {
  json j;
  j["name"] = model_name(p.model);
  if (p.model == Model::Transformer) j["beta"] = p.beta;
  if (p.model == Model::HegselmannKrause) j["R"] = p.radius;
  if (p.model == Model::Custom) j["coefficients"] = p.custom;
  return j;
}

ModelParams model_from_json(const json& j) {
  ModelParams p;
  p.model = parse_model(j.at("name").get<std::string>());
  if (j.contains("beta")) p.beta = j.at("beta").get<double>();
  if (j.contains("R")) p.radius = j.at("R").get<double>();
  if (j.contains("coefficients")) p.custom = j.at("coefficients").get<std::vector<double>>();
  return p;
}

Potential build_potential(const RunConfig& c, Index fallback = 0) {
  if (c.truncation > 0) return make_potential(c.model, c.truncation);
  if (fallback > 0) return make_potential(c.model, fallback);
  return make_potential(c.model);
}

double resolve_coupling(const RunConfig& c, const Potential& w, const std::string& fallback) {
  const std::string s = c.coupling.empty() ? fallback : c.coupling;
  if (s.empty()) config_error(c.command + " needs --K");
  if (s == "subcritical") return 0.5 * k_sharp(w).value;
  if (s == "critical") return k_sharp(w).value;
  if (s == "supercritical") return 1.2 * k_sharp(w).value;
  std::size_t used = 0;
  double k = 0.0;
  try {
    k = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || !std::isfinite(k) || k < 0.0)
    config_error("K must be a non-negative number or subcritical|critical|supercritical, got '" + s + "'");
  return k;
}

struct Output {
  std::string dir;
  std::vector<std::string> files;

  std::string path(const std::string& name) {
    files.push_back(name);
    return (fs::path(dir) / name).string();
  }
  void text(const std::string& name, const std::string& content) { write_file_atomic(path(name), content); }
  void with(const std::string& name, const std::function<void(const std::string&)>& writer) {
    commit_file(path(name), writer);
  }
};

bool matches(Prediction p, Continuity c) {
  return (p == Prediction::Continuous && c == Continuity::Continuous) ||
         (p == Prediction::Discontinuous && c == Continuity::Discontinuous);
}

int cmd_thresholds(const RunConfig& c, Output& out, std::ostream& log) {
  const Potential w = build_potential(c);
  const int n = w.periodicity();
  const KSharp ks = k_sharp(w);
  const TransitionPrediction pred = predict_transition(w);
  json j;
  j["model"] = model_to_json(c.model);
  j["truncation"] = w.truncation();
  j["periodicity_n"] = n;
  j["K_sharp"] = ks.value;
  j["K_sharp_mode"] = ks.mode;
  j["K_sharp_certified"] = ks.certified;
  j["K_star"] = k_star(w, n);

  log << "model: " << c.model.label() << '\n';
  log << "periodicity n: " << n << '\n';
  log << "K_#: " << ks.value << " (mode " << ks.mode << (ks.certified ? ", certified" : ", uncertified") << ")\n";
  log << "K_*: " << j["K_star"].get<double>() << '\n';
  try {
    const DecayReport d = check_decay(w, n);
    j["decay"] = {{"passed", d.passed},
                  {"first_violation", d.first_violation ? json(*d.first_violation) : json(nullptr)},
                  {"checked_up_to", d.checked_up_to},
                  {"tail_certified", d.tail_certified},
                  {"min_margin", d.min_margin}};
    log << "decay (n=" << n << "): " << (d.passed ? "pass" : "fail");
    if (d.first_violation) log << " at k=" << *d.first_violation;
    log << ", checked to " << d.checked_up_to << ", tail " << (d.tail_certified ? "certified" : "uncertified") << '\n';
  } catch (const Error& e) {
    j["decay"] = {{"error", e.what()}};
    log << "decay: n/a (" << e.what() << ")\n";
  }
  if (c.model.model == Model::Transformer) {
    j["beta_star"] = beta_star();
    log << "beta_*: " << beta_star() << '\n';
  }
  if (c.model.model == Model::HegselmannKrause) {
    j["R_star"] = r_star();
    log << "R_*: " << r_star() << '\n';
  }
  j["prediction"] = prediction_name(pred.kind);
  j["prediction_reason"] = pred.reason;
  log << "predicted: " << prediction_name(pred.kind) << " (" << pred.reason << ")\n";
  out.text("thresholds.json", j.dump(2) + "\n");
  return kExitOk;
}

int cmd_scan(const RunConfig& c, Output& out, std::ostream& log) {
  const Potential w = build_potential(c);
  ScanOptions so;
  so.lo = c.lo;
  so.hi = c.hi;
  so.tol_k = c.tol_k;
  so.tol_f = c.tol_f;
  so.grid_size = c.grid;
  so.solve.tol = c.tol;
  so.threads = c.threads;
  const PhaseDiagram d = scan_kc(w, so);
  const TransitionPrediction pred = predict_transition(w);
  const bool ok = pred.kind == Prediction::None || matches(pred.kind, d.continuity);

  json j = json::parse(phase_diagram_json(d));
  j["model"] = model_to_json(c.model);
  j["prediction"] = prediction_name(pred.kind);
  j["prediction_reason"] = pred.reason;
  j["matches_prediction"] = pred.kind == Prediction::None ? json(nullptr) : json(ok);
  out.with("phase_diagram.csv", [&](const std::string& p) { write_phase_diagram_csv(d, p); });
  out.text("verdict.json", j.dump(2) + "\n");

  log << "model: " << c.model.label() << '\n';
  log << "K_c: " << d.k_c << " in [" << d.bracket_lo << ", " << d.bracket_hi << "]\n";
  log << "K_#: " << d.k_sharp << "  K_c - K_#: " << d.k_c - d.k_sharp << '\n';
  log << "continuity: " << continuity_name(d.continuity) << " (jump " << d.jump_estimate << ")\n";
  log << "predicted: " << prediction_name(pred.kind) << '\n';
  if (d.ambiguous_points > 0) log << "ambiguous K points: " << d.ambiguous_points << '\n';
  if (pred.kind != Prediction::None) log << "agreement: " << (ok ? "yes" : "NO") << '\n';
  return ok || c.no_assert ? kExitOk : kExitMismatch;
}

int cmd_minimize(const RunConfig& c, Output& out, std::ostream& log) {
  const Potential w = build_potential(c);
  const double k = resolve_coupling(c, w, "");
  SolveOptions so{0.5, c.tol, 40000, true, 5};
  const MinimizerResult r = find_minimizer(w, k, standard_seeds(w.periodicity(), c.grid), so, c.threads);
  const Index mode = k_sharp(w).mode;
  json j;
  j["model"] = model_to_json(c.model);
  j["K"] = k;
  j["free_energy"] = r.best.free_energy;
  j["best_gap"] = r.best_gap;
  j["order_parameter"] = r.order_parameter;
  j["mode"] = mode;
  j["residual"] = r.best.residual;
  j["seed"] = r.best.seed_id;
  j["n_seeds_converged"] = r.n_converged;
  j["ambiguous"] = r.ambiguous;
  json seeds = json::array();
  for (const auto& s : r.reports)
    seeds.push_back({{"seed", s.seed_id},
                     {"converged", s.converged},
                     {"free_energy", s.free_energy},
                     {"residual", s.residual},
                     {"iterations", s.iterations},
                     {"order_parameter", order_parameter(s.density, mode)}});
  j["seeds"] = seeds;
  out.with("minimizer.csv", [&](const std::string& p) { write_density_csv(r.best.density, p); });
  out.text("minimizer.json", j.dump(2) + "\n");
  log << "K: " << k << '\n';
  log << "F_K(min): " << r.best.free_energy << "  gap: " << r.best_gap << '\n';
  log << "order |q(" << mode << ")|: " << r.order_parameter << "  seed: " << r.best.seed_id << '\n';
  log << "seeds converged: " << r.n_converged << (r.ambiguous ? " (ambiguous)" : "") << '\n';
  return kExitOk;
}

int cmd_flow(const RunConfig& c, Output& out, std::ostream& log) {
  const Potential w = build_potential(c);
  const double k = resolve_coupling(c, w, "");
  const int n = w.periodicity();
  const SpectralGap gap = lambda_star(w, k, n);
  const Index mode = c.perturb_mode > 0 ? c.perturb_mode : gap.mode;
  const double eps = c.epsilon;
  const Density q0 = density_from_function(
      [&](double t) { return 1.0 + eps * std::cos(kTwoPi * static_cast<double>(mode) * t); }, c.grid);
  RecordPolicy policy;
  policy.modes = {mode};
  const double dt = c.dt > 0.0 ? c.dt : 1e-4;
  const double t_end = c.t_end > 0.0 ? c.t_end : 1.0;
  const FlowTrace tr = integrate(q0, w, k, t_end, dt, policy);

  json j;
  j["model"] = model_to_json(c.model);
  j["K"] = k;
  j["mode"] = mode;
  j["epsilon"] = eps;
  j["dt"] = dt;
  j["T"] = t_end;
  j["lambda_star"] = gap.value;
  j["lambda_star_mode"] = gap.mode;
  j["predicted_rate"] = 4.0 * kPi * kPi * gap.value;
  j["steps"] = tr.steps;
  j["stopped_early"] = tr.stopped_early;
  j["final_residual"] = tr.final_residual;
  log << "K: " << k << "  mode: " << mode << "  steps: " << tr.steps << (tr.stopped_early ? " (stationary)" : "")
      << '\n';
  log << "lambda_*: " << gap.value << " (mode " << gap.mode << "), rate 4 pi^2 lambda_*: " << 4.0 * kPi * kPi * gap.value
      << '\n';

  int code = kExitOk;
  if (c.fit != "none") {
    const RateModel model = c.fit == "exponential" ? RateModel::Exponential : RateModel::Algebraic;
    const RateFit f = fit_rate(tr, Observable::W2, model);
    j["fit"] = {{"model", rate_model_name(model)}, {"rate", f.rate},      {"exponent", f.exponent},
                {"r2", f.r2},                      {"t_lo", f.t_lo},      {"t_hi", f.t_hi},
                {"points", f.points}};
    if (model == RateModel::Exponential) {
      log << "fitted W2 rate: " << f.rate << " on [" << f.t_lo << ", " << f.t_hi << "], R^2 " << f.r2 << '\n';
      if (gap.value > 0.0) {
        const double rel = std::abs(f.rate / (4.0 * kPi * kPi * gap.value) - 1.0);
        j["fit"]["relative_error"] = rel;
        log << "relative error vs 4 pi^2 lambda_*: " << rel << '\n';
        if (rel > 0.05 && !c.no_assert) code = kExitMismatch;
      }
    } else {
      log << "fitted W2 exponent: " << f.exponent << " on [" << f.t_lo << ", " << f.t_hi << "], R^2 " << f.r2
          << '\n';
    }
  }
  out.with("flow_trace.csv", [&](const std::string& p) { write_flow_trace_csv(tr, p); });
  if (tr.terminal) out.text("terminal_density.json", density_to_json(*tr.terminal) + "\n");
  out.text("flow.json", j.dump(2) + "\n");
  return code;
}

int cmd_particles(const RunConfig& c, Output& out, std::ostream& log) {
  const Potential w = build_potential(c, 128);
  ChaosOptions o;
  o.k = resolve_coupling(c, w, "supercritical");
  o.n = c.particles;
  o.replicates = c.replicates;
  o.t_end = c.t_end > 0.0 ? c.t_end : 5.0;
  if (c.dt > 0.0) o.dt = c.dt;
  o.seed = c.seed;
  o.mode = c.drift == "pairwise_exact" ? DriftMode::PairwiseExact : DriftMode::FourierTruncated;
  o.pde_grid = c.grid;
  o.threads = c.threads;
  o.trajectory_records = c.trajectory_records;
  const ChaosReport r = chaos_check(w, o);
  const bool ok = std::abs(r.z) <= 3.0;

  json j;
  j["model"] = model_to_json(c.model);
  j["K"] = o.k;
  j["N"] = o.n;
  j["T"] = o.t_end;
  j["dt"] = o.dt;
  j["replicates"] = o.replicates;
  j["drift"] = drift_mode_name(o.mode);
  j["truncation"] = w.truncation();
  j["mode"] = r.mode;
  j["initial_law"] = r.initial_law;
  j["pde_order"] = r.pde_order;
  j["pde_order_sq"] = r.pde_order * r.pde_order;
  j["particle_sq_mean"] = r.particle_sq_mean;
  j["particle_sq_se"] = r.particle_sq_se;
  j["particle_abs_mean"] = r.particle_abs_mean;
  j["z"] = r.z;
  j["replicate_sq"] = r.replicate_sq;
  out.text("chaos.json", j.dump(2) + "\n");
  for (std::size_t i = 0; i < r.trajectories.size(); ++i)
    if (!r.trajectories[i].empty())
      out.with("trajectory_" + std::to_string(i) + ".csv", [&](const std::string& p) {
        write_trajectory_csv(r.trajectories[i], 4, p);
      });
  log << "K: " << o.k << "  N: " << o.n << "  replicates: " << o.replicates << "  T: " << o.t_end << "  dt: " << o.dt
      << '\n';
  log << "initial law: " << r.initial_law << '\n';
  log << "PDE |q(" << r.mode << ")|^2: " << r.pde_order * r.pde_order << "  particles: " << r.particle_sq_mean
      << " +- " << r.particle_sq_se << "  z: " << r.z << '\n';
  return ok || c.no_assert ? kExitOk : kExitMismatch;
}

json coercivity_model(const std::string& label, const ModelParams& p, int pairs, std::uint64_t seed, Index m) {
  const Potential w = make_potential(p);
  const int n = w.periodicity();
  const Normalized nw = normalize(w, n);
  const CoercivitySuite s = coercivity_suite(nw.potential, n, pairs, seed, m);
  return {{"model", label}, {"n", n}, {"pairs", s.pairs}, {"max_defect", s.max_defect}, {"worst_K", s.max_k},
          {"worst_seed", s.worst_seed}};
}

int cmd_verify(const RunConfig& c, Output& out, std::ostream& log) {
  const bool all = c.suite == "all";
  int failures = 0;
  if (all || c.suite == "inequality") {
    const GapSuite s = entropy_gap_suite(c.ns, c.samples, c.seed, 1024, c.threads);
    out.text("entropy_seminorm.json", gap_suite_json(s) + "\n");
    out.with("entropy_seminorm.csv", [&](const std::string& p) { write_gap_suite_csv(s, p); });
    log << "entropy-seminorm: " << s.samples.size() << " samples, " << s.violations << " violations, min gap "
        << s.min_gap << '\n';
    failures += s.violations;

    std::vector<double> cs;
    for (int i = 1; i <= 9; ++i) cs.push_back(0.1 * i);
    const auto ext = extremizer_suite(c.ns, cs, {0.0, 0.1234}, 2048);
    double worst_gap = 0.0, worst_closed = 0.0, worst_lm = 0.0;
    json rows = json::array();
    for (const auto& e : ext) {
      worst_gap = std::max(worst_gap, std::abs(e.gap));
      worst_closed = std::max(worst_closed, std::abs(e.entropy - e.closed_form));
      worst_lm = std::max(worst_lm, std::abs(e.lm_gap));
      rows.push_back({{"n", e.n}, {"c", e.c}, {"shift", e.shift}, {"entropy", e.entropy}, {"dual", e.dual},
                      {"closed_form", e.closed_form}, {"gap", e.gap}, {"lm_gap", e.lm_gap}});
    }
    out.text("extremizers.json", json{{"max_abs_gap", worst_gap},
                                      {"max_closed_form_error", worst_closed},
                                      {"max_abs_lm_gap", worst_lm},
                                      {"rows", rows}}
                                         .dump(2) +
                                     "\n");
    log << "extremizers: max |gap| " << worst_gap << ", max |H - closed form| " << worst_closed
        << ", max |LM gap| " << worst_lm << '\n';
    if (worst_gap > 1e-8 || worst_closed > 1e-8 || worst_lm > 1e-8) ++failures;
  }
  if (all || c.suite == "lebedev_milin") {
    const GapSuite s = lebedev_milin_suite(c.ns, c.samples, c.seed, 1024, c.threads);
    out.text("lebedev_milin.json", gap_suite_json(s) + "\n");
    out.with("lebedev_milin.csv", [&](const std::string& p) { write_gap_suite_csv(s, p); });
    log << "lebedev-milin: " << s.samples.size() << " samples, " << s.violations << " violations, min gap "
        << s.min_gap << '\n';
    failures += s.violations;
  }
  if (all || c.suite == "coercivity") {
    json rows = json::array();
    rows.push_back(coercivity_model("doi_onsager", ModelParams::doi_onsager(), c.samples, c.seed, c.grid));
    rows.push_back(coercivity_model("transformer(1)", ModelParams::transformer(1.0), c.samples, c.seed, c.grid));
    rows.push_back(coercivity_model("transformer(3)", ModelParams::transformer(3.0), c.samples, c.seed, c.grid));
    rows.push_back(coercivity_model("hk(1)", ModelParams::hegselmann_krause(1.0), c.samples, c.seed, c.grid));
    rows.push_back(coercivity_model("hk(2.5)", ModelParams::hegselmann_krause(2.5), c.samples, c.seed, c.grid));
    rows.push_back(coercivity_model("log_gas", ModelParams::log_gas(), c.samples, c.seed, c.grid));
    for (const auto& r : rows) {
      log << "coercivity " << r["model"].get<std::string>() << ": max defect " << r["max_defect"].get<double>()
          << '\n';
      if (r["max_defect"].get<double>() > 1e-9) ++failures;
    }
    out.text("coercivity.json", rows.dump(2) + "\n");
  }
  log << "failures: " << failures << '\n';
  return failures == 0 || c.no_assert ? kExitOk : kExitMismatch;
}

void print_scalars(const json& j, const std::string& prefix, std::ostream& log) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const json& v = it.value();
    if (v.is_number() || v.is_string() || v.is_boolean())
      log << prefix << it.key() << " = " << v.dump() << '\n';
    else if (v.is_object() && it.key() != "config")
      print_scalars(v, prefix + it.key() + ".", log);
  }
}

int cmd_report(const RunConfig& c, std::ostream& log) {
  const fs::path dir(c.input);
  const json manifest = json::parse(read_file((dir / "manifest.json").string()));
  log << "command: " << manifest.at("command").get<std::string>() << "  version: "
      << manifest.at("version").get<std::string>() << '\n';
  log << "config: " << manifest.at("config").dump() << '\n';
  for (const auto& name : manifest.at("files")) {
    const std::string file = name.get<std::string>();
    if (fs::path(file).extension() != ".json") {
      log << file << '\n';
      continue;
    }
    const json j = json::parse(read_file((dir / file).string()));
    if (j.is_object()) {
      print_scalars(j, file + ": ", log);
    } else if (j.is_array()) {
      for (std::size_t i = 0; i < j.size(); ++i)
        if (j[i].is_object()) print_scalars(j[i], file + "[" + std::to_string(i) + "]: ", log);
    }
  }
  return kExitOk;
}

std::vector<std::uint64_t> run_seeds(const RunConfig& c) {
  if (c.command == "verify") return {c.seed};
  if (c.command != "particles") return {};
  std::vector<std::uint64_t> s{c.seed};
  for (int r = 0; r < c.replicates; ++r) s.push_back(replicate_seed(c.seed, r));
  return s;
}

}  // namespace

void RunConfig::validate() const {
  if (!kCommands.count(command)) config_error("unknown command '" + command + "'");
  if (!is_power_of_two(grid) || grid < 16) config_error("M must be a power of two >= 16");
  if (truncation < 0) config_error("truncation must be >= 0");
  if (!(tol > 0.0) || !(tol_k > 0.0) || !(tol_f > 0.0)) config_error("tolerances must be positive");
  if (dt < 0.0 || t_end < 0.0) config_error("dt and T must be positive (0 selects the default)");
  if (!(epsilon > 0.0 && epsilon < 1.0)) config_error("epsilon must be in (0, 1)");
  if (perturb_mode < 0) config_error("perturbation mode must be >= 0");
  if (lo && hi && !(*lo < *hi)) config_error("scan bracket needs lo < hi");
  if (fit != "none" && fit != "exponential" && fit != "algebraic") config_error("fit must be none|exponential|algebraic");
  if (drift != "fourier_truncated" && drift != "pairwise_exact")
    config_error("drift must be fourier_truncated|pairwise_exact");
  if (suite != "inequality" && suite != "lebedev_milin" && suite != "coercivity" && suite != "all")
    config_error("suite must be inequality|lebedev_milin|coercivity|all");
  if (particles < 1000) config_error("particles needs N >= 1000");
  if (replicates < 2) config_error("particles needs at least 2 replicates");
  if (samples < 1) config_error("samples must be >= 1");
  for (int n : ns)
    if (n < 0) config_error("n must be >= 0");
  if (threads < 0) config_error("threads must be >= 0");
  if (command == "report" && input.empty()) config_error("report needs an input directory");
}

std::string config_to_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["model"] = model_to_json(c.model);
  j["truncation"] = c.truncation;
  j["M"] = c.grid;
  j["K"] = c.coupling;
  j["dt"] = c.dt;
  j["T"] = c.t_end;
  j["tol"] = c.tol;
  j["tol_K"] = c.tol_k;
  j["tol_F"] = c.tol_f;
  j["lo"] = c.lo ? json(*c.lo) : json(nullptr);
  j["hi"] = c.hi ? json(*c.hi) : json(nullptr);
  j["no_assert"] = c.no_assert;
  j["fit"] = c.fit;
  j["epsilon"] = c.epsilon;
  j["perturb_mode"] = c.perturb_mode;
  j["N"] = c.particles;
  j["replicates"] = c.replicates;
  j["drift"] = c.drift;
  j["trajectory_records"] = c.trajectory_records;
  j["suite"] = c.suite;
  j["n"] = c.ns;
  j["samples"] = c.samples;
  j["input"] = c.input;
  j["out"] = c.out_dir;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  return j.dump(2);
}

RunConfig config_from_json(const std::string& text) {
  static const std::set<std::string> keys{"command", "model",   "truncation", "M",          "K",
                                          "dt",      "T",       "tol",        "tol_K",      "tol_F",
                                          "lo",      "hi",      "no_assert",  "fit",        "epsilon",
                                          "perturb_mode", "N",  "replicates", "drift",      "trajectory_records",
                                          "suite",   "n",       "samples",    "input",      "out",
                                          "seed",    "threads"};
  RunConfig c;
  try {
    const json j = json::parse(text);
    if (!j.is_object()) config_error("config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
      if (!keys.count(it.key())) config_error("unknown config key '" + it.key() + "'");
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key) && !j.at(key).is_null()) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("command", c.command);
    if (j.contains("model")) c.model = model_from_json(j.at("model"));
    get("truncation", c.truncation);
    get("M", c.grid);
    get("K", c.coupling);
    get("dt", c.dt);
    get("T", c.t_end);
    get("tol", c.tol);
    get("tol_K", c.tol_k);
    get("tol_F", c.tol_f);
    if (j.contains("lo") && !j.at("lo").is_null()) c.lo = j.at("lo").get<double>();
    if (j.contains("hi") && !j.at("hi").is_null()) c.hi = j.at("hi").get<double>();
    get("no_assert", c.no_assert);
    get("fit", c.fit);
    get("epsilon", c.epsilon);
    get("perturb_mode", c.perturb_mode);
    get("N", c.particles);
    get("replicates", c.replicates);
    get("drift", c.drift);
    get("trajectory_records", c.trajectory_records);
    get("suite", c.suite);
    get("n", c.ns);
    get("samples", c.samples);
    get("input", c.input);
    get("out", c.out_dir);
    get("seed", c.seed);
    get("threads", c.threads);
  } catch (const json::exception& e) {
    config_error(std::string("config: ") + e.what());
  }
  return c;
}

std::string run_directory(const RunConfig& c) {
  if (!c.out_dir.empty()) return c.out_dir;
  RunConfig key = c;
  key.out_dir.clear();
  return (fs::path(output_root("")) / (c.command + "-" + content_hash(config_to_json(key)))).string();
}

int run(const RunConfig& c, std::ostream& log) {
  try {
    c.validate();
    if (c.command == "report") return cmd_report(c, log);
    Output out{run_directory(c), {}};
    ensure_directory(out.dir);
    int code = kExitOk;
    if (c.command == "thresholds") code = cmd_thresholds(c, out, log);
    else if (c.command == "scan") code = cmd_scan(c, out, log);
    else if (c.command == "minimize") code = cmd_minimize(c, out, log);
    else if (c.command == "flow") code = cmd_flow(c, out, log);
    else if (c.command == "particles") code = cmd_particles(c, out, log);
    else if (c.command == "verify") code = cmd_verify(c, out, log);
    write_manifest(out.dir, {c.command, config_to_json(c), run_seeds(c), resolve_threads(c.threads), out.files});
    log << "output: " << out.dir << '\n';
    return code;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::Config:
      case ErrorCode::BadParams:
      case ErrorCode::BracketNotStraddling:
      case ErrorCode::Io:
      case ErrorCode::NoAttractivePart:
      case ErrorCode::PeriodicityMismatch:
      case ErrorCode::ZeroLeadCoefficient:
      case ErrorCode::BadGridSize:
      case ErrorCode::TruncationTooCoarse:
        return kExitConfig;
      default:
        return kExitNumerical;
    }
  } catch (const json::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace circlept
