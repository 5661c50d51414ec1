// circlept: phase transitions of mean-field free energies on the circle.

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "circlept/io.hpp"
#include "circlept/runner.hpp"

namespace {

struct Flags {
  std::string config;
  std::string model;
  std::optional<double> beta, radius, lo, hi, dt, t_end, tol, tol_k, tol_f, epsilon;
  std::vector<double> coefficients;
  std::optional<long> truncation, grid, perturb_mode, particles;
  std::optional<int> replicates, samples, threads, trajectory_records;
  std::optional<std::uint64_t> seed;
  std::string coupling, fit, drift, suite, out, input;
  std::vector<int> ns;
  bool no_assert = false;
};

void add_model(CLI::App* sub, Flags& f) {
  sub->add_option("model", f.model, "doi_onsager | transformer | hk | log_gas | custom");
  sub->add_option("--beta", f.beta, "transformer inverse temperature");
  sub->add_option("--R", f.radius, "Hegselmann-Krause confidence radius");
  sub->add_option("--coefficients", f.coefficients, "custom W^(1), W^(2), ...");
  sub->add_option("--truncation", f.truncation, "kernel truncation M_W");
  sub->add_option("-M,--grid", f.grid, "grid size (power of two)");
}

circlept::RunConfig assemble(const std::string& command, const Flags& f) {
  circlept::RunConfig c = f.config.empty() ? circlept::RunConfig{}
                                           : circlept::config_from_json(circlept::read_file(f.config));
  c.command = command;
  if (!f.model.empty()) c.model.model = circlept::parse_model(f.model);
  if (f.beta) c.model.beta = *f.beta;
  if (f.radius) c.model.radius = *f.radius;
  if (!f.coefficients.empty()) c.model.custom = f.coefficients;
  if (f.truncation) c.truncation = *f.truncation;
  if (f.grid) c.grid = *f.grid;
  if (!f.coupling.empty()) c.coupling = f.coupling;
  if (f.dt) c.dt = *f.dt;
  if (f.t_end) c.t_end = *f.t_end;
  if (f.tol) c.tol = *f.tol;
  if (f.tol_k) c.tol_k = *f.tol_k;
  if (f.tol_f) c.tol_f = *f.tol_f;
  if (f.lo) c.lo = f.lo;
  if (f.hi) c.hi = f.hi;
  if (f.no_assert) c.no_assert = true;
  if (!f.fit.empty()) c.fit = f.fit;
  if (f.epsilon) c.epsilon = *f.epsilon;
  if (f.perturb_mode) c.perturb_mode = *f.perturb_mode;
  if (f.particles) c.particles = *f.particles;
  if (f.replicates) c.replicates = *f.replicates;
  if (!f.drift.empty()) c.drift = f.drift;
  if (f.trajectory_records) c.trajectory_records = *f.trajectory_records;
  if (!f.suite.empty()) c.suite = f.suite;
  if (!f.ns.empty()) c.ns = f.ns;
  if (f.samples) c.samples = *f.samples;
  if (!f.input.empty()) c.input = f.input;
  if (!f.out.empty()) c.out_dir = f.out;
  if (f.seed) c.seed = *f.seed;
  if (f.threads) c.threads = *f.threads;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase transitions of mean-field free energies on the circle"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config, "JSON run config; flags override it");
  app.add_option("--out", f.out, "output directory (default: $CIRCLEPT_OUT/<command>-<hash>)");
  app.add_option("--threads", f.threads, "thread budget (0 = all cores)");
  app.add_option("--seed", f.seed, "rng seed");
  app.add_flag("--no-assert", f.no_assert, "exit 0 even when a check disagrees with the prediction");

  auto* thresholds = app.add_subcommand("thresholds", "K_#, K_*, decay check and predicted continuity");
  add_model(thresholds, f);

  auto* scan = app.add_subcommand("scan", "locate K_c and classify the transition");
  add_model(scan, f);
  scan->add_option("--lo", f.lo, "lower end of the K bracket");
  scan->add_option("--hi", f.hi, "upper end of the K bracket");
  scan->add_option("--tol-k", f.tol_k, "bracket width");
  scan->add_option("--tol-f", f.tol_f, "free-energy gap threshold");
  scan->add_option("--tol", f.tol, "fixed-point tolerance");

  auto* minimize = app.add_subcommand("minimize", "multistart minimizer of F_K");
  add_model(minimize, f);
  minimize->add_option("--K", f.coupling, "coupling (number or subcritical|critical|supercritical)")->required();
  minimize->add_option("--tol", f.tol, "fixed-point tolerance");

  auto* flow = app.add_subcommand("flow", "McKean-Vlasov flow from a perturbed uniform state");
  add_model(flow, f);
  flow->add_option("--K", f.coupling, "coupling (number or subcritical|critical|supercritical)")->required();
  flow->add_option("--dt", f.dt, "time step (default 1e-4)");
  flow->add_option("--T", f.t_end, "final time (default 1)");
  flow->add_option("--fit", f.fit, "none | exponential | algebraic");
  flow->add_option("--epsilon", f.epsilon, "perturbation amplitude (default 1e-2)");
  flow->add_option("--mode", f.perturb_mode, "perturbed mode (default: spectral-gap mode)");

  auto* particles = app.add_subcommand("particles", "particle system against the mean-field PDE");
  add_model(particles, f);
  particles->add_option("--K", f.coupling, "coupling (default supercritical = 1.2 K_#)");
  particles->add_option("--N", f.particles, "particles per replicate");
  particles->add_option("--replicates", f.replicates, "independent replicates");
  particles->add_option("--T", f.t_end, "final time (default 5)");
  particles->add_option("--dt", f.dt, "Euler-Maruyama step (<= 1e-3)");
  particles->add_option("--drift", f.drift, "fourier_truncated | pairwise_exact");
  particles->add_option("--records", f.trajectory_records, "trajectory rows per replicate");

  auto* verify = app.add_subcommand("verify", "randomized inequality and identity suites");
  verify->add_option("--suite", f.suite, "inequality | lebedev_milin | coercivity | all");
  verify->add_option("--n", f.ns, "symmetry orders n");
  verify->add_option("--samples", f.samples, "samples per n (pairs per model for coercivity)");
  verify->add_option("-M,--grid", f.grid, "grid size for coercivity samples");

  auto* report = app.add_subcommand("report", "summarize a run directory");
  report->add_option("dir", f.input, "run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    const circlept::RunConfig c = assemble(command, f);
    return circlept::run(c, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return circlept::kExitConfig;
  }
}
