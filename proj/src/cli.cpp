#include "sheafdiff/cli.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sheafdiff/diffusion.hpp"
#include "sheafdiff/errors.hpp"
#include "sheafdiff/experiments.hpp"
#include "sheafdiff/seeding.hpp"
#include "sheafdiff/serialization.hpp"
#include "sheafdiff/spectral.hpp"

namespace sheafdiff {
namespace {

using nlohmann::json;

const std::map<std::string, GraphSpec::Kind> kGraphKinds{
    {"regular", GraphSpec::Kind::kRegular},
    {"erdos_renyi", GraphSpec::Kind::kErdosRenyi},
};

const std::map<std::string, SheafSpec::Kind> kSheafKinds{
    {"constant", SheafSpec::Kind::kConstant},
    {"random_restriction", SheafSpec::Kind::kRandomRestriction},
    {"matrix_weighted", SheafSpec::Kind::kMatrixWeighted},
};

const std::map<std::string, StepSizePolicy::Mode> kPolicyModes{
    {"fixed", StepSizePolicy::Mode::kFixed},
    {"auto", StepSizePolicy::Mode::kAuto},
    {"lipschitz", StepSizePolicy::Mode::kLipschitz},
};

struct GenerateArgs {
  GeneratorConfig gen;
  std::string potentials = "quadratic";
  std::string out;
};

struct SpectrumArgs {
  std::string sheaf;
  std::string eigenvalues;
};

struct DiffuseArgs {
  std::string sheaf;
  std::size_t delay_bound = 0;
  bool sync = false;
  std::optional<double> gamma;
  StepSizePolicy::Mode mode = StepSizePolicy::Mode::kAuto;
  double safety = 0.9;
  std::uint64_t seed = 0;
  double variance = 10.0;
  StoppingRule stop;
  std::string out;
};

struct ExperimentArgs {
  std::string id = "custom";
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> instances;
  std::vector<std::size_t> b_values;
  std::optional<double> variance;
  std::optional<StepSizePolicy::Mode> mode;
  std::optional<double> gamma;
  std::optional<std::size_t> max_ticks;
  std::optional<double> residual_tol;
  std::optional<std::size_t> record_every;
  bool average_distances = false;
  bool full_grid = false;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigurationError("cannot parse " + path + ": " + e.what());
  }
}

int run_generate(const GenerateArgs& args, std::ostream& out) {
  const GeneratedSheaf generated = generate(args.gen);
  PotentialSet potentials = PotentialSet::quadratic(generated.sheaf);
  if (args.potentials == "offset_quadratic") {
    const Cochain0 z = gaussian_initial_condition(
        generated.sheaf, 1.0, derive_seed(args.gen.seed, Stream::kPotential));
    potentials =
        PotentialSet::offset_quadratic(generated.sheaf, coboundary_apply(generated.sheaf, z));
  } else if (args.potentials != "quadratic") {
    throw ConfigurationError("potentials must be 'quadratic' or 'offset_quadratic'");
  }
  if (args.out.empty()) {
    out << sheaf_to_json(generated.sheaf, &potentials).dump(2) << '\n';
  } else {
    save_sheaf(args.out, generated.sheaf, &potentials);
  }
  return 0;
}

PotentialSet document_potentials(const SheafDocument& doc) {
  return doc.potentials ? *doc.potentials : PotentialSet::quadratic(doc.sheaf);
}

int run_spectrum(const SpectrumArgs& args, std::ostream& out) {
  const SheafDocument doc = load_sheaf(args.sheaf);
  const PotentialSet potentials = document_potentials(doc);
  const SpectralReport report = spectral_report(doc.sheaf, potentials);
  const CohomologyDims dims = cohomology_dims(doc.sheaf);

  out << std::setprecision(17);
  out << "vertices=" << doc.sheaf.graph().vertex_count() << '\n'
      << "edges=" << doc.sheaf.graph().edge_count() << '\n'
      << "c0_dim=" << doc.sheaf.c0_dim() << '\n'
      << "c1_dim=" << doc.sheaf.c1_dim() << '\n'
      << "h0=" << dims.h0 << '\n'
      << "h1=" << dims.h1 << '\n'
      << "lambda_max=" << report.lambda_max << '\n'
      << "sigma_max=" << report.sigma_max << '\n';
  if (report.lambda_2) {
    out << "lambda_2=" << *report.lambda_2 << '\n' << "sigma_2=" << *report.sigma_2 << '\n';
  } else {
    out << "lambda_2=none\nsigma_2=none\n";
  }
  out << "K=" << report.K << '\n' << "m=" << report.m << '\n';
  if (report.kappa) {
    out << "kappa=" << *report.kappa << '\n';
  } else {
    out << "kappa=none\n";
  }

  if (!args.eigenvalues.empty()) {
    std::ofstream csv(args.eigenvalues);
    if (!csv) throw ConfigurationError("cannot write " + args.eigenvalues);
    csv << std::setprecision(17) << "index,eigenvalue\n";
    for (Eigen::Index k = 0; k < report.eigenvalues.size(); ++k) {
      csv << k << ',' << report.eigenvalues(k) << '\n';
    }
  }
  return 0;
}

int run_diffuse(const DiffuseArgs& args, std::ostream& out) {
  const SheafDocument doc = load_sheaf(args.sheaf);
  const PotentialSet potentials = document_potentials(doc);
  const Cochain0 x0 = gaussian_initial_condition(doc.sheaf, args.variance,
                                                 derive_seed(args.seed, Stream::kInit));
  StepSizePolicy policy;
  if (args.gamma) {
    policy = StepSizePolicy::fixed(*args.gamma);
  } else {
    policy.mode = args.mode;
    policy.safety = args.safety;
    if (policy.mode == StepSizePolicy::Mode::kFixed) {
      throw ConfigurationError("--policy fixed needs --gamma");
    }
  }

  const DiffusionTrace trace =
      args.sync ? run_sync(doc.sheaf, potentials, x0, policy, args.stop)
                : run_async(doc.sheaf, potentials, x0, args.delay_bound, policy, args.stop,
                            derive_seed(args.seed, Stream::kSchedule));
  if (args.out.empty()) {
    write_trace_csv(out, trace);
    return 0;
  }
  write_trace_csv(args.out, trace);
  out << std::setprecision(17);
  out << "B=" << trace.delay_bound << '\n'
      << "gamma=" << trace.gamma << '\n'
      << "halvings=" << trace.halvings << '\n'
      << "converged=" << (trace.converged() ? "true" : "false") << '\n';
  if (trace.converged_at) out << "t_star=" << *trace.converged_at << '\n';
  out << "final_residual=" << trace.final_residual << '\n'
      << "max_staleness=" << trace.audit.max_staleness << '\n'
      << "max_update_gap=" << trace.audit.max_update_gap << '\n'
      << "audit_violations="
      << trace.audit.staleness_violations + trace.audit.gap_violations << '\n';
  if (auto fit = fit_contraction(trace)) {
    out << "rho=" << fit->rho << '\n' << "r_squared=" << fit->r_squared << '\n';
  }
  return 0;
}

int run_experiment_command(const ExperimentArgs& args, std::ostream& out) {
  ExperimentConfig config = default_config(args.id);
  if (!args.config.empty()) config = config_from_json(read_json(args.config), config);
  if (args.seed) config.seed = *args.seed;
  if (args.out) config.output_dir = *args.out;
  if (args.trials) config.trials = *args.trials;
  if (args.instances) config.instances = *args.instances;
  if (!args.b_values.empty()) config.b_values = args.b_values;
  if (args.full_grid) {
    config.b_values = {0};
    for (std::size_t e = 0; e <= 15; ++e) config.b_values.push_back(std::size_t{1} << e);
  }
  if (args.variance) config.variance = *args.variance;
  if (args.gamma) {
    config.policy = StepSizePolicy::fixed(*args.gamma);
  } else if (args.mode) {
    if (*args.mode == StepSizePolicy::Mode::kFixed) {
      throw ConfigurationError("--policy fixed needs --gamma");
    }
    config.policy.mode = *args.mode;
  }
  if (args.max_ticks) config.stop.max_ticks = *args.max_ticks;
  if (args.residual_tol) config.stop.residual_tol = *args.residual_tol;
  if (args.record_every) config.record_every = *args.record_every;
  if (args.average_distances) config.average_distances = true;
  // Round-trip so the same validation applies to flags and files.
  config = config_from_json(config_to_json(config), config);

  const ExperimentResult result = run_experiment(config);
  write_outputs(result);
  out << "output_dir=" << config.output_dir.string() << '\n'
      << "runs=" << result.trials.size() << '\n'
      << result.statistics.dump() << '\n';
  return 0;
}

void add_stopping_flags(CLI::App* cmd, StoppingRule& stop) {
  cmd->add_option("--max-ticks", stop.max_ticks, "Tick budget")->capture_default_str();
  cmd->add_option("--residual-tol", stop.residual_tol, "Stop when |L x| falls below this")
      ->capture_default_str();
  cmd->add_option("--record-every", stop.record_every, "Record one trace row every N ticks")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Asynchronous nonlinear sheaf diffusion", "sheafdiff"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate_cmd = app.add_subcommand("generate", "Generate a random sheaf document");
  generate_cmd->add_option("--graph", gen.gen.graph.kind, "regular | erdos_renyi")
      ->transform(CLI::CheckedTransformer(kGraphKinds, CLI::ignore_case));
  generate_cmd->add_option("--n", gen.gen.graph.n, "Vertex count")->capture_default_str();
  generate_cmd->add_option("--k", gen.gen.graph.k, "Degree of the regular graph")
      ->capture_default_str();
  generate_cmd->add_option("--p", gen.gen.graph.p, "Erdos-Renyi edge probability")
      ->capture_default_str();
  generate_cmd->add_option("--sheaf", gen.gen.sheaf.kind,
                           "constant | random_restriction | matrix_weighted")
      ->transform(CLI::CheckedTransformer(kSheafKinds, CLI::ignore_case));
  generate_cmd->add_option("--vertex-dim", gen.gen.sheaf.vertex_dim)->capture_default_str();
  generate_cmd->add_option("--edge-dim", gen.gen.sheaf.edge_dim)->capture_default_str();
  generate_cmd->add_option("--pd", gen.gen.sheaf.pd_probability,
                           "Probability of a positive definite weight")
      ->capture_default_str();
  generate_cmd->add_option("--potentials", gen.potentials, "quadratic | offset_quadratic")
      ->capture_default_str();
  generate_cmd->add_option("--seed", gen.gen.seed)->capture_default_str();
  generate_cmd->add_option("--out", gen.out, "Output file (stdout when omitted)");

  SpectrumArgs spec;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Spectral constants of a sheaf");
  spectrum_cmd->add_option("--sheaf", spec.sheaf, "Sheaf document")->required();
  spectrum_cmd->add_option("--eigenvalues", spec.eigenvalues, "Write all eigenvalues as CSV");

  DiffuseArgs diff;
  auto* diffuse_cmd = app.add_subcommand("diffuse", "Run sheaf diffusion on a sheaf document");
  diffuse_cmd->add_option("--sheaf", diff.sheaf, "Sheaf document")->required();
  diffuse_cmd->add_option("--B", diff.delay_bound, "Delay bound")->capture_default_str();
  diffuse_cmd->add_flag("--sync", diff.sync, "Synchronous iteration");
  diffuse_cmd->add_option("--gamma", diff.gamma, "Fixed step size");
  diffuse_cmd->add_option("--policy", diff.mode, "auto | lipschitz | fixed")
      ->transform(CLI::CheckedTransformer(kPolicyModes, CLI::ignore_case));
  diffuse_cmd->add_option("--safety", diff.safety)->capture_default_str();
  diffuse_cmd->add_option("--seed", diff.seed)->capture_default_str();
  diffuse_cmd->add_option("--variance", diff.variance, "Variance of x(0)")
      ->capture_default_str();
  diffuse_cmd->add_option("--out", diff.out, "Trace CSV (stdout when omitted)");
  add_stopping_flags(diffuse_cmd, diff.stop);

  ExperimentArgs exp;
  auto* experiment_cmd = app.add_subcommand("experiment", "Run an experiment sweep");
  experiment_cmd->add_option("--id", exp.id, "exp1 | exp2 | exp3 | exp4 | uav | custom")
      ->capture_default_str();
  experiment_cmd->add_option("--config", exp.config, "JSON config")->check(CLI::ExistingFile);
  experiment_cmd->add_option("--seed", exp.seed, "Master seed");
  experiment_cmd->add_option("--out", exp.out, "Output directory");
  experiment_cmd->add_option("--trials", exp.trials);
  experiment_cmd->add_option("--instances", exp.instances);
  experiment_cmd->add_option("--B", exp.b_values, "Delay bounds");
  experiment_cmd->add_flag("--full-grid", exp.full_grid, "B in {0, 1, 2, ..., 2^15}");
  experiment_cmd->add_option("--variance", exp.variance);
  experiment_cmd->add_option("--policy", exp.mode, "auto | lipschitz")
      ->transform(CLI::CheckedTransformer(kPolicyModes, CLI::ignore_case));
  experiment_cmd->add_option("--gamma", exp.gamma, "Fixed step size");
  experiment_cmd->add_option("--max-ticks", exp.max_ticks);
  experiment_cmd->add_option("--residual-tol", exp.residual_tol);
  experiment_cmd->add_option("--record-every", exp.record_every, "0 = once per B + 1 ticks");
  experiment_cmd->add_flag("--average-distances", exp.average_distances,
                           "Average per-trial distances instead of final iterates");

  ExperimentArgs uav;
  uav.id = "uav";
  auto* uav_cmd = app.add_subcommand("uav-demo", "Drive the UAV formation sheaf");
  uav_cmd->add_option("--B", uav.b_values, "Delay bound");
  uav_cmd->add_option("--seed", uav.seed, "Master seed");
  uav_cmd->add_option("--out", uav.out, "Output directory");
  uav_cmd->add_option("--variance", uav.variance);
  uav_cmd->add_option("--max-ticks", uav.max_ticks);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*generate_cmd) return run_generate(gen, out);
    if (*spectrum_cmd) return run_spectrum(spec, out);
    if (*diffuse_cmd) return run_diffuse(diff, out);
    if (*experiment_cmd) return run_experiment_command(exp, out);
    if (*uav_cmd) return run_experiment_command(uav, out);
  } catch (const StepSizeError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace sheafdiff
