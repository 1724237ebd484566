#include "sheafdiff/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "sheafdiff/errors.hpp"
#include "sheafdiff/seeding.hpp"
#include "sheafdiff/serialization.hpp"
#include "sheafdiff/spectral.hpp"

namespace sheafdiff {
namespace {

using nlohmann::json;

const std::map<std::string, GraphSpec::Kind> kGraphKinds{
    {"regular", GraphSpec::Kind::kRegular},
    {"erdos_renyi", GraphSpec::Kind::kErdosRenyi},
    {"explicit", GraphSpec::Kind::kExplicit},
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

template <typename Enum>
std::string name_of(const std::map<std::string, Enum>& names, Enum value) {
  for (const auto& [name, v] : names) {
    if (v == value) return name;
  }
  throw ConfigurationError("unnamed enumerator");
}

template <typename Enum>
Enum parse_name(const std::map<std::string, Enum>& names, const std::string& name,
                const char* what) {
  auto it = names.find(name);
  if (it == names.end()) {
    throw ConfigurationError(std::string("unknown ") + what + " '" + name + "'");
  }
  return it->second;
}

json sheaf_spec_to_json(const SheafSpec& spec) {
  return {{"kind", name_of(kSheafKinds, spec.kind)},
          {"vertex_dim", spec.vertex_dim},
          {"edge_dim", spec.edge_dim},
          {"pd_probability", spec.pd_probability}};
}

SheafSpec sheaf_spec_from_json(const json& doc, SheafSpec spec) {
  if (doc.contains("kind")) {
    spec.kind = parse_name(kSheafKinds, doc.at("kind").get<std::string>(), "sheaf kind");
  }
  spec.vertex_dim = doc.value("vertex_dim", spec.vertex_dim);
  spec.edge_dim = doc.value("edge_dim", spec.edge_dim);
  spec.pd_probability = doc.value("pd_probability", spec.pd_probability);
  return spec;
}

std::vector<std::size_t> geometric_grid(std::size_t max_exponent) {
  std::vector<std::size_t> grid{0};
  for (std::size_t e = 0; e <= max_exponent; ++e) grid.push_back(std::size_t{1} << e);
  return grid;
}

void validate(const ExperimentConfig& config) {
  if (config.trials < 1) throw ConfigurationError("trials must be >= 1");
  if (config.instances < 1) throw ConfigurationError("instances must be >= 1");
  if (config.b_values.empty()) throw ConfigurationError("B_values must be non-empty");
  if (config.sheaves.empty()) throw ConfigurationError("at least one sheaf spec is required");
  if (!(config.variance > 0.0)) throw ConfigurationError("variance must be > 0");
  if (config.potentials != "quadratic" && config.potentials != "offset_quadratic") {
    throw ConfigurationError("potentials must be 'quadratic' or 'offset_quadratic'");
  }
  if (config.policy.mode == StepSizePolicy::Mode::kFixed && !(config.policy.gamma > 0.0)) {
    throw ConfigurationError("fixed step policy needs gamma > 0");
  }
}

std::string padded(std::size_t value, int width) {
  std::ostringstream out;
  out << std::setw(width) << std::setfill('0') << value;
  return out.str();
}

std::uint64_t schedule_seed(std::uint64_t master, std::size_t delay_bound, std::size_t trial) {
  return derive_seed(derive_seed(master, Stream::kSchedule, delay_bound), Stream::kSchedule,
                     trial);
}

PotentialSet make_potentials(const ExperimentConfig& config, const CellularSheaf& sheaf,
                             std::uint64_t seed) {
  if (config.potentials == "quadratic") return PotentialSet::quadratic(sheaf);
  // Offsets drawn as delta z so that the minimizers form a shifted section space.
  const Cochain0 z = gaussian_initial_condition(sheaf, 1.0, seed);
  return PotentialSet::offset_quadratic(sheaf, coboundary_apply(sheaf, z));
}

StoppingRule stopping_for(const ExperimentConfig& config, std::size_t delay_bound) {
  StoppingRule stop = config.stop;
  stop.record_every = config.record_every == 0 ? delay_bound + 1 : config.record_every;
  return stop;
}

struct RunOutcome {
  TrialSummary summary;
  std::optional<DiffusionTrace> trace;
};

RunOutcome run_one(const ExperimentConfig& config, const CellularSheaf& sheaf,
                   const PotentialSet& potentials, const MinimizerSet* minimizers,
                   const Cochain0& x0, std::size_t delay_bound, std::uint64_t seed,
                   std::string label, std::size_t trial) {
  RunOutcome out;
  TrialSummary& s = out.summary;
  s.label = std::move(label);
  s.delay_bound = delay_bound;
  s.trial = trial;
  try {
    DiffusionTrace trace = run_async(sheaf, potentials, x0, delay_bound, config.policy,
                                     stopping_for(config, delay_bound), seed, config.mixture);
    s.converged = trace.converged();
    s.t_star = trace.converged_at;
    s.fit = fit_contraction(trace);
    s.gamma = trace.gamma;
    s.final_residual = trace.final_residual;
    if (minimizers) s.final_distance = (trace.final_state - minimizers->project(x0)).norm();
    if (minimizers && !minimizers->offset_in_image) {
      s.note = "offset outside image(delta); least-squares minimizer set";
    }
    if (!s.converged) s.note = "not converged within max_ticks";
    if (!trace.audit.clean()) s.note = "partial-asynchrony audit violated";
    out.trace = std::move(trace);
  } catch (const StepSizeError& e) {
    s.diverged = true;
    s.note = e.what();
  }
  return out;
}

void collect(ExperimentResult& result, RunOutcome outcome, std::string trace_name) {
  if (outcome.trace) result.traces.push_back({std::move(trace_name), std::move(*outcome.trace)});
  result.trials.push_back(std::move(outcome.summary));
}

json optional_number(double value) {
  return std::isfinite(value) ? json(value) : json(nullptr);
}

std::vector<double> fitted_rhos(const std::vector<TrialSummary>& trials) {
  std::vector<double> rhos;
  for (const auto& t : trials) {
    if (t.fit) rhos.push_back(t.fit->rho);
  }
  return rhos;
}

Graph experiment_graph(const ExperimentConfig& config, std::uint64_t index = 0) {
  return generate_graph(config.graph, derive_seed(config.seed, Stream::kGraph, index));
}

}  // namespace

ExperimentConfig default_config(const std::string& id) {
  ExperimentConfig c;
  c.id = id;
  SheafSpec rand14;
  rand14.kind = SheafSpec::Kind::kRandomRestriction;
  rand14.vertex_dim = 4;
  rand14.edge_dim = 1;

  if (id == "exp1") {
    SheafSpec constant{SheafSpec::Kind::kConstant, 4, 4, 0.2};
    SheafSpec weighted{SheafSpec::Kind::kMatrixWeighted, 4, 4, 0.2};
    c.sheaves = {constant, rand14, weighted};
    c.b_values = {0, 10, 50, 200};
    c.stop.max_ticks = 50'000'000;
  } else if (id == "exp2") {
    c.sheaves = {rand14};
    c.b_values = {50};
    c.trials = 100;
    c.policy = StepSizePolicy::lipschitz();
    c.stop.max_ticks = 5'000'000;
  } else if (id == "exp3") {
    c.sheaves = {rand14};
    c.b_values = geometric_grid(10);
    c.trials = 3;
    c.policy = StepSizePolicy::lipschitz();
    c.stop.max_ticks = 20'000'000;
  } else if (id == "exp4") {
    c.graph.kind = GraphSpec::Kind::kErdosRenyi;
    c.graph.p = 0.3;
    c.sheaves = {rand14};
    c.b_values = {50};
    c.instances = 30;
    c.policy = StepSizePolicy::lipschitz();
    c.stop.max_ticks = 20'000'000;
  } else if (id == "uav") {
    c.graph.kind = GraphSpec::Kind::kExplicit;
    c.graph.n = 6;
    c.graph.edges = {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}, {0, 3}};
    c.sheaves = {SheafSpec{SheafSpec::Kind::kConstant, 6, 3, 0.2}};
    c.potentials = "offset_quadratic";
    c.b_values = {20};
    c.stop.max_ticks = 20'000'000;
    c.stop.residual_tol = 1e-9;
  } else if (id == "custom") {
    c.sheaves = {rand14};
  } else {
    throw ConfigurationError("unknown experiment id '" + id + "'");
  }
  c.output_dir = "out/" + id;
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json graph = {{"kind", name_of(kGraphKinds, c.graph.kind)},
                {"n", c.graph.n},
                {"k", c.graph.k},
                {"p", c.graph.p}};
  if (c.graph.kind == GraphSpec::Kind::kExplicit) {
    json edges = json::array();
    for (const auto& [u, v] : c.graph.edges) edges.push_back({u, v});
    graph["edges"] = edges;
  }
  json sheaves = json::array();
  for (const auto& s : c.sheaves) sheaves.push_back(sheaf_spec_to_json(s));

  json policy = {{"mode", name_of(kPolicyModes, c.policy.mode)},
                 {"safety", c.policy.safety},
                 {"max_halvings", c.policy.max_halvings}};
  if (c.policy.mode == StepSizePolicy::Mode::kFixed) policy["gamma"] = c.policy.gamma;

  return {
      {"id", c.id},
      {"graph", graph},
      {"sheaf", sheaves},
      {"potentials", {{"kind", c.potentials}}},
      {"schedule",
       {{"B_values", c.b_values},
        {"update_fast", c.mixture.update_fast},
        {"update_slow", c.mixture.update_slow},
        {"broadcast_fast", c.mixture.broadcast_fast},
        {"broadcast_slow", c.mixture.broadcast_slow},
        {"sd_scale", c.mixture.sd_scale}}},
      {"run",
       {{"trials", c.trials},
        {"instances", c.instances},
        {"variance", c.variance},
        {"step", policy},
        {"max_ticks", c.stop.max_ticks},
        {"residual_tol", c.stop.residual_tol},
        {"record_every", c.record_every},
        {"average_distances", c.average_distances},
        {"seed", c.seed},
        {"output_dir", c.output_dir.string()}}},
  };
}

ExperimentConfig config_from_json(const json& doc, ExperimentConfig c) {
  try {
    if (!doc.is_object()) throw ConfigurationError("config document must be an object");
    if (doc.contains("id")) {
      const auto id = doc.at("id").get<std::string>();
      if (id != c.id) c = default_config(id);
    }
    if (doc.contains("graph")) {
      const json& g = doc.at("graph");
      if (g.contains("kind")) {
        c.graph.kind = parse_name(kGraphKinds, g.at("kind").get<std::string>(), "graph kind");
      }
      c.graph.n = g.value("n", c.graph.n);
      c.graph.k = g.value("k", c.graph.k);
      c.graph.p = g.value("p", c.graph.p);
      if (g.contains("edges")) {
        c.graph.edges.clear();
        for (const auto& e : g.at("edges")) {
          c.graph.edges.emplace_back(e.at(0).get<VertexId>(), e.at(1).get<VertexId>());
        }
      }
    }
    if (doc.contains("sheaf")) {
      const json& s = doc.at("sheaf");
      if (s.is_array()) {
        std::vector<SheafSpec> specs;
        for (const auto& entry : s) specs.push_back(sheaf_spec_from_json(entry, SheafSpec{}));
        c.sheaves = std::move(specs);
      } else {
        c.sheaves = {sheaf_spec_from_json(s, c.sheaves.empty() ? SheafSpec{} : c.sheaves[0])};
      }
    }
    if (doc.contains("potentials")) {
      const json& p = doc.at("potentials");
      c.potentials = p.is_string() ? p.get<std::string>() : p.value("kind", c.potentials);
    }
    if (doc.contains("schedule")) {
      const json& s = doc.at("schedule");
      if (s.contains("B_values")) c.b_values = s.at("B_values").get<std::vector<std::size_t>>();
      c.mixture.update_fast = s.value("update_fast", c.mixture.update_fast);
      c.mixture.update_slow = s.value("update_slow", c.mixture.update_slow);
      c.mixture.broadcast_fast = s.value("broadcast_fast", c.mixture.broadcast_fast);
      c.mixture.broadcast_slow = s.value("broadcast_slow", c.mixture.broadcast_slow);
      c.mixture.sd_scale = s.value("sd_scale", c.mixture.sd_scale);
    }
    if (doc.contains("run")) {
      const json& r = doc.at("run");
      c.trials = r.value("trials", c.trials);
      c.instances = r.value("instances", c.instances);
      c.variance = r.value("variance", c.variance);
      if (r.contains("step")) {
        const json& s = r.at("step");
        if (s.contains("mode")) {
          c.policy.mode = parse_name(kPolicyModes, s.at("mode").get<std::string>(), "step mode");
        }
        c.policy.gamma = s.value("gamma", c.policy.gamma);
        c.policy.safety = s.value("safety", c.policy.safety);
        c.policy.max_halvings = s.value("max_halvings", c.policy.max_halvings);
        if (c.policy.mode == StepSizePolicy::Mode::kFixed) c.policy.max_halvings = 0;
      }
      c.stop.max_ticks = r.value("max_ticks", c.stop.max_ticks);
      c.stop.residual_tol = r.value("residual_tol", c.stop.residual_tol);
      c.record_every = r.value("record_every", c.record_every);
      c.average_distances = r.value("average_distances", c.average_distances);
      c.seed = r.value("seed", c.seed);
      if (r.contains("output_dir")) c.output_dir = r.at("output_dir").get<std::string>();
    }
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("malformed config: ") + e.what());
  }
  validate(c);
  return c;
}

UavDisplacements default_uav_displacements() {
  return {Eigen::Vector3d(1.0, 1.0, 0.0), Eigen::Vector3d(1.0, -1.0, 0.0),
          Eigen::Vector3d(-1.0, 1.0, 0.5), Eigen::Vector3d(-1.0, -1.0, 0.5)};
}

ExperimentResult run_experiment1(const ExperimentConfig& config) {
  validate(config);
  ExperimentResult result{config, {}, {}, json::object()};
  const Graph graph = experiment_graph(config);
  json per_kind = json::object();

  for (std::size_t k = 0; k < config.sheaves.size(); ++k) {
    const SheafSpec& spec = config.sheaves[k];
    const std::string kind = name_of(kSheafKinds, spec.kind);
    const CellularSheaf sheaf =
        generate_sheaf(graph, spec, derive_seed(config.seed, Stream::kSheaf, k)).sheaf;
    const PotentialSet potentials =
        make_potentials(config, sheaf, derive_seed(config.seed, Stream::kPotential, k));
    const MinimizerSet minimizers = energy_minimum(sheaf, potentials);
    const Cochain0 x0 = gaussian_initial_condition(sheaf, config.variance,
                                                   derive_seed(config.seed, Stream::kInit, k));

    std::vector<double> bs, t_stars;
    json rows = json::array();
    for (std::size_t b : config.b_values) {
      RunOutcome run = run_one(config, sheaf, potentials, &minimizers, x0, b,
                               schedule_seed(config.seed, b, 0), kind, 0);
      const TrialSummary& s = run.summary;
      if (s.t_star) {
        bs.push_back(static_cast<double>(b));
        t_stars.push_back(static_cast<double>(*s.t_star));
      }
      rows.push_back({{"B", b},
                      {"t_star", s.t_star ? json(*s.t_star) : json(nullptr)},
                      {"rho", s.fit ? json(s.fit->rho) : json(nullptr)}});
      collect(result, std::move(run), kind + "_B" + padded(b, 4));
    }
    bool monotone = true;
    for (std::size_t i = 1; i < t_stars.size(); ++i) monotone &= t_stars[i] >= t_stars[i - 1];
    per_kind[kind] = {{"rows", rows},
                      {"spearman_B_t_star", optional_number(spearman(bs, t_stars))},
                      {"t_star_monotone_in_B", monotone}};
  }
  result.statistics["kinds"] = per_kind;
  return result;
}

ExperimentResult run_experiment2(const ExperimentConfig& config) {
  validate(config);
  ExperimentResult result{config, {}, {}, json::object()};
  const Graph graph = experiment_graph(config);
  const CellularSheaf sheaf =
      generate_sheaf(graph, config.sheaves.front(), derive_seed(config.seed, Stream::kSheaf))
          .sheaf;
  const PotentialSet potentials =
      make_potentials(config, sheaf, derive_seed(config.seed, Stream::kPotential));
  const MinimizerSet minimizers = energy_minimum(sheaf, potentials);
  const std::size_t b = config.b_values.front();

  std::size_t converged = 0;
  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    const Cochain0 x0 = gaussian_initial_condition(
        sheaf, config.variance, derive_seed(config.seed, Stream::kInit, trial));
    RunOutcome run = run_one(config, sheaf, potentials, &minimizers, x0, b,
                             schedule_seed(config.seed, b, trial), "trial", trial);
    if (run.summary.converged) ++converged;
    collect(result, std::move(run), "trial" + padded(trial, 3) + "_B" + padded(b, 4));
  }
  const std::vector<double> rhos = fitted_rhos(result.trials);
  bool all_below_one = rhos.size() == result.trials.size();
  for (double r : rhos) all_below_one &= r < 1.0;
  result.statistics = {
      {"B", b},
      {"converged", converged},
      {"trials", config.trials},
      {"all_rho_below_one", all_below_one},
      {"rho_median", rhos.empty() ? json(nullptr) : json(median(rhos))},
      {"rho_iqr", rhos.empty() ? json(nullptr) : json(interquartile_range(rhos))},
  };
  return result;
}

ExperimentResult run_experiment3(const ExperimentConfig& config) {
  validate(config);
  ExperimentResult result{config, {}, {}, json::object()};
  const Graph graph = experiment_graph(config);
  const CellularSheaf sheaf =
      generate_sheaf(graph, config.sheaves.front(), derive_seed(config.seed, Stream::kSheaf))
          .sheaf;
  const PotentialSet potentials =
      make_potentials(config, sheaf, derive_seed(config.seed, Stream::kPotential));
  const MinimizerSet minimizers = energy_minimum(sheaf, potentials);
  const Cochain0 x0 =
      gaussian_initial_condition(sheaf, config.variance, derive_seed(config.seed, Stream::kInit));
  const Cochain0 target = minimizers.project(x0);

  std::vector<double> bs, distances;
  json rows = json::array();
  json finals = json::array();
  for (std::size_t b : config.b_values) {
    Cochain0 sum = Cochain0::Zero(x0.size());
    double distance_sum = 0.0;
    double max_residual = 0.0;
    std::size_t finished = 0;
    bool all_converged = true;
    for (std::size_t trial = 0; trial < config.trials; ++trial) {
      RunOutcome run = run_one(config, sheaf, potentials, &minimizers, x0, b,
                               schedule_seed(config.seed, b, trial), "B", trial);
      all_converged &= run.summary.converged;
      if (run.trace) {
        sum += run.trace->final_state;
        distance_sum += run.summary.final_distance;
        max_residual = std::max(max_residual, run.trace->final_residual);
        finals.push_back({{"B", b},
                          {"trial", trial},
                          {"state", std::vector<double>(run.trace->final_state.begin(),
                                                        run.trace->final_state.end())}});
        ++finished;
      }
      collect(result, std::move(run), "B" + padded(b, 5) + "_trial" + padded(trial, 2));
    }
    double distance = std::numeric_limits<double>::quiet_NaN();
    if (finished > 0) {
      const double n = static_cast<double>(finished);
      distance = config.average_distances ? distance_sum / n : (sum / n - target).norm();
      bs.push_back(static_cast<double>(b));
      distances.push_back(distance);
    }
    rows.push_back({{"B", b},
                    {"distance", optional_number(distance)},
                    {"max_final_residual", max_residual},
                    {"all_converged", all_converged}});
  }
  result.statistics = {
      {"averaging", config.average_distances ? "distances" : "iterates"},
      {"rows", rows},
      {"spearman_B_distance", optional_number(spearman(bs, distances))},
      {"projection", std::vector<double>(target.begin(), target.end())},
      {"final_iterates", finals},
  };
  return result;
}

ExperimentResult run_experiment4(const ExperimentConfig& config) {
  validate(config);
  ExperimentResult result{config, {}, {}, json::object()};
  const std::size_t b = config.b_values.front();
  std::vector<double> lambdas, t_stars;
  std::size_t excluded = 0;

  for (std::size_t inst = 0; inst < config.instances; ++inst) {
    const Graph graph = experiment_graph(config, inst);
    const CellularSheaf sheaf =
        generate_sheaf(graph, config.sheaves.front(),
                       derive_seed(config.seed, Stream::kSheaf, inst))
            .sheaf;
    const PotentialSet potentials =
        make_potentials(config, sheaf, derive_seed(config.seed, Stream::kPotential, inst));
    const MinimizerSet minimizers = energy_minimum(sheaf, potentials);
    const SpectralReport report = spectrum(sheaf);
    const Cochain0 x0 = gaussian_initial_condition(sheaf, config.variance,
                                                   derive_seed(config.seed, Stream::kInit, inst));

    RunOutcome run = run_one(config, sheaf, potentials, &minimizers, x0, b,
                             schedule_seed(config.seed, b, inst), "instance", inst);
    TrialSummary& s = run.summary;
    s.lambda_2 = report.lambda_2;
    if (!sheaf.graph().is_connected()) {
      s.excluded = true;
      s.note = "disconnected graph (" + std::to_string(sheaf.graph().component_count()) +
               " components)";
    } else if (!report.lambda_2) {
      s.excluded = true;
      s.note = "Laplacian has no nonzero eigenvalue";
    } else if (!s.t_star) {
      s.excluded = true;
      if (s.note.empty()) s.note = "no convergence time";
    }
    if (s.excluded) {
      ++excluded;
    } else {
      lambdas.push_back(*s.lambda_2);
      t_stars.push_back(static_cast<double>(*s.t_star));
    }
    collect(result, std::move(run), "instance" + padded(inst, 3) + "_B" + padded(b, 4));
  }
  result.statistics = {
      {"B", b},
      {"instances", config.instances},
      {"included", lambdas.size()},
      {"excluded", excluded},
      {"spearman_lambda2_t_star", optional_number(spearman(lambdas, t_stars))},
  };
  return result;
}

ExperimentResult run_uav_demo(const ExperimentConfig& config) {
  validate(config);
  ExperimentResult result{config, {}, {}, json::object()};
  const UavDisplacements targets = default_uav_displacements();
  const UavFormation formation = uav_formation_sheaf(targets);
  const Cochain0 x0 = gaussian_initial_condition(formation.sheaf, config.variance,
                                                 derive_seed(config.seed, Stream::kInit));
  const MinimizerSet minimizers = energy_minimum(formation.sheaf, formation.potentials);
  const std::size_t b = config.b_values.front();
  RunOutcome run = run_one(config, formation.sheaf, formation.potentials, &minimizers, x0, b,
                           schedule_seed(config.seed, b, 0), "uav", 0);

  if (run.trace) {
    const Cochain0& x = run.trace->final_state;
    auto position = [&](VertexId i) -> Eigen::Vector3d { return x.segment<3>(6 * i); };
    auto velocity = [&](VertexId i) -> Eigen::Vector3d { return x.segment<3>(6 * i + 3); };
    const std::pair<VertexId, VertexId> leader_follower[] = {{0, 1}, {0, 2}, {3, 4}, {3, 5}};
    json offsets = json::array();
    double worst = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      const auto [leader, follower] = leader_follower[k];
      const double err = (position(leader) - position(follower) - targets[k]).norm();
      worst = std::max(worst, err);
      offsets.push_back({{"edge", {leader + 1, follower + 1}}, {"error", err}});
    }
    result.statistics = {
        {"final_energy", dirichlet_energy(formation.sheaf, formation.potentials, x)},
        {"formation_errors", offsets},
        {"max_formation_error", worst},
        {"leader_velocity_gap", (velocity(0) - velocity(3)).norm()},
    };
  }
  collect(result, std::move(run), "uav_B" + padded(b, 4));
  return result;
}

ExperimentResult run_custom(const ExperimentConfig& config) {
  validate(config);
  ExperimentResult result{config, {}, {}, json::object()};
  const Graph graph = experiment_graph(config);
  const CellularSheaf sheaf =
      generate_sheaf(graph, config.sheaves.front(), derive_seed(config.seed, Stream::kSheaf))
          .sheaf;
  const PotentialSet potentials =
      make_potentials(config, sheaf, derive_seed(config.seed, Stream::kPotential));
  const MinimizerSet minimizers = energy_minimum(sheaf, potentials);
  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    const Cochain0 x0 = gaussian_initial_condition(
        sheaf, config.variance, derive_seed(config.seed, Stream::kInit, trial));
    for (std::size_t b : config.b_values) {
      RunOutcome run = run_one(config, sheaf, potentials, &minimizers, x0, b,
                               schedule_seed(config.seed, b, trial), "custom", trial);
      collect(result, std::move(run), "B" + padded(b, 5) + "_trial" + padded(trial, 3));
    }
  }
  const std::vector<double> rhos = fitted_rhos(result.trials);
  if (!rhos.empty()) {
    result.statistics = {{"rho_median", median(rhos)}, {"rho_iqr", interquartile_range(rhos)}};
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.id == "exp1") return run_experiment1(config);
  if (config.id == "exp2") return run_experiment2(config);
  if (config.id == "exp3") return run_experiment3(config);
  if (config.id == "exp4") return run_experiment4(config);
  if (config.id == "uav") return run_uav_demo(config);
  if (config.id == "custom") return run_custom(config);
  throw ConfigurationError("unknown experiment id '" + config.id + "'");
}

void write_outputs(const ExperimentResult& result) {
  namespace fs = std::filesystem;
  const fs::path dir = result.config.output_dir;
  std::error_code ec;
  fs::create_directories(dir / "traces", ec);
  if (ec) throw ConfigurationError("cannot create output directory " + dir.string());

  for (const auto& named : result.traces) {
    write_trace_csv(dir / "traces" / (named.name + ".csv"), named.trace);
  }

  std::ofstream summary(dir / "summary.csv");
  if (!summary) throw ConfigurationError("cannot write " + (dir / "summary.csv").string());
  summary << std::setprecision(17);
  summary << "label,B,trial,converged,diverged,t_star,a,rho,r_squared,periods_used,gamma,"
             "final_distance,final_residual,lambda_2,excluded,note\n";
  for (const auto& t : result.trials) {
    summary << t.label << ',' << t.delay_bound << ',' << t.trial << ',' << t.converged << ','
            << t.diverged << ',';
    if (t.t_star) summary << *t.t_star;
    summary << ',';
    if (t.fit) {
      summary << t.fit->a << ',' << t.fit->rho << ',' << t.fit->r_squared << ','
              << t.fit->periods_used;
    } else {
      summary << ",,,";
    }
    summary << ',' << t.gamma << ',' << t.final_distance << ',' << t.final_residual << ',';
    if (t.lambda_2) summary << *t.lambda_2;
    std::string note = t.note;
    std::replace(note.begin(), note.end(), ',', ';');
    summary << ',' << t.excluded << ',' << note << '\n';
  }

  json seeds = {{"master", result.config.seed},
                {"graph", derive_seed(result.config.seed, Stream::kGraph)},
                {"sheaf", derive_seed(result.config.seed, Stream::kSheaf)},
                {"init", derive_seed(result.config.seed, Stream::kInit)},
                {"potential", derive_seed(result.config.seed, Stream::kPotential)},
                {"schedule", derive_seed(result.config.seed, Stream::kSchedule)}};
  json model = {{"tick_order", "broadcast then compute"},
                {"inner_product", "euclidean"},
                {"mixture_sd", "sd_scale * (center + 1)"}};
  json meta = {{"config", config_to_json(result.config)},
               {"seeds", seeds},
               {"model", model},
               {"statistics", result.statistics}};
  std::ofstream out(dir / "run_meta.json");
  if (!out) throw ConfigurationError("cannot write " + (dir / "run_meta.json").string());
  out << meta.dump(2) << '\n';
}

}  // namespace sheafdiff
