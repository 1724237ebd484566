#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sheafdiff/diffusion.hpp"
#include "sheafdiff/generators.hpp"
#include "sheafdiff/stats.hpp"

namespace sheafdiff {

/// Resolved parameters for one experiment sweep. `default_config(id)` gives
/// the desk-scale defaults; JSON sections [graph], [sheaf], [potentials],
/// [schedule] and [run] override them key by key.
struct ExperimentConfig {
  std::string id = "custom";
  GraphSpec graph;
  /// exp1 sweeps every entry; the others use the first.
  std::vector<SheafSpec> sheaves{SheafSpec{}};
  /// "quadratic" or "offset_quadratic" (random offsets in image(delta)).
  std::string potentials = "quadratic";
  std::vector<std::size_t> b_values{50};
  MixtureSpec mixture;
  std::size_t trials = 1;
  /// exp4: number of random sheaf instances.
  std::size_t instances = 30;
  double variance = 10.0;
  StepSizePolicy policy = StepSizePolicy::automatic();
  StoppingRule stop;
  /// 0 means one record per period (B + 1 ticks).
  std::size_t record_every = 0;
  /// exp3: average per-trial distances instead of averaging final iterates.
  bool average_distances = false;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
};

/// exp1 | exp2 | exp3 | exp4 | uav | custom. Throws ConfigurationError otherwise.
ExperimentConfig default_config(const std::string& id);

nlohmann::json config_to_json(const ExperimentConfig& config);
/// Overlays the sections present in `doc` onto `base`.
ExperimentConfig config_from_json(const nlohmann::json& doc, ExperimentConfig base);

struct TrialSummary {
  std::string label;
  std::size_t delay_bound = 0;
  std::size_t trial = 0;
  bool converged = false;
  bool diverged = false;
  std::optional<std::size_t> t_star;
  std::optional<ContractionFit> fit;
  double gamma = 0.0;
  /// Distance of the final iterate to the projection of x(0) onto argmin f.
  double final_distance = 0.0;
  double final_residual = 0.0;
  std::optional<double> lambda_2;
  bool excluded = false;
  std::string note;
};

struct NamedTrace {
  std::string name;
  DiffusionTrace trace;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<TrialSummary> trials;
  std::vector<NamedTrace> traces;
  /// Aggregates (correlations, medians, per-B rows) recorded in run_meta.json.
  nlohmann::json statistics = nlohmann::json::object();
};

/// Shared x(0) per sheaf kind, one trace per (kind, B).
ExperimentResult run_experiment1(const ExperimentConfig& config);
/// One sheaf, `trials` Gaussian initial conditions at b_values.front().
ExperimentResult run_experiment2(const ExperimentConfig& config);
/// One sheaf and x(0); `trials` schedules per B; distance of the averaged
/// final iterate to the projection of x(0).
ExperimentResult run_experiment3(const ExperimentConfig& config);
/// `instances` random sheaves; lambda_2 against iterations to converge.
ExperimentResult run_experiment4(const ExperimentConfig& config);
/// Formation sheaf driven from a random start.
ExperimentResult run_uav_demo(const ExperimentConfig& config);
/// Generated sheaf, one run per (B, trial).
ExperimentResult run_custom(const ExperimentConfig& config);

ExperimentResult run_experiment(const ExperimentConfig& config);

/// traces/<name>.csv, summary.csv and run_meta.json under config.output_dir.
void write_outputs(const ExperimentResult& result);

/// Fixed displacement targets used by the UAV demo.
UavDisplacements default_uav_displacements();

}  // namespace sheafdiff
