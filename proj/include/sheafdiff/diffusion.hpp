#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sheafdiff/laplacian.hpp"
#include "sheafdiff/schedule.hpp"

namespace sheafdiff {

struct StoppingRule {
  std::size_t max_ticks = 1'000'000;
  double residual_tol = 1e-8;
  std::size_t record_every = 1;
};

/// fixed: gamma as given. auto: safety / (K (B + 1)). lipschitz: safety / K,
/// ignoring B. auto and lipschitz halve gamma and restart when divergence is
/// detected, at most max_halvings times.
struct StepSizePolicy {
  enum class Mode { kFixed, kAuto, kLipschitz };

  Mode mode = Mode::kAuto;
  double gamma = 0.0;
  double safety = 0.9;
  std::size_t max_halvings = 20;

  static StepSizePolicy fixed(double gamma) { return {Mode::kFixed, gamma, 0.9, 0}; }
  static StepSizePolicy automatic(double safety = 0.9) { return {Mode::kAuto, 0.0, safety, 20}; }
  static StepSizePolicy lipschitz(double safety = 0.9) {
    return {Mode::kLipschitz, 0.0, safety, 20};
  }

  double initial_step(double lipschitz_constant, std::size_t delay_bound) const;
};

/// Counters that back the partial-asynchrony audit.
struct AsyncAudit {
  std::size_t max_staleness = 0;
  std::size_t max_update_gap = 0;
  std::size_t staleness_violations = 0;
  std::size_t gap_violations = 0;
  std::size_t updates = 0;
  std::size_t broadcasts = 0;

  bool clean() const { return staleness_violations == 0 && gap_violations == 0; }
};

struct TraceRecord {
  std::size_t tick = 0;
  double energy = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  /// dist(x(t), X*) / dist(x(0), X*); 0 when x(0) is already a minimizer.
  /// NaN for custom potentials, whose minimizer set is not computed.
  double rel_error = 0.0;
  double iterate_norm = 0.0;
  double residual = 0.0;
};

struct DiffusionTrace {
  std::size_t delay_bound = 0;
  double gamma = 0.0;
  std::size_t halvings = 0;
  /// 0 for custom potentials (alpha is then the raw energy).
  double f_star = 0.0;
  bool offset_in_image = true;
  std::vector<TraceRecord> records;
  /// alpha(r (B + 1)) for r = 0, 1, ... while the run lasted.
  std::vector<double> period_alpha;
  std::optional<std::size_t> converged_at;
  /// Last tick whose state was evaluated.
  std::size_t last_tick = 0;
  /// Set when beta was reported over an underfull window at some tick.
  bool beta_warmup = false;
  double final_residual = 0.0;
  Cochain0 final_state;
  AsyncAudit audit;

  bool converged() const { return converged_at.has_value(); }
};

/// x - gamma * L^{grad U} x.
Cochain0 sync_step(const CellularSheaf& sheaf, const PotentialSet& potentials,
                   const Cochain0& x, double gamma);

DiffusionTrace run_sync(const CellularSheaf& sheaf, const PotentialSet& potentials,
                        const Cochain0& x0, const StepSizePolicy& policy,
                        const StoppingRule& stop);

/// Local view of one agent: its own block plus the last value received from
/// each neighbor (ordered like graph().incidences(i)) and the tick it was sent.
struct AgentState {
  Vector own;
  std::vector<Vector> neighbor_cache;
  std::vector<std::size_t> cache_stamp;
  std::optional<std::size_t> last_update_tick;
  std::optional<std::size_t> last_broadcast_tick;
};

/// Agents with own = x0 blocks and caches filled with x0 stamped at tick 0.
std::vector<AgentState> make_agents(const CellularSheaf& sheaf, const Cochain0& x0);
Cochain0 assemble(const CellularSheaf& sheaf, std::span<const AgentState> agents);

/// One logical tick: every scheduled broadcast first, then every scheduled
/// update against the post-broadcast caches. Returns the number of agents
/// that updated.
std::size_t async_tick(std::vector<AgentState>& agents, AsyncSchedule& schedule,
                       const CellularSheaf& sheaf, const PotentialSet& potentials,
                       double gamma, std::size_t tick, AsyncAudit* audit = nullptr);

DiffusionTrace run_async(const CellularSheaf& sheaf, const PotentialSet& potentials,
                         const Cochain0& x0, std::size_t delay_bound,
                         const StepSizePolicy& policy, const StoppingRule& stop,
                         std::uint64_t rng_seed, const MixtureSpec& mixture = {});

/// Running beta(t): sum of the last B + 1 squared step lengths.
class ProgressTracker {
 public:
  explicit ProgressTracker(std::size_t delay_bound);

  void push_step(double squared_step);
  double beta() const { return sum_; }
  bool window_full() const { return count_ >= window_.size(); }

 private:
  std::vector<double> window_;
  std::size_t next_ = 0;
  std::size_t count_ = 0;
  double sum_ = 0.0;
};

struct ProgressMetrics {
  double alpha = 0.0;
  double beta = 0.0;
  /// Fewer than B + 2 states were available; beta covers the prefix only.
  bool underfull = false;
};

/// alpha and beta at the newest state of `history` (oldest first), using at
/// most the last B + 2 states.
ProgressMetrics progress_metrics(const CellularSheaf& sheaf, const PotentialSet& potentials,
                                 std::span<const Cochain0> history, std::size_t delay_bound,
                                 double f_star);

}  // namespace sheafdiff
